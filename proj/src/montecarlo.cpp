#include "maxcox/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace maxcox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One deterministic per-worker stream of max draws.
class MaxSampler {
 public:
  MaxSampler(const SimConfig& cfg, unsigned worker) : cfg_(&cfg) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      worker, 0x9e3779b9u};
    eng_.seed(seq);
  }

  double next() {
    const std::int64_t n = draw_count();
    if (n == 0) return -kInf;
    // max of n iid marks, via the tail of U^{1/n}
    const double u = uniform01();
    const double tail_u = -std::expm1(std::log(u) / static_cast<double>(n));
    return cfg_->obs.upper_quantile(std::min(std::max(tail_u, 0.0), 1.0));
  }

 private:
  double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }

  double draw_mixing(const MixingLaw& mix) {
    switch (mix.kind()) {
      case MixingLaw::Kind::point:
        return mix.point_value();
      case MixingLaw::Kind::gamma: {
        std::gamma_distribution<double> g(mix.gamma_shape(), mix.gamma_scale());
        return g(eng_);
      }
      case MixingLaw::Kind::discrete: {
        const double u = uniform01();
        double acc = 0.0;
        for (const auto& [l, p] : mix.atoms()) {
          acc += p;
          if (u < acc) return l;
        }
        return mix.atoms().back().first;
      }
      case MixingLaw::Kind::density: {
        // Numeric inverse CDF by bisection; slow but exact enough for the
        // rarely sampled generic kind.
        const double u = uniform01();
        double lo = 0.0, hi = mix.density_spec().upper;
        for (int i = 0; i < 60; ++i) {
          const double mid = 0.5 * (lo + hi);
          (mix.cdf(mid) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      }
    }
    throw std::logic_error("unreachable");
  }

  std::int64_t poisson(double mean) {
    std::poisson_distribution<std::int64_t> d(mean);
    return d(eng_);
  }

  std::int64_t draw_count() {
    const auto& size = cfg_->size;
    switch (size.kind()) {
      case RandomSizeLaw::Kind::fixed:
        return size.fixed_n();
      case RandomSizeLaw::Kind::binomial: {
        std::binomial_distribution<std::int64_t> d(size.binomial_n(),
                                                   size.binomial_p());
        return d(eng_);
      }
      case RandomSizeLaw::Kind::poisson:
        return size.poisson_lambda() > 0 ? poisson(size.poisson_lambda()) : 0;
      case RandomSizeLaw::Kind::mixed_poisson: {
        const double lambda = draw_mixing(size.mix());
        const double mean = lambda * size.mixed_td();
        return mean > 0 ? poisson(mean) : 0;
      }
      case RandomSizeLaw::Kind::neg_binomial: {
        std::gamma_distribution<double> g(size.nb_r(), 1.0);
        const double mean = g(eng_) * size.nb_t();
        return mean > 0 ? poisson(mean) : 0;
      }
    }
    throw std::logic_error("unreachable");
  }

  const SimConfig* cfg_;
  std::mt19937_64 eng_;
};

struct Block {
  std::size_t begin, count;
};

std::vector<Block> partition(std::size_t n, int workers) {
  const std::size_t w = std::max(workers, 1);
  std::vector<Block> blocks;
  const std::size_t base = n / w, rem = n % w;
  std::size_t at = 0;
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t cnt = base + (i < rem ? 1 : 0);
    blocks.push_back({at, cnt});
    at += cnt;
  }
  return blocks;
}

}  // namespace

double dkw_epsilon(std::size_t n, double delta) {
  if (n == 0 || !(delta > 0) || !(delta < 1))
    throw std::domain_error("dkw_epsilon requires n > 0 and delta in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

std::vector<double> sample_max(const SimConfig& cfg, std::size_t count) {
  std::vector<double> out(count);
  const auto blocks = partition(count, cfg.workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < blocks.size(); ++w) {
    pool.emplace_back([&, w] {
      MaxSampler sampler(cfg, static_cast<unsigned>(w));
      for (std::size_t i = 0; i < blocks[w].count; ++i)
        out[blocks[w].begin + i] = sampler.next();
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

EmpiricalResult empirical_cdf(const SimConfig& cfg) {
  if (cfg.x_grid.empty()) throw std::invalid_argument("empty x_grid");
  if (!std::is_sorted(cfg.x_grid.begin(), cfg.x_grid.end()))
    throw std::invalid_argument("x_grid must be sorted");
  if (cfg.n_samples == 0) throw std::invalid_argument("n_samples must be > 0");

  const double a = cfg.plan ? cfg.plan->a(cfg.t) : 0.0;
  const double b = cfg.plan ? cfg.plan->b(cfg.t) : 1.0;

  const std::size_t g = cfg.x_grid.size();
  const auto blocks = partition(cfg.n_samples, cfg.workers);
  std::vector<std::vector<std::size_t>> hists(blocks.size());
  std::vector<std::size_t> empties(blocks.size(), 0);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < blocks.size(); ++w) {
    pool.emplace_back([&, w] {
      auto& hist = hists[w];
      hist.assign(g + 1, 0);
      MaxSampler sampler(cfg, static_cast<unsigned>(w));
      for (std::size_t i = 0; i < blocks[w].count; ++i) {
        double m = sampler.next();
        if (m == -kInf) {
          ++empties[w];
          // an empty sample lies below every finite grid point
          ++hist[0];
          continue;
        }
        if (cfg.plan) m = (m - a) / b;
        const auto it =
            std::upper_bound(cfg.x_grid.begin(), cfg.x_grid.end(), m);
        ++hist[static_cast<std::size_t>(it - cfg.x_grid.begin())];
      }
    });
  }
  for (auto& th : pool) th.join();

  EmpiricalResult res;
  res.x_grid = cfg.x_grid;
  res.n_samples = cfg.n_samples;
  res.dkw_eps = dkw_epsilon(cfg.n_samples, cfg.delta);
  res.ecdf.resize(g);
  std::size_t below = 0;
  for (std::size_t i = 0; i < g; ++i) {
    for (const auto& hist : hists) below += hist[i];
    res.ecdf[i] =
        static_cast<double>(below) / static_cast<double>(cfg.n_samples);
  }
  for (const auto e : empties) res.empty_samples += e;
  return res;
}

bool within_dkw(const EmpiricalResult& emp,
                const std::function<double(double)>& exact_cdf) {
  for (std::size_t i = 0; i < emp.x_grid.size(); ++i) {
    if (std::abs(emp.ecdf[i] - exact_cdf(emp.x_grid[i])) > emp.dkw_eps)
      return false;
  }
  return true;
}

namespace {

MixingLaw derive_mix(const SimConfig& cfg) {
  const auto& size = cfg.size;
  switch (size.kind()) {
    case RandomSizeLaw::Kind::neg_binomial:
      return MixingLaw::gamma(size.nb_r());
    case RandomSizeLaw::Kind::mixed_poisson:
      return size.mix();
    case RandomSizeLaw::Kind::poisson: {
      const double d = cfg.plan ? cfg.plan->d(cfg.t) : cfg.t;
      return MixingLaw::point(size.poisson_lambda() / d);
    }
    case RandomSizeLaw::Kind::fixed: {
      const double d = cfg.plan ? cfg.plan->d(cfg.t) : cfg.t;
      return MixingLaw::point(static_cast<double>(size.fixed_n()) / d);
    }
    case RandomSizeLaw::Kind::binomial: {
      const double d = cfg.plan ? cfg.plan->d(cfg.t) : cfg.t;
      return MixingLaw::point(
          static_cast<double>(size.binomial_n()) * size.binomial_p() / d);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Certification certify(const SimConfig& cfg, const CertifyOptions& opt) {
  if (!cfg.plan) throw std::invalid_argument("certify requires a plan");
  const auto& plan = *cfg.plan;

  const MixingLaw mix = opt.mix ? *opt.mix : derive_mix(cfg);
  CoxBoundInputs inputs;
  inputs.plan = &plan;
  inputs.t = cfg.t;
  inputs.mix = &mix;

  auto bound_at = [&](double x) -> BoundReport {
    if (opt.bound_fn) return opt.bound_fn(x);
    switch (opt.kind) {
      case BoundKind::thm5: {
        const double tail = cfg.obs.tail(plan.a(cfg.t) + plan.b(cfg.t) * x);
        return thm5_bound(tail, cfg.size.fixed_n(), plan.limit_law(), x);
      }
      case BoundKind::thm6:
        return thm6_bound(cfg.obs, cfg.size.binomial_n(), cfg.size.binomial_p(),
                          plan.a(cfg.t), plan.b(cfg.t), plan.limit_law(), x);
      case BoundKind::thm7: {
        const double tail = cfg.obs.tail(plan.a(cfg.t) + plan.b(cfg.t) * x);
        return thm7_bound(cfg.size.poisson_lambda(), tail, plan.limit_law(), x);
      }
      case BoundKind::thm8:
        if (opt.optimize) return optimize_parameters(BoundKind::thm8, inputs, x);
        return thm8_bound(inputs, x, opt.q.value_or(0.5), opt.m.value_or(1));
      default:
        if (opt.optimize &&
            (opt.kind == BoundKind::cor1 || opt.kind == BoundKind::cor6))
          return optimize_parameters(opt.kind, inputs, x);
        return cor_bound(opt.kind, inputs, x, opt.q);
    }
  };

  const bool limit_is_mixture =
      opt.kind == BoundKind::thm8 ||
      (opt.kind >= BoundKind::cor1 && opt.kind <= BoundKind::cor6) ||
      opt.bound_fn != nullptr;
  auto limit_at = [&](double x) {
    if (limit_is_mixture) return mix.power_mixture(plan.limit_law(), x);
    return plan.limit_cdf(x);
  };

  std::optional<EmpiricalResult> emp;
  if (cfg.n_samples > 0) emp = empirical_cdf(cfg);

  Certification cert;
  cert.seed = cfg.seed;
  cert.n_samples = cfg.n_samples;

  // Margin comparisons allow one representable step of slack: a zero bound
  // against a zero error must not fail on the last bit.
  constexpr double kSlack = 1e-15;

  for (std::size_t i = 0; i < cfg.x_grid.size(); ++i) {
    const double x = cfg.x_grid[i];
    const double exact = normalized_max_cdf(cfg.size, plan, cfg.t, x);
    const double limit = limit_at(x);
    CertRow row;
    row.x = x;
    row.exact_error = std::abs(exact - limit);
    const BoundReport rep = bound_at(x);
    row.conditions_ok =
        rep.status == BoundStatus::ok && rep.sign_condition_ok;
    row.bound = rep.total.value_or(std::numeric_limits<double>::quiet_NaN());
    row.margin = row.bound - row.exact_error;
    if (emp) {
      row.ecdf_dev = std::abs(emp->ecdf[i] - exact);
      row.dkw_eps = emp->dkw_eps;
      cert.max_ecdf_dev = std::max(cert.max_ecdf_dev, row.ecdf_dev);
      if (row.ecdf_dev > emp->dkw_eps) cert.ecdf_ok = false;
    }
    cert.sup_error = std::max(cert.sup_error, row.exact_error);
    if (row.conditions_ok) {
      ++cert.checked_cells;
      cert.sup_error_conditioned =
          std::max(cert.sup_error_conditioned, row.exact_error);
      if (!(row.margin >= -kSlack)) cert.margins_ok = false;
    } else {
      ++cert.reported_cells;
      if (rep.total && !(row.margin >= -kSlack)) ++cert.reported_violations;
    }
    cert.rows.push_back(row);
  }
  cert.pass = cert.margins_ok && cert.ecdf_ok;
  return cert;
}

void write_certification_csv(const Certification& cert, std::ostream& out) {
  out << "x,exact_error,bound,margin,ecdf_dev,dkw_eps,conditions_ok\n";
  char buf[256];
  for (const auto& r : cert.rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.x,
                  r.exact_error, r.bound, r.margin, r.ecdf_dev, r.dkw_eps,
                  r.conditions_ok ? 1 : 0);
    out << buf;
  }
}

}  // namespace maxcox
