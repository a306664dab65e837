#include "maxcox/rate_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maxcox/quadrature.hpp"

namespace maxcox {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double factorial(int k) { return std::tgamma(static_cast<double>(k) + 1.0); }

BoundReport violated(BoundReport rep, std::string why) {
  rep.status = BoundStatus::conditions_violated;
  rep.note = std::move(why);
  rep.terms.clear();
  rep.total.reset();
  return rep;
}

void finish(BoundReport& rep) {
  double sum = 0.0;
  for (const auto& [name, v] : rep.terms) {
    (void)name;
    sum += v;
  }
  rep.total = sum;
}
}  // namespace

double BoundReport::term(std::string_view name) const {
  for (const auto& [n, v] : terms)
    if (n == name) return v;
  return 0.0;
}

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::thm5: return "thm5";
    case BoundKind::thm6: return "thm6";
    case BoundKind::thm7: return "thm7";
    case BoundKind::thm8: return "thm8";
    case BoundKind::cor1: return "cor1";
    case BoundKind::cor2: return "cor2";
    case BoundKind::cor3: return "cor3";
    case BoundKind::cor4: return "cor4";
    case BoundKind::cor5: return "cor5";
    case BoundKind::cor6: return "cor6";
  }
  return "?";
}

const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::ok: return "ok";
    case BoundStatus::conditions_violated: return "conditions_violated";
    case BoundStatus::moment_unavailable: return "moment_unavailable";
  }
  return "?";
}

std::optional<BoundKind> bound_kind_from_string(std::string_view s) {
  static constexpr BoundKind all[] = {
      BoundKind::thm5, BoundKind::thm6, BoundKind::thm7, BoundKind::thm8,
      BoundKind::cor1, BoundKind::cor2, BoundKind::cor3, BoundKind::cor4,
      BoundKind::cor5, BoundKind::cor6};
  for (BoundKind k : all)
    if (s == to_string(k)) return k;
  return std::nullopt;
}

double series_coefficient(int k, int M, double q) {
  if (k < 1 || M < 1 || k > M)
    throw std::domain_error("series_coefficient requires 1 <= k <= M");
  if (!(q > 0) || !(q < 1))
    throw std::domain_error("series_coefficient requires q in (0,1)");
  if (k < M) return 1.0 / factorial(k);
  return (1.0 + M * (1.0 - q)) / (factorial(M + 1) * (1.0 - q));
}

BoundReport thm5_bound(double tail_at, std::int64_t n, const LimitLaw& limit,
                       double x, std::optional<double> q_opt,
                       std::optional<double> s_opt) {
  BoundReport rep;
  rep.kind = BoundKind::thm5;
  rep.x = x;
  const double logH = limit.log_cdf(x);
  rep.limit_value = logH == -kInf ? 0.0 : std::exp(logH);
  if (logH == -kInf) return violated(std::move(rep), "H(x) = 0");
  if (n < 1) return violated(std::move(rep), "requires n >= 1");
  if (!(tail_at >= 0) || !(tail_at <= 1))
    throw std::domain_error("tail_at must be a probability");

  const double nn = static_cast<double>(n);
  const double zeta = nn * tail_at;
  const double rho = zeta + logH;
  rep.scaled_tail = zeta;
  rep.discrepancy = rho;

  if (tail_at > 0.5) return violated(std::move(rep), "F(a+bx) < 1/2");

  const double q_min = 2.0 * zeta * zeta / (3.0 * nn);
  const double q = q_opt.value_or(q_min);
  if (q < q_min || !(q < 1.0))
    return violated(std::move(rep), "no feasible q (needs 2 zeta^2 <= 3 q n, q < 1)");
  const double s_min = std::abs(rho) / 3.0;
  const double s = s_opt.value_or(s_min);
  if (s < s_min || !(s < 1.0))
    return violated(std::move(rep), "no feasible s (needs |rho| <= 3 s, s < 1)");

  rep.q = q;
  rep.s = s;
  const double H = rep.limit_value;
  const double r1 = 2.0 * zeta * zeta / nn +
                    2.0 * std::pow(zeta, 4) / ((1.0 - q) * nn * nn);
  const double r2 = std::abs(rho) + rho * rho / (2.0 * (1.0 - s));
  rep.terms = {{"r1", H * r1}, {"r2", H * r2}, {"cross", H * r1 * r2}};
  finish(rep);
  return rep;
}

BoundReport thm6_bound(const ObservationLaw& law, std::int64_t n, double p,
                       double a, double b, const LimitLaw& limit, double x,
                       std::optional<double> q_opt,
                       std::optional<double> s_opt) {
  BoundReport rep;
  rep.kind = BoundKind::thm6;
  rep.x = x;
  const double logH = limit.log_cdf(x);
  rep.limit_value = logH == -kInf ? 0.0 : std::exp(logH);
  if (logH == -kInf) return violated(std::move(rep), "H(x) = 0");
  if (n < 1) return violated(std::move(rep), "requires n >= 1");
  if (!(p >= 0) || !(p <= 1)) throw std::domain_error("p must be in [0,1]");
  if (!(b > 0)) throw std::domain_error("b must be positive");

  const double tail = law.tail(a + b * x);
  const double nn = static_cast<double>(n);
  const double lambda = nn * p;
  const double zeta = lambda * tail;
  const double rho = zeta + logH;
  rep.scaled_tail = zeta;
  rep.discrepancy = rho;

  if (p * tail > 0.5) return violated(std::move(rep), "p (1 - F(a+bx)) > 1/2");

  const double q_min = 2.0 * zeta * zeta / (3.0 * nn);
  const double q = q_opt.value_or(q_min);
  if (q < q_min || !(q < 1.0))
    return violated(std::move(rep), "no feasible q");
  const double s_min = std::abs(rho) / 3.0;
  const double s = s_opt.value_or(s_min);
  if (s < s_min || !(s < 1.0))
    return violated(std::move(rep), "no feasible s (needs |rho| <= 3 s, s < 1)");

  rep.q = q;
  rep.s = s;
  const double H = rep.limit_value;
  const double r1 =
      2.0 * zeta * zeta / nn + 2.0 * std::pow(zeta, 4) / (nn * nn * (1.0 - q));
  const double r2 = std::abs(rho) + rho * rho / (2.0 * (1.0 - s));
  rep.terms = {{"r1", H * r1}, {"r2", H * r2}, {"cross", H * r1 * r2}};
  finish(rep);
  return rep;
}

BoundReport thm7_bound(double lambda, double tail_at, const LimitLaw& limit,
                       double x, std::optional<double> s_opt) {
  BoundReport rep;
  rep.kind = BoundKind::thm7;
  rep.x = x;
  const double logH = limit.log_cdf(x);
  rep.limit_value = logH == -kInf ? 0.0 : std::exp(logH);
  if (logH == -kInf) return violated(std::move(rep), "H(x) = 0");
  if (!(lambda > 0)) throw std::domain_error("lambda must be positive");
  if (!(tail_at >= 0) || !(tail_at <= 1))
    throw std::domain_error("tail_at must be a probability");

  const double rho = lambda * tail_at + logH;
  rep.scaled_tail = lambda * tail_at;
  rep.discrepancy = rho;

  const double s_min = std::abs(rho) / 3.0;
  const double s = s_opt.value_or(s_min);
  if (s < s_min || !(s < 1.0))
    return violated(std::move(rep), "no feasible s (needs |rho| <= 3 s, s < 1)");

  rep.s = s;
  const double H = rep.limit_value;
  rep.terms = {{"r2", H * (std::abs(rho) + rho * rho / (2.0 * (1.0 - s)))}};
  finish(rep);
  return rep;
}

namespace {

double leading_process_term(const CoxBoundInputs& in, double z) {
  if (!in.finite_t_cdf || z == 0.0) return 0.0;
  // Truncate where exp(-lambda z) < 1e-16; the integrand is at most 1 there.
  const double hi = -std::log(1e-16) / z;
  const auto& mix = *in.mix;
  const auto& G = in.finite_t_cdf;
  // The |CDF difference| can be a narrow plateau between two atoms; seed
  // the adaptive rule with enough panels to see it.
  const double integral = quad::integrate(
      [&](double l) {
        return std::abs(G(l) - mix.cdf(l)) * std::exp(-l * z);
      },
      0.0, hi, 1e-8, 1e-14, 4000, 64);
  return z * integral;
}

BoundReport cox_report_header(BoundKind kind, const CoxBoundInputs& in,
                              double x) {
  if (in.plan == nullptr || in.mix == nullptr)
    throw std::invalid_argument("Cox bound needs a plan and a mixing law");
  BoundReport rep;
  rep.kind = kind;
  rep.x = x;
  const double logH = in.plan->log_limit(x);
  rep.limit_value = logH == -kInf ? 0.0 : std::exp(logH);
  return rep;
}

}  // namespace

BoundReport thm8_bound(const CoxBoundInputs& in, double x, double q, int M) {
  if (!(q > 0) || !(q < 1)) throw std::domain_error("thm8 requires q in (0,1)");
  if (M < 1) throw std::domain_error("thm8 requires M >= 1");
  BoundReport rep = cox_report_header(BoundKind::thm8, in, x);
  if (rep.limit_value == 0.0) return violated(std::move(rep), "H(x) = 0");

  const double z = in.plan->scaled_tail(in.t, x);
  const double r = in.plan->discrepancy(in.t, x);
  rep.scaled_tail = z;
  rep.discrepancy = r;
  rep.q = q;
  rep.m = M;

  const double absr = std::abs(r);
  double series = 0.0;
  if (absr > 0.0) {
    const LimitLaw limit = in.plan->limit_law();
    double rpow = 1.0;  // |r|^{k-1}
    for (int k = 1; k <= M; ++k) {
      const auto mk = in.mix->weighted_moment(limit, x, k);
      if (!mk) {
        rep.status = BoundStatus::moment_unavailable;
        rep.note = "moment m_" + std::to_string(k) +
                   " unavailable; fall back to cor6";
        rep.terms.clear();
        rep.total.reset();
        return rep;
      }
      double coef = series_coefficient(k, M, q);
      if (in.proof_form) coef /= factorial(k);
      series += coef * rpow * *mk;
      rpow *= absr;
    }
    series *= absr;
  }
  const double tail_term = absr > 0.0 ? in.mix->tail_prob(q / absr) : 0.0;

  rep.terms = {{"series_term", series},
               {"tail_term", tail_term},
               {"leading_process_term", leading_process_term(in, z)}};
  finish(rep);
  return rep;
}

BoundReport cor_bound(BoundKind kind, const CoxBoundInputs& in, double x,
                      std::optional<double> q_opt) {
  const double q = q_opt.value_or(0.5);
  switch (kind) {
    case BoundKind::cor1: {
      BoundReport rep = thm8_bound(in, x, q, 1);
      rep.kind = BoundKind::cor1;
      return rep;
    }
    case BoundKind::cor2: {
      BoundReport rep = cox_report_header(kind, in, x);
      if (rep.limit_value == 0.0) return violated(std::move(rep), "H(x) = 0");
      if (in.mix->kind() != MixingLaw::Kind::point)
        return violated(std::move(rep), "cor2 requires a deterministic mixing law");
      const double lambda = in.mix->point_value();
      const double r = in.plan->discrepancy(in.t, x);
      rep.scaled_tail = in.plan->scaled_tail(in.t, x);
      rep.discrepancy = r;
      rep.sign_condition_ok = r >= 0.0;
      const double h_pow = std::exp(lambda * in.plan->log_limit(x));
      rep.terms = {{"series_term", std::abs(r) * lambda * h_pow}};
      finish(rep);
      return rep;
    }
    case BoundKind::cor3: {
      BoundReport rep = cox_report_header(kind, in, x);
      if (rep.limit_value == 0.0) return violated(std::move(rep), "H(x) = 0");
      const double r = in.plan->discrepancy(in.t, x);
      rep.scaled_tail = in.plan->scaled_tail(in.t, x);
      rep.discrepancy = r;
      rep.sign_condition_ok = r >= 0.0;
      rep.terms = {{"series_term", std::abs(r) * rep.limit_value}};
      finish(rep);
      return rep;
    }
    case BoundKind::cor4:
    case BoundKind::cor5: {
      BoundReport rep = cox_report_header(kind, in, x);
      if (rep.limit_value == 0.0) return violated(std::move(rep), "H(x) = 0");
      const auto mean = in.mix->mean();
      if (!mean)
        return violated(std::move(rep), "requires E Lambda < inf");
      const double L = *mean;
      const double z = in.plan->scaled_tail(in.t, x);
      const double r = in.plan->discrepancy(in.t, x);
      rep.scaled_tail = z;
      rep.discrepancy = r;
      double series = 0.0;
      if (kind == BoundKind::cor4) {
        const auto m1 = in.mix->weighted_moment(in.plan->limit_law(), x, 1);
        if (!m1) {
          rep.status = BoundStatus::moment_unavailable;
          rep.note = "moment m_1 unavailable; fall back to cor6";
          return rep;
        }
        series = std::abs(r) * (*m1 + L + std::sqrt(2.0 * L * *m1));
      } else {
        series = (2.0 + std::sqrt(2.0)) * L * std::abs(r);
      }
      rep.terms = {{"series_term", series},
                   {"leading_process_term", leading_process_term(in, z)}};
      finish(rep);
      return rep;
    }
    case BoundKind::cor6: {
      BoundReport rep = cox_report_header(kind, in, x);
      if (rep.limit_value == 0.0) return violated(std::move(rep), "H(x) = 0");
      const double theta = -in.plan->log_limit(x);
      if (!(theta > 0.0))
        return violated(std::move(rep), "cor6 requires H(x) < 1");
      if (!(q > 0) || !(q < 1))
        throw std::domain_error("cor6 requires q in (0,1)");
      const double z = in.plan->scaled_tail(in.t, x);
      const double r = in.plan->discrepancy(in.t, x);
      rep.scaled_tail = z;
      rep.discrepancy = r;
      rep.q = q;
      const double absr = std::abs(r);
      const double series =
          absr > 0.0
              ? (2.0 - q) * absr / (2.0 * std::exp(1.0) * (1.0 - q) * theta)
              : 0.0;
      const double tail_term = absr > 0.0 ? in.mix->tail_prob(q / absr) : 0.0;
      rep.terms = {{"series_term", series},
                   {"tail_term", tail_term},
                   {"leading_process_term", leading_process_term(in, z)}};
      finish(rep);
      return rep;
    }
    default:
      throw std::invalid_argument("cor_bound handles cor1..cor6 only");
  }
}

namespace {

// Minimize f over [lo, hi] by golden-section, tracking the best probe.
std::pair<double, double> golden_min(const std::function<double(double)>& f,
                                     double lo, double hi) {
  constexpr double invphi = 0.6180339887498949;
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  double fc = f(c), fd = f(d);
  double best_q = fc <= fd ? c : d;
  double best_v = std::min(fc, fd);
  for (int it = 0; it < 70; ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = f(d);
    }
    if (fc < best_v) best_v = fc, best_q = c;
    if (fd < best_v) best_v = fd, best_q = d;
  }
  return {best_q, best_v};
}

}  // namespace

BoundReport optimize_parameters(BoundKind kind, const CoxBoundInputs& in,
                                double x) {
  if (kind != BoundKind::thm8 && kind != BoundKind::cor1 &&
      kind != BoundKind::cor6)
    throw std::invalid_argument("optimize_parameters: kind has no free q");

  auto eval = [&](double q, int M) -> BoundReport {
    if (kind == BoundKind::cor6) return cor_bound(BoundKind::cor6, in, x, q);
    BoundReport rep = thm8_bound(in, x, q, M);
    if (kind == BoundKind::cor1) rep.kind = BoundKind::cor1;
    return rep;
  };

  // Degenerate cases: H(x) = 0, r_t = 0, missing moments.
  {
    BoundReport probe = eval(0.5, 1);
    if (probe.status != BoundStatus::ok) return probe;
    if (probe.discrepancy == 0.0) return probe;  // any q works; 0.5 canonical
  }

  constexpr double kEps = 1e-6;
  auto best_q_for_m = [&](int M) -> std::pair<double, BoundReport> {
    auto value = [&](double q) {
      BoundReport rep = eval(q, M);
      return rep.status == BoundStatus::ok ? *rep.total : kInf;
    };
    // Coarse scan to bracket the minimum, then golden-section refinement.
    constexpr int N = 128;
    double best_v = kInf, best_q = 0.5;
    for (int i = 0; i <= N; ++i) {
      const double q = kEps + (1.0 - 2.0 * kEps) * i / N;
      const double v = value(q);
      if (v < best_v) {
        best_v = v;
        best_q = q;
      }
    }
    const double step = (1.0 - 2.0 * kEps) / N;
    const double lo = std::max(kEps, best_q - step);
    const double hi = std::min(1.0 - kEps, best_q + step);
    auto [gq, gv] = golden_min(value, lo, hi);
    if (gv < best_v) best_q = gq;
    return {best_q, eval(best_q, M)};
  };

  auto [q1, rep1] = best_q_for_m(1);
  (void)q1;
  if (kind == BoundKind::cor1 || kind == BoundKind::cor6) return rep1;

  BoundReport best = std::move(rep1);
  for (int M = 2; M <= 30; ++M) {
    auto [qm, repm] = best_q_for_m(M);
    (void)qm;
    if (repm.status != BoundStatus::ok) break;
    const double prev = *best.total;
    if (*repm.total < prev) {
      const double improvement = (prev - *repm.total) / std::max(prev, 1e-300);
      best = std::move(repm);
      if (improvement < 1e-6) break;
    } else {
      break;
    }
  }
  return best;
}

}  // namespace maxcox
