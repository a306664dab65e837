#include "maxcox/mixing.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "maxcox/quadrature.hpp"

namespace maxcox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exp(-lambda z) underflows to exactly 0 beyond this, so integrals in lambda
// may be truncated there without loss.
double underflow_horizon(double z) { return z > 0.0 ? 745.2 / z : kInf; }

[[noreturn]] void csv_fail(const std::string& path, std::size_t lineno,
                           const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

MixingLaw MixingLaw::point(double lambda0) {
  if (!(lambda0 >= 0)) throw std::invalid_argument("point mass requires lambda0 >= 0");
  return MixingLaw(Point{lambda0});
}

MixingLaw MixingLaw::gamma(double shape, double scale) {
  if (!(shape > 0) || !(scale > 0))
    throw std::invalid_argument("gamma mixing requires shape > 0 and scale > 0");
  return MixingLaw(Gamma{shape, scale});
}

MixingLaw MixingLaw::discrete(std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete mixing needs atoms");
  double mass = 0.0;
  for (const auto& [l, p] : atoms) {
    if (!(l >= 0)) throw std::invalid_argument("discrete atom requires lambda >= 0");
    if (!(p >= 0)) throw std::invalid_argument("discrete atom requires p >= 0");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-12)
    throw std::invalid_argument("discrete mixing masses must sum to 1");
  std::sort(atoms.begin(), atoms.end());
  return MixingLaw(Discrete{std::move(atoms)});
}

MixingLaw MixingLaw::discrete_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string line;
  std::size_t lineno = 1;
  auto strip = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  if (!std::getline(in, line)) csv_fail(path, lineno, "empty file");
  if (strip(line) != "lambda,p") csv_fail(path, lineno, "expected header \"lambda,p\"");
  std::vector<std::pair<double, double>> atoms;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      csv_fail(path, lineno, "expected two comma-separated fields");
    try {
      std::size_t used = 0;
      const std::string a = strip(line.substr(0, comma));
      const std::string b = strip(line.substr(comma + 1));
      const double l = std::stod(a, &used);
      if (used != a.size()) csv_fail(path, lineno, "trailing characters");
      const double p = std::stod(b, &used);
      if (used != b.size()) csv_fail(path, lineno, "trailing characters");
      atoms.emplace_back(l, p);
    } catch (const std::invalid_argument&) {
      csv_fail(path, lineno, "malformed number");
    } catch (const std::out_of_range&) {
      csv_fail(path, lineno, "number out of range");
    }
  }
  if (atoms.empty()) csv_fail(path, lineno, "no atoms");
  return discrete(std::move(atoms));
}

MixingLaw MixingLaw::density(DensitySpec spec) {
  if (!spec.pdf) throw std::invalid_argument("density mixing needs a pdf");
  if (!(spec.upper > 0) || !std::isfinite(spec.upper))
    throw std::invalid_argument("density mixing needs a finite positive upper bound");
  const double mass = quad::integrate([&](double l) { return spec.pdf(l); },
                                      0.0, spec.upper, 1e-10, 0.0, 4000, 16);
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument("density does not integrate to 1 over [0, upper]");
  return MixingLaw(std::move(spec));
}

MixingLaw::Kind MixingLaw::kind() const {
  return std::visit(
      [](const auto& m) -> Kind {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Point>) return Kind::point;
        if constexpr (std::is_same_v<T, Gamma>) return Kind::gamma;
        if constexpr (std::is_same_v<T, Discrete>) return Kind::discrete;
        if constexpr (std::is_same_v<T, DensitySpec>) return Kind::density;
      },
      impl_);
}

double MixingLaw::point_value() const { return std::get<Point>(impl_).lambda0; }
double MixingLaw::gamma_shape() const { return std::get<Gamma>(impl_).shape; }
double MixingLaw::gamma_scale() const { return std::get<Gamma>(impl_).scale; }
const std::vector<std::pair<double, double>>& MixingLaw::atoms() const {
  return std::get<Discrete>(impl_).atoms;
}
const MixingLaw::DensitySpec& MixingLaw::density_spec() const {
  return std::get<DensitySpec>(impl_);
}

double MixingLaw::ls_transform(double z) const {
  if (!(z >= 0)) throw std::domain_error("ls_transform requires z >= 0");
  return std::visit(
      [z](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Point>) {
          return std::exp(-m.lambda0 * z);
        } else if constexpr (std::is_same_v<T, Gamma>) {
          // (1 + scale z)^{-shape}
          return std::exp(-m.shape * std::log1p(m.scale * z));
        } else if constexpr (std::is_same_v<T, Discrete>) {
          double s = 0.0;
          for (const auto& [l, p] : m.atoms) s += p * std::exp(-l * z);
          return s;
        } else {
          const double hi = std::min(m.upper, underflow_horizon(z));
          if (!(hi > 0.0)) return 0.0;
          return quad::integrate(
              [&](double l) { return std::exp(-l * z) * m.pdf(l); }, 0.0, hi,
              1e-10, 0.0, 4000, 16);
        }
      },
      impl_);
}

double MixingLaw::mass_at_zero() const {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Point>) {
          return m.lambda0 == 0.0 ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Discrete>) {
          double s = 0.0;
          for (const auto& [l, p] : m.atoms)
            if (l == 0.0) s += p;
          return s;
        } else {
          return 0.0;
        }
      },
      impl_);
}

double MixingLaw::power_mixture(const LimitLaw& limit, double x) const {
  const double lg = limit.log_cdf(x);
  if (lg == -kInf) return mass_at_zero();
  return ls_transform(-lg);
}

std::optional<double> MixingLaw::weighted_moment(const LimitLaw& limit,
                                                 double x, int k) const {
  if (k < 1) throw std::domain_error("weighted_moment requires k >= 1");
  const double lg = limit.log_cdf(x);
  if (lg == -kInf) return 0.0;  // lambda^k H^lambda vanishes except at lambda=0
  const double theta = -lg;
  return std::visit(
      [theta, k](const auto& m) -> std::optional<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Point>) {
          return std::pow(m.lambda0, k) * std::exp(-m.lambda0 * theta);
        } else if constexpr (std::is_same_v<T, Gamma>) {
          // scale^k * (shape)_k / (1 + scale theta)^{shape + k}
          double rising = 1.0;
          for (int i = 0; i < k; ++i) rising *= m.shape + i;
          return rising * std::pow(m.scale, k) *
                 std::exp(-(m.shape + k) * std::log1p(m.scale * theta));
        } else if constexpr (std::is_same_v<T, Discrete>) {
          double s = 0.0;
          for (const auto& [l, p] : m.atoms)
            s += p * std::pow(l, k) * std::exp(-l * theta);
          return s;
        } else {
          if (k > m.max_finite_moment) return std::nullopt;
          const double hi = std::min(m.upper, underflow_horizon(theta) * 2.0);
          return quad::integrate(
              [&](double l) {
                return std::pow(l, k) * std::exp(-l * theta) * m.pdf(l);
              },
              0.0, hi, 1e-10, 0.0, 4000, 16);
        }
      },
      impl_);
}

double MixingLaw::tail_prob(double u) const {
  if (!(u > 0)) throw std::domain_error("tail_prob requires u > 0");
  return std::visit(
      [u](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Point>) {
          return m.lambda0 > u ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Gamma>) {
          return boost::math::gamma_q(m.shape, u / m.scale);
        } else if constexpr (std::is_same_v<T, Discrete>) {
          double s = 0.0;
          for (const auto& [l, p] : m.atoms)
            if (l > u) s += p;
          return s;
        } else {
          if (u >= m.upper) return 0.0;
          const double s = quad::integrate(
              [&](double l) { return m.pdf(l); }, u, m.upper, 1e-10, 1e-14,
              4000, 16);
          return std::clamp(s, 0.0, 1.0);
        }
      },
      impl_);
}

double MixingLaw::cdf(double u) const {
  if (u < 0.0) return 0.0;
  if (u == 0.0) return mass_at_zero();
  return 1.0 - tail_prob(u);
}

std::optional<double> MixingLaw::mean() const {
  return std::visit(
      [](const auto& m) -> std::optional<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Point>) {
          return m.lambda0;
        } else if constexpr (std::is_same_v<T, Gamma>) {
          return m.shape * m.scale;
        } else if constexpr (std::is_same_v<T, Discrete>) {
          double s = 0.0;
          for (const auto& [l, p] : m.atoms) s += p * l;
          return s;
        } else {
          if (m.max_finite_moment < 1) return std::nullopt;  // infinite mean
          return quad::integrate([&](double l) { return l * m.pdf(l); }, 0.0,
                                 m.upper, 1e-10, 0.0, 4000, 16);
        }
      },
      impl_);
}

double sup_lambda_power(double b, double alpha) {
  if (!(b > 0)) throw std::domain_error("sup_lambda_power requires b > 0");
  if (!(alpha > 0) || !(alpha < 1))
    throw std::domain_error("sup_lambda_power requires alpha in (0,1)");
  const double log_inv = -std::log(alpha);
  return std::pow(b / (std::exp(1.0) * log_inv), b);
}

}  // namespace maxcox
