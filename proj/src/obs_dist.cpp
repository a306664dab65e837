#include "maxcox/obs_dist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "maxcox/quadrature.hpp"

namespace maxcox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double interp_cdf(const std::vector<std::pair<double, double>>& pts,
                  double x) {
  if (x < pts.front().first) return 0.0;
  if (x >= pts.back().first) return 1.0;
  auto it = std::upper_bound(
      pts.begin(), pts.end(), x,
      [](double v, const auto& p) { return v < p.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (x - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

[[noreturn]] void csv_fail(const std::string& path, std::size_t lineno,
                           const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
}

double parse_field(const std::string& s, const std::string& path,
                   std::size_t lineno) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    csv_fail(path, lineno, "malformed number \"" + s + "\"");
  }
  if (used != s.size())
    csv_fail(path, lineno, "trailing characters in \"" + s + "\"");
  return v;
}

}  // namespace

ObservationLaw ObservationLaw::pareto(double c, double gamma) {
  if (!(c > 0) || !(gamma > 0))
    throw std::invalid_argument("pareto requires c > 0 and gamma > 0");
  return ObservationLaw(Pareto{c, gamma});
}

ObservationLaw ObservationLaw::exponential(double rate) {
  if (!(rate > 0)) throw std::invalid_argument("exponential requires rate > 0");
  return ObservationLaw(Exponential{rate});
}

ObservationLaw ObservationLaw::bounded_power(double rext, double gamma) {
  return bounded_power(rext - 1.0, rext, gamma);
}

ObservationLaw ObservationLaw::bounded_power(double lext, double rext,
                                             double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("bounded_power requires gamma > 0");
  if (!(lext < rext) || !std::isfinite(lext) || !std::isfinite(rext))
    throw std::invalid_argument("bounded_power requires finite lext < rext");
  return ObservationLaw(BoundedPower{lext, rext, gamma});
}

ObservationLaw ObservationLaw::tabulated(
    std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 2)
    throw std::invalid_argument("tabulated law needs at least two knots");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& [x, f] = pts[i];
    if (!std::isfinite(x) || !std::isfinite(f) || f < 0.0 || f > 1.0)
      throw std::invalid_argument("tabulated knot out of range");
    if (i > 0) {
      if (!(pts[i - 1].first < x))
        throw std::invalid_argument("tabulated x values must strictly increase");
      if (pts[i - 1].second > f)
        throw std::invalid_argument("tabulated F values must be nondecreasing");
    }
  }
  return ObservationLaw(Tabulated{std::move(pts)});
}

ObservationLaw ObservationLaw::tabulated_from_csv(const std::string& path) {
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
  if (strip(line) != "x,F") csv_fail(path, lineno, "expected header \"x,F\"");
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      csv_fail(path, lineno, "expected two comma-separated fields");
    const double x = parse_field(strip(line.substr(0, comma)), path, lineno);
    const double f = parse_field(strip(line.substr(comma + 1)), path, lineno);
    if (!pts.empty() && !(pts.back().first < x))
      csv_fail(path, lineno, "x values must strictly increase");
    if (!pts.empty() && pts.back().second > f)
      csv_fail(path, lineno, "F values must be nondecreasing");
    if (f < 0.0 || f > 1.0) csv_fail(path, lineno, "F outside [0,1]");
    pts.emplace_back(x, f);
  }
  if (pts.size() < 2) csv_fail(path, lineno, "need at least two data rows");
  return tabulated(std::move(pts));
}

double ObservationLaw::lext() const {
  return std::visit(
      [](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) return 0.0;
        if constexpr (std::is_same_v<T, Exponential>) return 0.0;
        if constexpr (std::is_same_v<T, BoundedPower>) return fam.lext;
        if constexpr (std::is_same_v<T, Tabulated>) {
          for (const auto& [x, f] : fam.pts)
            if (f > 0.0) return x;
          return fam.pts.back().first;
        }
      },
      impl_);
}

double ObservationLaw::rext() const {
  return std::visit(
      [](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) return kInf;
        if constexpr (std::is_same_v<T, Exponential>) return kInf;
        if constexpr (std::is_same_v<T, BoundedPower>) return fam.rext;
        if constexpr (std::is_same_v<T, Tabulated>) return fam.pts.back().first;
      },
      impl_);
}

ObservationLaw::Family ObservationLaw::family() const {
  return std::visit(
      [](const auto& fam) -> Family {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) return Family::pareto;
        if constexpr (std::is_same_v<T, Exponential>) return Family::exponential;
        if constexpr (std::is_same_v<T, BoundedPower>) return Family::bounded_power;
        if constexpr (std::is_same_v<T, Tabulated>) return Family::tabulated;
      },
      impl_);
}

double ObservationLaw::pareto_c() const { return std::get<Pareto>(impl_).c; }
double ObservationLaw::pareto_gamma() const { return std::get<Pareto>(impl_).gamma; }
double ObservationLaw::exp_rate() const { return std::get<Exponential>(impl_).rate; }
double ObservationLaw::power_gamma() const { return std::get<BoundedPower>(impl_).gamma; }
const std::vector<std::pair<double, double>>& ObservationLaw::knots() const {
  return std::get<Tabulated>(impl_).pts;
}

double ObservationLaw::tail(double x) const {
  return std::visit(
      [x](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) {
          if (x <= 0.0) return 1.0;
          return fam.c / (std::pow(x, fam.gamma) + fam.c);
        }
        if constexpr (std::is_same_v<T, Exponential>) {
          if (x <= 0.0) return 1.0;
          return std::exp(-fam.rate * x);
        }
        if constexpr (std::is_same_v<T, BoundedPower>) {
          if (x <= fam.lext) return 1.0;
          if (x >= fam.rext) return 0.0;
          return std::pow((fam.rext - x) / (fam.rext - fam.lext), fam.gamma);
        }
        if constexpr (std::is_same_v<T, Tabulated>) {
          if (x >= fam.pts.back().first) return 0.0;
          return 1.0 - interp_cdf(fam.pts, x);
        }
      },
      impl_);
}

double ObservationLaw::cdf(double x) const {
  return std::visit(
      [this, x](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Tabulated>) {
          if (x >= fam.pts.back().first) return 1.0;
          if (x < fam.pts.front().first) return 0.0;
          return interp_cdf(fam.pts, x);
        } else {
          return 1.0 - tail(x);
        }
      },
      impl_);
}

double ObservationLaw::upper_quantile(double w) const {
  if (!(w > 0.0) || !(w <= 1.0))
    throw std::domain_error("upper_quantile requires w in (0,1]");
  return std::visit(
      [w](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) {
          if (w >= 1.0) return 0.0;
          return std::pow(fam.c * (1.0 - w) / w, 1.0 / fam.gamma);
        }
        if constexpr (std::is_same_v<T, Exponential>) {
          return -std::log(w) / fam.rate;
        }
        if constexpr (std::is_same_v<T, BoundedPower>) {
          return fam.rext -
                 (fam.rext - fam.lext) * std::pow(w, 1.0 / fam.gamma);
        }
        if constexpr (std::is_same_v<T, Tabulated>) {
          // inf{x : 1 - F(x) <= w} on the piecewise-linear interpolant.
          const auto& pts = fam.pts;
          const double u = 1.0 - w;
          if (u <= pts.front().second) return pts.front().first;
          if (u > pts.back().second) return pts.back().first;  // atom at rext
          auto it = std::lower_bound(
              pts.begin(), pts.end(), u,
              [](const auto& p, double v) { return p.second < v; });
          const auto& hi = *it;
          const auto& lo = *(it - 1);  // lo.second < u <= hi.second
          const double s = (u - lo.second) / (hi.second - lo.second);
          return lo.first + s * (hi.first - lo.first);
        }
      },
      impl_);
}

double ObservationLaw::quantile(double u) const {
  if (!(u > 0.0) || !(u < 1.0))
    throw std::domain_error("quantile requires u in (0,1)");
  return std::visit(
      [this, u](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) {
          return std::pow(fam.c * u / (1.0 - u), 1.0 / fam.gamma);
        }
        if constexpr (std::is_same_v<T, Exponential>) {
          return -std::log1p(-u) / fam.rate;
        }
        if constexpr (std::is_same_v<T, BoundedPower>) {
          return fam.rext -
                 (fam.rext - fam.lext) * std::pow(1.0 - u, 1.0 / fam.gamma);
        }
        if constexpr (std::is_same_v<T, Tabulated>) {
          return upper_quantile(1.0 - u);
        }
      },
      impl_);
}

double ObservationLaw::mean_excess(double y) const {
  const double right = rext();
  if (!(y < right)) throw std::domain_error("mean_excess requires y < rext");
  const double ty = tail(y);
  if (!(ty > 0.0)) throw std::domain_error("mean_excess requires 1 - F(y) > 0");
  return std::visit(
      [this, y, ty](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          // \int_y^inf e^{-rate z} dz / e^{-rate y} = 1/rate for y >= 0.
          if (y >= 0.0) return 1.0 / fam.rate;
          return -y + 1.0 / fam.rate;
        } else if constexpr (std::is_same_v<T, Pareto>) {
          if (fam.gamma <= 1.0)
            throw std::domain_error("not integrable: pareto tail with gamma <= 1");
          // Quadrature up to Y with c Y^-gamma <= 1e-3, then the remainder
          // as the alternating series sum_j (-1)^{j+1} (c z^-g)^j of the
          // tail, integrated term by term.
          const double lo = std::max(y, 0.0);
          const double Y =
              std::max(lo, std::pow(fam.c * 1e3, 1.0 / fam.gamma));
          double integral =
              quad::integrate([&](double z) { return tail(z); }, lo, Y, 1e-12);
          const double qY = fam.c * std::pow(Y, -fam.gamma);
          double sign = 1.0, qpow = qY;
          for (int j = 1; j <= 8; ++j) {
            integral += sign * Y * qpow / (j * fam.gamma - 1.0);
            sign = -sign;
            qpow *= qY;
          }
          if (y < 0.0) integral += -y;  // tail == 1 on (y, 0]
          return integral / ty;
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          // The interpolant is piecewise linear, so the tail integral is an
          // exact sum of trapezoids.
          const auto& pts = fam.pts;
          double integral = 0.0;
          double prev_x = y, prev_t = tail(y);
          for (const auto& [x, f] : pts) {
            if (x <= y) continue;
            integral += 0.5 * (prev_t + (1.0 - f)) * (x - prev_x);
            prev_x = x;
            prev_t = 1.0 - f;
          }
          return integral / ty;
        } else {
          double integral = quad::integrate(
              [this](double z) { return tail(z); }, y, rext(), 1e-11);
          return integral / ty;
        }
      },
      impl_);
}

DomainTag ObservationLaw::classify_domain() const {
  return std::visit(
      [this](const auto& fam) -> DomainTag {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) {
          return {TailDomain::frechet, fam.gamma};
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return {TailDomain::gumbel, 0.0};
        } else if constexpr (std::is_same_v<T, BoundedPower>) {
          return {TailDomain::weibull, fam.gamma};
        } else {
          // Regular-variation diagnostic at the largest usable y: compare
          // (1-F(yx))/(1-F(y)) against x^{-gamma} for x in {1/2, 2}. Both
          // y and 2y must stay among knots that still carry tail mass, or
          // the forced drop to F = 1 at the last knot distorts the slopes.
          const auto& pts = fam.pts;
          double right = pts.back().first;
          for (const auto& [x, f] : pts)
            if (f < 1.0) right = x;
          double y = 0.0;
          for (const auto& [x, f] : pts) {
            (void)f;
            if (x > 0.0 && 2.0 * x <= right) y = x;
          }
          if (!(y > 0.0)) return {TailDomain::unknown, 0.0};
          const double ty = tail(y);
          const double t2 = tail(2.0 * y);
          const double th = tail(0.5 * y);
          if (!(ty > 0.0) || !(t2 > 0.0) || !(th > 0.0) || !(th > ty))
            return {TailDomain::unknown, 0.0};
          const double g_up = std::log(ty / t2) / std::log(2.0);
          const double g_dn = std::log(th / ty) / std::log(2.0);
          if (!(g_up > 0.0) || !(g_dn > 0.0)) return {TailDomain::unknown, 0.0};
          const double rel = std::abs(g_up - g_dn) / std::max(g_up, g_dn);
          if (rel > 0.05) return {TailDomain::unknown, 0.0};
          return {TailDomain::frechet, 0.5 * (g_up + g_dn)};
        }
      },
      impl_);
}

}  // namespace maxcox
