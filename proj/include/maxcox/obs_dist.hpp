#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace maxcox {

enum class TailDomain { frechet, weibull, gumbel, unknown };

// Result of a domain-of-max-attraction classification. gamma is meaningful
// for the frechet/weibull tags only.
struct DomainTag {
  TailDomain kind = TailDomain::unknown;
  double gamma = 0.0;
};

//! Observation distribution F with direct tail formulas.
//
// Tail probabilities are first-class: tail(x) is computed by the family's
// own formula, never as 1 - cdf(x), so that relative accuracy survives deep
// into the tail where every convergence-rate bound lives.
class ObservationLaw {
 public:
  enum class Family { pareto, exponential, bounded_power, tabulated };

  // F(x) = 1 - c/(x^gamma + c) on [0, inf).
  static ObservationLaw pareto(double c, double gamma);
  // F(x) = 1 - exp(-rate x) on [0, inf).
  static ObservationLaw exponential(double rate);
  // F(x) = 1 - ((rext - x)/(rext - lext))^gamma on [lext, rext].
  static ObservationLaw bounded_power(double rext, double gamma);
  static ObservationLaw bounded_power(double lext, double rext, double gamma);
  // Piecewise-linear F through the given knots (strictly increasing x,
  // nondecreasing F in [0,1]). The last knot is treated as rext.
  static ObservationLaw tabulated(std::vector<std::pair<double, double>> pts);
  // CSV with header "x,F"; malformed input reports the offending line.
  static ObservationLaw tabulated_from_csv(const std::string& path);

  double cdf(double x) const;
  double tail(double x) const;  // 1 - F(x), direct formula

  // inf{x : F(x) >= u}, u in (0,1).
  double quantile(double u) const;
  // inf{x : 1 - F(x) <= w}, w in (0,1]; the deep-tail-accurate companion of
  // quantile(1 - w). This is the generalized inverse used by the b(t) of the
  // normalizer plans.
  double upper_quantile(double w) const;

  // Mean-excess function R(y) = (1-F(y))^{-1} \int_y^rext (1-F(z)) dz.
  // Closed form for the exponential family; quadrature otherwise. Throws
  // std::domain_error("not integrable") when the tail integral diverges
  // (pareto with gamma <= 1).
  double mean_excess(double y) const;

  // Analytic classification for parametric families; a finite-sample
  // regular-variation diagnostic for tabulated laws (never used to select
  // normalizers automatically).
  DomainTag classify_domain() const;

  double lext() const;
  double rext() const;
  Family family() const;

  // Family parameters, valid for the matching family only.
  double pareto_c() const;
  double pareto_gamma() const;
  double exp_rate() const;
  double power_gamma() const;
  const std::vector<std::pair<double, double>>& knots() const;

 private:
  struct Pareto {
    double c, gamma;
  };
  struct Exponential {
    double rate;
  };
  struct BoundedPower {
    double lext, rext, gamma;
  };
  struct Tabulated {
    std::vector<std::pair<double, double>> pts;
  };
  using Impl = std::variant<Pareto, Exponential, BoundedPower, Tabulated>;

  explicit ObservationLaw(Impl impl) : impl_(std::move(impl)) {}
  Impl impl_;
};

}  // namespace maxcox
