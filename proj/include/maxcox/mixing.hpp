#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "maxcox/evt_laws.hpp"

namespace maxcox {

//! Law of the nonnegative mixing variable Lambda: the limit of the scaled
//! cumulative intensity Lambda(t)/d(t).
//
// weighted_moment returns nullopt ("moment unavailable") instead of throwing
// when a declared-heavy-tailed density has no such moment; callers fall back
// to the moment-free bound. mean() likewise returns nullopt for an infinite
// mean.
class MixingLaw {
 public:
  struct DensitySpec {
    std::function<double(double)> pdf;  // density on [0, upper]
    double upper = 0.0;                 // truncation point of the support
    // Largest k with E Lambda^k < inf for the law being modeled; moments
    // beyond it are reported unavailable even though the truncated integral
    // would be finite.
    int max_finite_moment = std::numeric_limits<int>::max();
  };

  static MixingLaw point(double lambda0);
  static MixingLaw gamma(double shape, double scale = 1.0);
  static MixingLaw discrete(std::vector<std::pair<double, double>> atoms);
  static MixingLaw discrete_from_csv(const std::string& path);
  // Verifies at construction that the density integrates to 1 within 1e-8.
  static MixingLaw density(DensitySpec spec);

  // Laplace-Stieltjes transform E exp(-Lambda z), z >= 0.
  double ls_transform(double z) const;

  // \int H^lambda(x) dP(Lambda < lambda) = ls_transform(-log H(x));
  // P(Lambda = 0) when H(x) = 0.
  double power_mixture(const LimitLaw& limit, double x) const;

  // m_k(x) = \int lambda^k H^lambda(x) dP(Lambda < lambda), k >= 1.
  std::optional<double> weighted_moment(const LimitLaw& limit, double x,
                                        int k) const;

  double tail_prob(double u) const;  // P(Lambda > u), u > 0
  double cdf(double u) const;        // P(Lambda <= u)
  std::optional<double> mean() const;
  double mass_at_zero() const;

  enum class Kind { point, gamma, discrete, density };
  Kind kind() const;
  double point_value() const;
  double gamma_shape() const;
  double gamma_scale() const;
  const std::vector<std::pair<double, double>>& atoms() const;
  const DensitySpec& density_spec() const;

 private:
  struct Point {
    double lambda0;
  };
  struct Gamma {
    double shape, scale;
  };
  struct Discrete {
    std::vector<std::pair<double, double>> atoms;
  };
  using Impl = std::variant<Point, Gamma, Discrete, DensitySpec>;
  explicit MixingLaw(Impl impl) : impl_(std::move(impl)) {}
  Impl impl_;
};

// sup_{lambda >= 0} lambda^b alpha^lambda = (b / (e log(1/alpha)))^b for
// alpha in (0,1), b > 0.
double sup_lambda_power(double b, double alpha);

}  // namespace maxcox
