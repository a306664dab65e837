#pragma once

#include <cstdint>
#include <utility>
#include <variant>

#include "maxcox/mixing.hpp"
#include "maxcox/normalizer.hpp"
#include "maxcox/obs_dist.hpp"

namespace maxcox {

//! Law of the random sample size N. The max over an empty sample is -inf,
//! so the k = 0 term of the generating function contributes full mass to
//! P(max < x) at every finite x.
class RandomSizeLaw {
 public:
  static RandomSizeLaw fixed(std::int64_t n);
  static RandomSizeLaw binomial(std::int64_t n, double p);
  static RandomSizeLaw poisson(double lambda);
  // N ~ Poisson(Lambda * td) with Lambda ~ mix; td is the horizon clock
  // value Lambda(t)/Lambda = d(t), kept separate from the mixing shape.
  static RandomSizeLaw mixed_poisson(MixingLaw mix, double td);
  // Equal in law to mixed_poisson(gamma(r), (1-p)/p).
  static RandomSizeLaw neg_binomial(double r, double p);

  enum class Kind { fixed, binomial, poisson, mixed_poisson, neg_binomial };
  Kind kind() const;
  std::int64_t fixed_n() const;
  std::int64_t binomial_n() const;
  double binomial_p() const;
  double poisson_lambda() const;
  const MixingLaw& mix() const;
  double mixed_td() const;
  double nb_r() const;
  double nb_p() const;
  double nb_t() const;  // (1-p)/p

 private:
  struct Fixed {
    std::int64_t n;
  };
  struct Binomial {
    std::int64_t n;
    double p;
  };
  struct Poisson {
    double lambda;
  };
  struct MixedPoisson {
    MixingLaw mix;
    double td;
  };
  struct NegBinomial {
    double r, p;
  };
  using Impl = std::variant<Fixed, Binomial, Poisson, MixedPoisson, NegBinomial>;
  explicit RandomSizeLaw(Impl impl) : impl_(std::move(impl)) {}
  Impl impl_;
};

// P(max_{k <= N} X_k < x) = psi_N(F(x)), evaluated through the direct tail
// so that deep-tail accuracy survives.
double max_cdf(const RandomSizeLaw& size, const ObservationLaw& law, double x);

// max_cdf at a(t) + b(t) x, routed through the plan's cancellation-free
// scaled tail. For mixed Poisson sizes this is ls_transform(mix, z_t(x))
// scaled by td/d(t).
double normalized_max_cdf(const RandomSizeLaw& size,
                          const NormalizationPlan& plan, double t, double x);

}  // namespace maxcox
