#include "maxcox/exact_law.hpp"

#include <cmath>
#include <stdexcept>

namespace maxcox {

RandomSizeLaw RandomSizeLaw::fixed(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("fixed size requires n >= 0");
  return RandomSizeLaw(Fixed{n});
}

RandomSizeLaw RandomSizeLaw::binomial(std::int64_t n, double p) {
  if (n < 0) throw std::invalid_argument("binomial requires n >= 0");
  if (!(p >= 0) || !(p <= 1))
    throw std::invalid_argument("binomial requires p in [0,1]");
  return RandomSizeLaw(Binomial{n, p});
}

RandomSizeLaw RandomSizeLaw::poisson(double lambda) {
  if (!(lambda >= 0)) throw std::invalid_argument("poisson requires lambda >= 0");
  return RandomSizeLaw(Poisson{lambda});
}

RandomSizeLaw RandomSizeLaw::mixed_poisson(MixingLaw mix, double td) {
  if (!(td >= 0)) throw std::invalid_argument("mixed_poisson requires td >= 0");
  return RandomSizeLaw(MixedPoisson{std::move(mix), td});
}

RandomSizeLaw RandomSizeLaw::neg_binomial(double r, double p) {
  if (!(r > 0)) throw std::invalid_argument("neg_binomial requires r > 0");
  if (!(p > 0) || !(p < 1))
    throw std::invalid_argument("neg_binomial requires p in (0,1)");
  return RandomSizeLaw(NegBinomial{r, p});
}

RandomSizeLaw::Kind RandomSizeLaw::kind() const {
  return std::visit(
      [](const auto& s) -> Kind {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Fixed>) return Kind::fixed;
        if constexpr (std::is_same_v<T, Binomial>) return Kind::binomial;
        if constexpr (std::is_same_v<T, Poisson>) return Kind::poisson;
        if constexpr (std::is_same_v<T, MixedPoisson>) return Kind::mixed_poisson;
        if constexpr (std::is_same_v<T, NegBinomial>) return Kind::neg_binomial;
      },
      impl_);
}

std::int64_t RandomSizeLaw::fixed_n() const { return std::get<Fixed>(impl_).n; }
std::int64_t RandomSizeLaw::binomial_n() const { return std::get<Binomial>(impl_).n; }
double RandomSizeLaw::binomial_p() const { return std::get<Binomial>(impl_).p; }
double RandomSizeLaw::poisson_lambda() const { return std::get<Poisson>(impl_).lambda; }
const MixingLaw& RandomSizeLaw::mix() const { return std::get<MixedPoisson>(impl_).mix; }
double RandomSizeLaw::mixed_td() const { return std::get<MixedPoisson>(impl_).td; }
double RandomSizeLaw::nb_r() const { return std::get<NegBinomial>(impl_).r; }
double RandomSizeLaw::nb_p() const { return std::get<NegBinomial>(impl_).p; }
double RandomSizeLaw::nb_t() const {
  const auto& nb = std::get<NegBinomial>(impl_);
  return (1.0 - nb.p) / nb.p;
}

namespace {

// psi_N(1 - w) via the direct tail value w = 1 - F(x).
double generating_at_tail(const RandomSizeLaw::Kind kind,
                          const RandomSizeLaw& size, double w) {
  switch (kind) {
    case RandomSizeLaw::Kind::fixed: {
      const auto n = size.fixed_n();
      if (n == 0) return 1.0;
      return std::pow(1.0 - w, static_cast<double>(n));
    }
    case RandomSizeLaw::Kind::binomial: {
      const auto n = size.binomial_n();
      if (n == 0) return 1.0;
      return std::pow(1.0 - size.binomial_p() * w, static_cast<double>(n));
    }
    case RandomSizeLaw::Kind::poisson:
      return std::exp(-size.poisson_lambda() * w);
    case RandomSizeLaw::Kind::mixed_poisson:
      return size.mix().ls_transform(size.mixed_td() * w);
    case RandomSizeLaw::Kind::neg_binomial:
      // (1 + t w)^{-r}, t = (1-p)/p
      return std::exp(-size.nb_r() * std::log1p(size.nb_t() * w));
  }
  throw std::logic_error("unreachable");
}

}  // namespace

double max_cdf(const RandomSizeLaw& size, const ObservationLaw& law,
               double x) {
  return generating_at_tail(size.kind(), size, law.tail(x));
}

double normalized_max_cdf(const RandomSizeLaw& size,
                          const NormalizationPlan& plan, double t, double x) {
  const double z = plan.scaled_tail(t, x);
  const double D = plan.d(t);
  switch (size.kind()) {
    case RandomSizeLaw::Kind::poisson:
      return std::exp(-(size.poisson_lambda() / D) * z);
    case RandomSizeLaw::Kind::mixed_poisson:
      return size.mix().ls_transform((size.mixed_td() / D) * z);
    case RandomSizeLaw::Kind::neg_binomial:
      return std::exp(-size.nb_r() * std::log1p((size.nb_t() / D) * z));
    case RandomSizeLaw::Kind::fixed: {
      const auto n = size.fixed_n();
      if (n == 0) return 1.0;
      return std::pow(1.0 - z / D, static_cast<double>(n));
    }
    case RandomSizeLaw::Kind::binomial: {
      const auto n = size.binomial_n();
      if (n == 0) return 1.0;
      return std::pow(1.0 - size.binomial_p() * z / D,
                      static_cast<double>(n));
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace maxcox
