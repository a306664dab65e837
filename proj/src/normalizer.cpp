#include "maxcox/normalizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace maxcox {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NormalizationPlan::NormalizationPlan(ObservationLaw law, EvtLaw evt, TimeFn d,
                                     DomainMode mode, TimeFn a, TimeFn b)
    : law_(std::move(law)),
      evt_(evt),
      d_(std::move(d)),
      mode_(mode),
      custom_a_(std::move(a)),
      custom_b_(std::move(b)) {}

NormalizationPlan NormalizationPlan::make(ObservationLaw law, EvtLaw evt,
                                          TimeFn d, DomainMode mode) {
  if (!d) throw std::invalid_argument("plan requires a clock function d(t)");
  if (mode == DomainMode::custom)
    throw std::invalid_argument("custom plans must supply a and b");

  if (mode == DomainMode::weibull && !std::isfinite(law.rext()))
    throw std::domain_error("weibull mode requires rext < inf");
  if (mode == DomainMode::gumbel &&
      law.family() == ObservationLaw::Family::pareto &&
      law.pareto_gamma() <= 1.0)
    throw std::domain_error("not integrable: gumbel mode needs an integrable tail");

  const auto fam = law.family();
  const bool consistent =
      (fam == ObservationLaw::Family::pareto && mode == DomainMode::frechet) ||
      (fam == ObservationLaw::Family::exponential && mode == DomainMode::gumbel) ||
      (fam == ObservationLaw::Family::bounded_power && mode == DomainMode::weibull) ||
      fam == ObservationLaw::Family::tabulated;
  if (!consistent)
    throw std::domain_error("normalization mode inconsistent with the law's domain");

  const bool tau_matches =
      (mode == DomainMode::frechet && evt.type() == EvtType::frechet) ||
      (mode == DomainMode::weibull && evt.type() == EvtType::weibull) ||
      (mode == DomainMode::gumbel && evt.type() == EvtType::gumbel);
  if (!tau_matches)
    throw std::domain_error("evt shape tau inconsistent with the normalization mode");

  return NormalizationPlan(std::move(law), evt, std::move(d), mode, {}, {});
}

NormalizationPlan NormalizationPlan::custom(ObservationLaw law, EvtLaw evt,
                                            TimeFn d, TimeFn a, TimeFn b) {
  if (!d || !a || !b)
    throw std::invalid_argument("custom plan requires d, a and b");
  return NormalizationPlan(std::move(law), evt, std::move(d),
                           DomainMode::custom, std::move(a), std::move(b));
}

double NormalizationPlan::clock(double t) const {
  const double D = d_(t);
  if (!(D > 0) || !std::isfinite(D))
    throw std::domain_error("d(t) must be positive and finite");
  // Validity range of the plan: the tail inversion needs 1/d(t) inside the
  // range of 1 - F.
  if (mode_ == DomainMode::frechet &&
      law_.family() == ObservationLaw::Family::pareto && !(D > 1.0))
    throw std::domain_error("pareto/frechet plan valid for d(t) > 1 only");
  if (mode_ == DomainMode::weibull && !(D >= 1.0))
    throw std::domain_error("weibull plan valid for d(t) >= 1 only");
  return D;
}

double NormalizationPlan::a(double t) const {
  const double D = clock(t);
  switch (mode_) {
    case DomainMode::frechet:
      return 0.0;
    case DomainMode::weibull:
      return law_.rext();
    case DomainMode::gumbel:
      return law_.upper_quantile(1.0 / D);
    case DomainMode::custom:
      return custom_a_(t);
  }
  throw std::logic_error("unreachable");
}

double NormalizationPlan::b(double t) const {
  const double D = clock(t);
  switch (mode_) {
    case DomainMode::frechet:
      return law_.upper_quantile(1.0 / D);
    case DomainMode::weibull:
      return law_.rext() - law_.upper_quantile(1.0 / D);
    case DomainMode::gumbel:
      return law_.mean_excess(law_.upper_quantile(1.0 / D));
    case DomainMode::custom: {
      const double v = custom_b_(t);
      if (!(v > 0)) throw std::domain_error("custom b(t) must be positive");
      return v;
    }
  }
  throw std::logic_error("unreachable");
}

double NormalizationPlan::d(double t) const { return d_(t); }

// The closed-form plans evaluate the mode's tail algebra beyond the support
// edge of F (for the gumbel plan, e^{-x} even where a(t)+b(t)x < lext).
// That analytic continuation is what makes the worked identities exact at
// every finite t; the literal probability is always available through
// max_cdf at a(t)+b(t)x. The generic path uses the clamped tail.
double NormalizationPlan::scaled_tail(double t, double x) const {
  const double D = clock(t);
  const auto fam = law_.family();
  if (mode_ == DomainMode::frechet && fam == ObservationLaw::Family::pareto) {
    if (x <= 0.0) return D;
    const double w = std::pow(x, law_.pareto_gamma());
    return D / ((D - 1.0) * w + 1.0);
  }
  if (mode_ == DomainMode::gumbel &&
      fam == ObservationLaw::Family::exponential) {
    // a = log(D)/rate, b = 1/rate: the clock cancels exactly.
    return std::exp(-x);
  }
  if (mode_ == DomainMode::weibull &&
      fam == ObservationLaw::Family::bounded_power) {
    if (x >= 0.0) return 0.0;
    return std::pow(-x, law_.power_gamma());
  }
  return D * law_.tail(a(t) + b(t) * x);
}

double NormalizationPlan::discrepancy(double t, double x) const {
  const double lg = log_limit(x);
  if (lg == -kInf)
    throw std::domain_error("discrepancy undefined where H(x) = 0");
  const double D = clock(t);
  const auto fam = law_.family();
  if (mode_ == DomainMode::frechet && fam == ObservationLaw::Family::pareto) {
    // z - x^{-gamma} collapses to a single cancellation-free fraction.
    const double w = std::pow(x, law_.pareto_gamma());
    return (w - 1.0) / (w * ((D - 1.0) * w + 1.0));
  }
  if (mode_ == DomainMode::gumbel &&
      fam == ObservationLaw::Family::exponential) {
    return 0.0;
  }
  if (mode_ == DomainMode::weibull &&
      fam == ObservationLaw::Family::bounded_power) {
    return 0.0;
  }
  // Plain subtraction; absolute floor around 1e-12 at large t.
  return scaled_tail(t, x) + lg;
}

double NormalizationPlan::log_limit(double x) const {
  switch (mode_) {
    case DomainMode::frechet:
      return classical_log(EvtType::frechet, evt_.gamma(), x);
    case DomainMode::weibull:
      return classical_log(EvtType::weibull, evt_.gamma(), x);
    case DomainMode::gumbel:
      return classical_log(EvtType::gumbel, 0.0, x);
    case DomainMode::custom:
      return log_h_tau(evt_, x);
  }
  throw std::logic_error("unreachable");
}

double NormalizationPlan::limit_cdf(double x) const {
  const double lg = log_limit(x);
  return lg == -kInf ? 0.0 : std::exp(lg);
}

LimitLaw NormalizationPlan::limit_law() const {
  switch (mode_) {
    case DomainMode::frechet:
      return LimitLaw::classical(EvtType::frechet, evt_.gamma());
    case DomainMode::weibull:
      return LimitLaw::classical(EvtType::weibull, evt_.gamma());
    case DomainMode::gumbel:
      return LimitLaw::classical(EvtType::gumbel, 0.0);
    case DomainMode::custom:
      return LimitLaw::universal(evt_.tau);
  }
  throw std::logic_error("unreachable");
}

}  // namespace maxcox
