#pragma once

#include <functional>

#include "maxcox/evt_laws.hpp"
#include "maxcox/obs_dist.hpp"

namespace maxcox {

enum class DomainMode { frechet, weibull, gumbel, custom };

//! Centering/scaling plan (a(t), b(t), d(t)) for a given observation law and
//! limit type, together with the centered tail quantities that drive the
//! rate bounds:
//!
//!   scaled_tail(t, x)  = d(t) [1 - F(a(t) + b(t) x)]
//!   discrepancy(t, x)  = scaled_tail(t, x) + log H(x)
//!
//! For the parametric families the plan evaluates both through algebraically
//! reduced closed forms, so the discrepancy is free of the catastrophic
//! cancellation that the plain difference suffers at large t. The closed
//! forms follow the mode's tail algebra past the support edge of F (the
//! analytic continuation under which the exponential/poisson and
//! bounded-power identities hold exactly at every finite t, with an exact
//! 0.0 discrepancy); the literal probability at a(t)+b(t)x is always
//! available through max_cdf. The generic path (tabulated laws, custom
//! plans) uses the clamped tail and direct subtraction, with a ~1e-12
//! absolute floor.
class NormalizationPlan {
 public:
  using TimeFn = std::function<double(double)>;

  // Mode must match the family of the law for parametric laws (pareto ->
  // frechet, exponential -> gumbel, bounded_power -> weibull); tabulated
  // laws are accepted in any structurally valid mode since their numeric
  // domain diagnostic is never trusted for selection.
  static NormalizationPlan make(ObservationLaw law, EvtLaw evt, TimeFn d,
                                DomainMode mode);
  // Caller supplies a(t), b(t) directly.
  static NormalizationPlan custom(ObservationLaw law, EvtLaw evt, TimeFn d,
                                  TimeFn a, TimeFn b);

  double a(double t) const;
  double b(double t) const;
  double d(double t) const;

  double scaled_tail(double t, double x) const;  // z_t(x)
  double discrepancy(double t, double x) const;  // r_t(x); needs H(x) > 0

  // Limit law in the coordinates the plan normalizes to: the classical law
  // of the mode for the three domain modes, H_tau for custom plans.
  double log_limit(double x) const;
  double limit_cdf(double x) const;
  LimitLaw limit_law() const;

  DomainMode mode() const { return mode_; }
  const ObservationLaw& law() const { return law_; }
  const EvtLaw& evt() const { return evt_; }

 private:
  NormalizationPlan(ObservationLaw law, EvtLaw evt, TimeFn d, DomainMode mode,
                    TimeFn a, TimeFn b);

  double clock(double t) const;  // d(t), validated for the family

  ObservationLaw law_;
  EvtLaw evt_;
  TimeFn d_;
  DomainMode mode_;
  TimeFn custom_a_, custom_b_;
};

}  // namespace maxcox
