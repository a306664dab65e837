#pragma once

namespace maxcox {

enum class EvtType { frechet, weibull, gumbel };

//! Extreme-value limit law in the one-parameter universal form
//! H_tau(x) = exp{-(1 + tau x)^{-1/tau}}, with the tau = 0 case defined by
//! its Gumbel limit exp{-e^{-x}}.
//
// tau > 0 is the Frechet type, tau < 0 the Weibull type, tau = 0 Gumbel,
// with gamma = |1/tau| for tau != 0. |tau| below 1e-8 routes to the tau = 0
// branch: (1 + tau x)^{-1/tau} loses about eight digits there in doubles.
struct EvtLaw {
  double tau = 0.0;

  static EvtLaw from_tau(double tau) { return EvtLaw{tau}; }
  static EvtLaw frechet(double gamma);
  static EvtLaw weibull(double gamma);
  static EvtLaw gumbel() { return EvtLaw{0.0}; }

  EvtType type() const;
  double gamma() const;  // |1/tau|; +inf for the gumbel branch
};

// log H_tau(x), computed without exponentiating first. -inf outside the
// support (tau > 0, 1 + tau x <= 0); exactly 0 at and beyond the upper
// endpoint of a Weibull-type law.
double log_h_tau(const EvtLaw& law, double x);
double h_tau(const EvtLaw& law, double x);

// The three classical laws exactly as displayed: H_{1,gamma}, H_{2,gamma},
// H_{3,0}. gamma must be positive for frechet/weibull.
double classical_form(EvtType kind, double gamma, double x);
double classical_log(EvtType kind, double gamma, double x);

//! An evaluable limit distribution: either the universal H_tau or one of the
//! classical laws in its own coordinates. Normalizer plans and rate bounds
//! consume this, since the plans of the three domain theorems target the
//! classical laws directly.
class LimitLaw {
 public:
  static LimitLaw universal(double tau) { return LimitLaw{true, tau, 0.0, EvtType::gumbel}; }
  static LimitLaw classical(EvtType kind, double gamma);

  double log_cdf(double x) const;
  double cdf(double x) const;

 private:
  LimitLaw(bool u, double tau, double gamma, EvtType kind)
      : universal_(u), tau_(tau), gamma_(gamma), kind_(kind) {}
  bool universal_;
  double tau_;
  double gamma_;
  EvtType kind_;
};

}  // namespace maxcox
