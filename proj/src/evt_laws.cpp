#include "maxcox/evt_laws.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace maxcox {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTauZero = 1e-8;
}  // namespace

EvtLaw EvtLaw::frechet(double gamma) {
  if (!(gamma > 0)) throw std::domain_error("frechet requires gamma > 0");
  return EvtLaw{1.0 / gamma};
}

EvtLaw EvtLaw::weibull(double gamma) {
  if (!(gamma > 0)) throw std::domain_error("weibull requires gamma > 0");
  return EvtLaw{-1.0 / gamma};
}

EvtType EvtLaw::type() const {
  if (std::abs(tau) < kTauZero) return EvtType::gumbel;
  return tau > 0 ? EvtType::frechet : EvtType::weibull;
}

double EvtLaw::gamma() const {
  if (std::abs(tau) < kTauZero) return kInf;
  return std::abs(1.0 / tau);
}

double log_h_tau(const EvtLaw& law, double x) {
  const double tau = law.tau;
  if (std::abs(tau) < kTauZero) return -std::exp(-x);
  const double u = 1.0 + tau * x;
  if (u <= 0.0) return tau > 0 ? -kInf : 0.0;
  // -(1 + tau x)^{-1/tau}
  return -std::exp(-std::log1p(tau * x) / tau);
}

double h_tau(const EvtLaw& law, double x) {
  const double lg = log_h_tau(law, x);
  return lg == -kInf ? 0.0 : std::exp(lg);
}

double classical_log(EvtType kind, double gamma, double x) {
  switch (kind) {
    case EvtType::frechet:
      if (!(gamma > 0)) throw std::domain_error("frechet requires gamma > 0");
      return x <= 0.0 ? -kInf : -std::pow(x, -gamma);
    case EvtType::weibull:
      if (!(gamma > 0)) throw std::domain_error("weibull requires gamma > 0");
      return x >= 0.0 ? 0.0 : -std::pow(-x, gamma);
    case EvtType::gumbel:
      return -std::exp(-x);
  }
  throw std::logic_error("unreachable");
}

double classical_form(EvtType kind, double gamma, double x) {
  const double lg = classical_log(kind, gamma, x);
  return lg == -kInf ? 0.0 : std::exp(lg);
}

LimitLaw LimitLaw::classical(EvtType kind, double gamma) {
  if (kind != EvtType::gumbel && !(gamma > 0))
    throw std::domain_error("classical law requires gamma > 0");
  return LimitLaw{false, 0.0, gamma, kind};
}

double LimitLaw::log_cdf(double x) const {
  if (universal_) return log_h_tau(EvtLaw{tau_}, x);
  return classical_log(kind_, gamma_, x);
}

double LimitLaw::cdf(double x) const {
  const double lg = log_cdf(x);
  return lg == -kInf ? 0.0 : std::exp(lg);
}

}  // namespace maxcox
