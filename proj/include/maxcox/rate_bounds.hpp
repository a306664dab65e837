#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maxcox/evt_laws.hpp"
#include "maxcox/mixing.hpp"
#include "maxcox/normalizer.hpp"
#include "maxcox/obs_dist.hpp"

namespace maxcox {

enum class BoundKind {
  thm5,
  thm6,
  thm7,
  thm8,
  cor1,
  cor2,
  cor3,
  cor4,
  cor5,
  cor6
};

enum class BoundStatus { ok, conditions_violated, moment_unavailable };

//! Per-x decomposition of a convergence-rate bound. Infeasible side
//! conditions yield conditions_violated, never an exception, so tabulation
//! over grids proceeds past infeasible cells. total is always the plain sum
//! of the listed terms.
struct BoundReport {
  BoundKind kind{};
  double x = 0.0;
  BoundStatus status = BoundStatus::ok;
  std::string note;  // short reason when status != ok

  double scaled_tail = 0.0;   // zeta_n(x) or z_t(x)
  double discrepancy = 0.0;   // rho(x) or r_t(x), signed
  double limit_value = 0.0;   // H(x)

  std::optional<double> q;
  std::optional<double> s;
  std::optional<int> m;

  // The simple per-x inequalities of the deterministic-mixing corollaries
  // are only derivable for a nonnegative discrepancy; this flag marks the
  // regime so harnesses can report rather than assert in the other one.
  bool sign_condition_ok = true;

  std::vector<std::pair<std::string, double>> terms;
  std::optional<double> total;

  double term(std::string_view name) const;
};

const char* to_string(BoundKind k);
const char* to_string(BoundStatus s);
std::optional<BoundKind> bound_kind_from_string(std::string_view s);

// Coefficient ladder of the general series bound: 1/k! for k < M and
// (1 + M(1-q)) / ((M+1)! (1-q)) for k = M.
double series_coefficient(int k, int M, double q);

// Classical fixed-n bound. tail_at = 1 - F(a + b x). Defaults: q and s
// minimal feasible (the bound is increasing in both).
BoundReport thm5_bound(double tail_at, std::int64_t n, const LimitLaw& limit,
                       double x, std::optional<double> q = {},
                       std::optional<double> s = {});

// Binomial sample size, lambda = n p.
BoundReport thm6_bound(const ObservationLaw& law, std::int64_t n, double p,
                       double a, double b, const LimitLaw& limit, double x,
                       std::optional<double> q = {},
                       std::optional<double> s = {});

// Poisson sample size.
BoundReport thm7_bound(double lambda, double tail_at, const LimitLaw& limit,
                       double x, std::optional<double> s = {});

//! Shared inputs of the general Cox-process bounds (thm8 and corollaries).
struct CoxBoundInputs {
  const NormalizationPlan* plan = nullptr;
  double t = 0.0;
  const MixingLaw* mix = nullptr;
  // P(Lambda(t) < lambda d(t)) as a function of lambda. Leave empty when
  // Lambda(t) = Lambda d(t), where the leading-process term vanishes.
  std::function<double(double)> finite_t_cdf;
  // Evaluate the proof-display variant of the series coefficients (an extra
  // 1/k! on every term); the statement form is the default certificate.
  bool proof_form = false;
};

BoundReport thm8_bound(const CoxBoundInputs& in, double x, double q, int M);

// cor1 = thm8 with M = 1; cor2/cor3 are the deterministic-mixing forms;
// cor4/cor5 need a finite mean; cor6 is the moment-free bound. q applies to
// cor1/cor6 (default 0.5).
BoundReport cor_bound(BoundKind kind, const CoxBoundInputs& in, double x,
                      std::optional<double> q = {});

// Parameter selection for the kinds with free parameters (thm8, cor1, cor6):
// q by a coarse scan plus golden-section refinement on (1e-6, 1 - 1e-6),
// M by incrementing while the total improves by more than 1e-6 relative
// (M <= 30), s always minimal feasible. Best found, not claimed optimal.
BoundReport optimize_parameters(BoundKind kind, const CoxBoundInputs& in,
                                double x);

}  // namespace maxcox
