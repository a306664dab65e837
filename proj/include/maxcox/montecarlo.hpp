#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "maxcox/exact_law.hpp"
#include "maxcox/rate_bounds.hpp"

namespace maxcox {

//! A simulation run: size law, marks, optional normalization, RNG layout.
//
// Sampling is deterministic given (seed, workers): worker w draws from its
// own stream seeded from (seed, w) and owns a contiguous block of sample
// indices, so the concatenated stream does not depend on scheduling.
struct SimConfig {
  RandomSizeLaw size;
  ObservationLaw obs;
  std::optional<NormalizationPlan> plan;  // normalize maxima when present
  double t = 1.0;                         // horizon for the plan
  std::size_t n_samples = 0;
  std::uint64_t seed = 1;
  std::vector<double> x_grid;  // strictly increasing
  double delta = 0.01;         // DKW confidence level
  int workers = 1;
};

double dkw_epsilon(std::size_t n, double delta);

// Raw maxima (-inf marks an empty sample). Each draw costs O(1) in N: the
// maximum of N iid marks is quantile(U^{1/N}), evaluated through the upper
// tail as -expm1(log(U)/N) to keep precision at large N.
std::vector<double> sample_max(const SimConfig& cfg, std::size_t count);

struct EmpiricalResult {
  std::vector<double> x_grid;
  std::vector<double> ecdf;  // fraction of samples strictly below x_i
  std::size_t n_samples = 0;
  std::size_t empty_samples = 0;
  double dkw_eps = 0.0;
};

// Streaming empirical CDF of the (normalized, when a plan is present)
// maxima over cfg.x_grid, parallel across cfg.workers.
EmpiricalResult empirical_cdf(const SimConfig& cfg);

// True when the ecdf stays inside the DKW band of the exact law at every
// grid point.
bool within_dkw(const EmpiricalResult& emp,
                const std::function<double(double)>& exact_cdf);

struct CertRow {
  double x = 0.0;
  double exact_error = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  double ecdf_dev = 0.0;
  double dkw_eps = 0.0;
  bool conditions_ok = true;
};

struct Certification {
  std::vector<CertRow> rows;
  bool pass = false;
  bool margins_ok = true;      // bound >= exact error wherever conditions hold
  bool ecdf_ok = true;         // within the DKW band (vacuous without samples)
  std::size_t checked_cells = 0;
  std::size_t reported_cells = 0;     // cells outside the bound's conditions
  std::size_t reported_violations = 0;  // of those, cells where bound < error
  double max_ecdf_dev = 0.0;
  double sup_error = 0.0;             // over all cells
  double sup_error_conditioned = 0.0; // over cells with conditions_ok
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
};

struct CertifyOptions {
  BoundKind kind = BoundKind::cor1;
  std::optional<double> q;
  std::optional<int> m;
  bool optimize = false;
  // Custom per-x bound; overrides kind when set.
  std::function<BoundReport(double)> bound_fn;
  // Mixing law of the limit; derived from the size law when absent.
  std::optional<MixingLaw> mix;
};

// Exact error vs bound per grid point plus the DKW check of the empirical
// CDF against the exact law. Cells where the bound's side conditions fail
// are recorded (and counted as violations when the claimed value is
// exceeded) but never decide the verdict.
Certification certify(const SimConfig& cfg, const CertifyOptions& opt);

// CSV columns: x,exact_error,bound,margin,ecdf_dev,dkw_eps,conditions_ok.
void write_certification_csv(const Certification& cert, std::ostream& out);

}  // namespace maxcox
