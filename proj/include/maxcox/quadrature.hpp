#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace maxcox {
namespace quad {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
// Positive abscissae; nodes with even index belong to the embedded Gauss rule.
inline constexpr double kGk15Nodes[8] = {
    0.0000000000000000000000000, 0.2077849550078984676006894,
    0.4058451513773971669066064, 0.5860872354676911302941448,
    0.7415311855993944398638648, 0.8648644233597690727897128,
    0.9491079123427585245261897, 0.9914553711208126392068547};

inline constexpr double kKronrodW[8] = {
    0.2094821410847278280129992, 0.2044329400752988924141620,
    0.1903505780647854099132564, 0.1690047266392679028265834,
    0.1406532597155259187451896, 0.1047900103222501838398763,
    0.0630920926299785532907007, 0.0229353220105292249637320};

inline constexpr double kGaussW[4] = {
    0.4179591836734693877551020, 0.3818300505051189449503698,
    0.2797053914892766679014678, 0.1294849661688696932706114};

struct Interval {
  double lo, hi;
  double value;  // Kronrod estimate
  double error;  // |Kronrod - Gauss|
  bool operator<(const Interval& o) const { return error < o.error; }
};

template <class F>
Interval gk15(const F& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f0 = f(mid);
  double kron = kKronrodW[0] * f0;
  double gauss = kGaussW[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kGk15Nodes[i];
    const double fs = f(mid - dx) + f(mid + dx);
    kron += kKronrodW[i] * fs;
    if (i % 2 == 0) gauss += kGaussW[i / 2] * fs;
  }
  kron *= half;
  gauss *= half;
  return {lo, hi, kron, std::abs(kron - gauss)};
}

// Globally adaptive integration of f over [lo, hi]: the interval with the
// largest error estimate is bisected until the accumulated error estimate
// drops below max(abs_tol, rel_tol * |integral|) or the subdivision budget
// is exhausted. initial_intervals > 1 seeds the heap with a uniform split,
// which keeps narrow features from hiding between the nodes of a single
// opening rule.
template <class F>
double integrate(const F& f, double lo, double hi, double rel_tol = 1e-10,
                 double abs_tol = 0.0, std::size_t max_intervals = 4000,
                 std::size_t initial_intervals = 1) {
  if (!(lo < hi)) return 0.0;
  std::priority_queue<Interval> heap;
  double total = 0.0;
  double err = 0.0;
  const std::size_t k0 = std::max<std::size_t>(initial_intervals, 1);
  for (std::size_t i = 0; i < k0; ++i) {
    const double a = lo + (hi - lo) * static_cast<double>(i) / k0;
    const double b = lo + (hi - lo) * static_cast<double>(i + 1) / k0;
    Interval seg = gk15(f, a, b);
    total += seg.value;
    err += seg.error;
    heap.push(seg);
  }
  std::size_t n = k0;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         n < max_intervals) {
    Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) continue;  // interval exhausted
    Interval left = gk15(f, worst.lo, mid);
    Interval right = gk15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  return total;
}

}  // namespace quad
}  // namespace maxcox
