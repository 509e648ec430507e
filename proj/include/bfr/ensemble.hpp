// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <random>
#include <vector>

#include "bfr/grid.hpp"

namespace bfr {

using Rng = std::mt19937_64;

// sorted, merged copy
std::vector<Interval> merge_intervals(std::vector<Interval> v);
double union_measure(const std::vector<Interval>& v);
bool union_contains(const std::vector<Interval>& v, double x);

// `count` random intervals inside [origin, origin+L), each of length at most
// max_len (merged on return)
std::vector<Interval> random_interval_union(Rng& rng, double length, double origin, int count,
                                            double max_len);

// |f| = 1_E with a random unimodular phase that is constant on cells of
// length phase_cell (phase_cell <= 0: an independent phase per sample)
GridFunction restricted_type(Rng& rng, std::size_t n, double length, double origin,
                             const std::vector<Interval>& E, double phase_cell);

// f = sum_k values[k] 1_{pieces[k]}, pieces disjoint. Carries restricted-type
// inputs between grids: band_limited(n) has the exact Fourier coefficients of
// f on |freq| < n/2, so the low spectrum is the same at every resolution.
struct StepFunction {
  double length = 1.0, origin = 0.0;
  std::vector<Interval> pieces;
  std::vector<cplx> values;

  GridFunction sampled(std::size_t n) const;
  GridFunction band_limited(std::size_t n) const;
  double support_measure() const;
  // f 1_U
  StepFunction restricted(const std::vector<Interval>& U) const;
};
// |f| = 1_E, phase constant on cells of length phase_cell (> 0)
StepFunction restricted_step(Rng& rng, double length, double origin, const std::vector<Interval>& E,
                             double phase_cell);
// [window] minus the union U
std::vector<Interval> complement(const std::vector<Interval>& U, const Interval& window);

// real indicator of E sampled at grid points
GridFunction indicator(std::size_t n, double length, double origin, const std::vector<Interval>& E);

// complex Gaussian coefficients on |freq| <= band, zero elsewhere
GridFunction band_limited(Rng& rng, std::size_t n, long band, double length = 1.0,
                          double origin = 0.0);
// same, on the frequency window [lo, hi]
GridFunction band_window(Rng& rng, std::size_t n, long lo, long hi, double length = 1.0,
                         double origin = 0.0);

}  // namespace bfr
