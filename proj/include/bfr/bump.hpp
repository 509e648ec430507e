// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <vector>

#include "bfr/core.hpp"
#include "bfr/jet.hpp"

namespace bfr {

// Monotone transition 0 -> 1 on [0, 1]. r < 0 selects the C^inf step
// e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}); r >= 0 selects the C^r step given by
// the regularized incomplete beta function I_t(r+1, r+1).
class StepShape {
 public:
  StepShape() = default;
  static StepShape smooth() { return StepShape(-1); }
  static StepShape finite(int r) { return StepShape(r); }

  int smoothness() const { return r_; }  // -1 = infinite
  double operator()(double t) const;
  // Taylor coefficients in t at t0 up to the given order
  Jet taylor(double t0, int order) const;

 private:
  explicit StepShape(int r) : r_(r) {}
  int r_ = -1;
};

// Equals 1 on `plateau`, 0 outside `support`, monotone transitions between.
struct PlateauBump {
  Interval support;
  Interval plateau;
  StepShape shape;

  PlateauBump() = default;
  PlateauBump(Interval sup, Interval plat, StepShape s = StepShape::smooth());
  // support R with plateau alpha*R
  static PlateauBump dilated(Interval sup, double alpha, StepShape s = StepShape::smooth());

  double operator()(double x) const;
  double derivative(double x, int k) const;
  Jet taylor(double x, int order) const;
};

// (1 + |x - c(I)|/|I|)^{-1}
double chi_tilde(const Interval& I, double x);

// |I|^{-1/p} * plateau bump on I; L^p adapted to I of every order.
struct AdaptedBump {
  Interval I;
  double p = 2.0;  // normalization exponent; infinity allowed
  int M = 3;       // declared order
  double plateau_fraction = 0.5;
  StepShape shape = StepShape::smooth();

  double operator()(double x) const;
  double derivative(double x, int k) const;
  // max over k <= M and the sample points of |phi^(k)(x)| |I|^{1/p + k} / chi~^M(x)
  double adaptation_constant(const std::vector<double>& xs) const;

 private:
  double norm() const;
  PlateauBump base() const;
};

}  // namespace bfr
