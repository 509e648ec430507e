// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/bump.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>

namespace bfr {

namespace {

Jet smooth_taylor(double t0, int order) {
  if (t0 <= 0.0) return Jet(order, 0.0);
  if (t0 >= 1.0) return Jet(order, 1.0);
  Jet t = Jet::variable(order, t0);
  Jet one(order, 1.0);
  Jet a = exp(-(one / t));
  Jet b = exp(-(one / (one - t)));
  return a / (a + b);
}

// scale coefficient k by s^k (composition with an affine map of slope s)
Jet rescale(Jet j, double s) {
  double f = 1;
  for (int k = 0; k <= j.order(); ++k) {
    j.coef(k) *= f;
    f *= s;
  }
  return j;
}

}  // namespace

double StepShape::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  if (r_ < 0) {
    double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
  }
  return boost::math::ibeta(r_ + 1.0, r_ + 1.0, t);
}

Jet StepShape::taylor(double t0, int order) const {
  if (r_ < 0) return smooth_taylor(t0, order);
  Jet out(order, (*this)(t0));
  if (order == 0 || t0 <= 0.0 || t0 >= 1.0) return out;
  // derivative is t^r (1-t)^r / B(r+1, r+1)
  Jet t = Jet::variable(order - 1, t0);
  Jet one(order - 1, 1.0);
  Jet dens = (pow(t, r_) * pow(one - t, r_)).scaled(1.0 / boost::math::beta(r_ + 1.0, r_ + 1.0));
  for (int k = 1; k <= order; ++k) out.coef(k) = dens.coef(k - 1) / k;
  return out;
}

PlateauBump::PlateauBump(Interval sup, Interval plat, StepShape s)
    : support(sup), plateau(plat), shape(s) {
  if (!(sup.lo < plat.lo && plat.lo <= plat.hi && plat.hi < sup.hi))
    throw ContractError("PlateauBump: plateau must lie strictly inside the support");
}

PlateauBump PlateauBump::dilated(Interval sup, double alpha, StepShape s) {
  if (!(alpha > 0 && alpha < 1)) throw ContractError("PlateauBump: alpha must be in (0,1)");
  return PlateauBump(sup, sup.dilate(alpha), s);
}

double PlateauBump::operator()(double x) const {
  if (x <= support.lo || x >= support.hi) return 0.0;
  double up = shape((x - support.lo) / (plateau.lo - support.lo));
  double down = shape((support.hi - x) / (support.hi - plateau.hi));
  return up * down;
}

Jet PlateauBump::taylor(double x, int order) const {
  if (x <= support.lo || x >= support.hi) return Jet(order, 0.0);
  const double sl = 1.0 / (plateau.lo - support.lo);
  const double sr = 1.0 / (support.hi - plateau.hi);
  Jet up = rescale(shape.taylor((x - support.lo) * sl, order), sl);
  Jet down = rescale(shape.taylor((support.hi - x) * sr, order), -sr);
  return up * down;
}

double PlateauBump::derivative(double x, int k) const { return taylor(x, k).derivative(k); }

double chi_tilde(const Interval& I, double x) {
  return 1.0 / (1.0 + std::abs(x - I.center()) / I.length());
}

double AdaptedBump::norm() const {
  return std::isinf(p) ? 1.0 : std::pow(I.length(), -1.0 / p);
}

PlateauBump AdaptedBump::base() const { return PlateauBump::dilated(I, plateau_fraction, shape); }

double AdaptedBump::operator()(double x) const { return norm() * base()(x); }

double AdaptedBump::derivative(double x, int k) const { return norm() * base().derivative(x, k); }

double AdaptedBump::adaptation_constant(const std::vector<double>& xs) const {
  const PlateauBump b = base();
  const double len = I.length(), nrm = norm();
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  double c = 0;
  for (double x : xs) {
    Jet j = b.taylor(x, M);
    double w = std::pow(chi_tilde(I, x), M);
    for (int k = 0; k <= M; ++k) {
      double bound = std::pow(len, -inv_p - k) * w;
      c = std::max(c, std::abs(nrm * j.derivative(k)) / bound);
    }
  }
  return c;
}

}  // namespace bfr
