// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <vector>

#include "bfr/grid.hpp"

namespace bfr {

struct XiParams {
  int decay_n = 4;               // spatial parameter N: decay (1+|x|)^{-N^2}
  double spectral_radius = 1.0;  // Fourier support of the unit-scale kernel
};

// Xi(x) = c [sinc^{2r}(x/k) + sinc^{2r}(sqrt2 x/k)], 2r = N^2 rounded up to
// even, k chosen so that supp Xi^ = [-rho, rho]. Positive, unit mass.
class XiKernel {
 public:
  explicit XiKernel(XiParams p = {});
  double value(double x) const;
  double hat(double xi) const;
  int power() const { return m_; }
  double spectral_radius() const { return params_.spectral_radius; }
  const XiParams& params() const { return params_; }

 private:
  XiParams params_;
  int m_;
  double kappa_;
  double c_;
};

// centered cardinal B-spline of order m (m-fold convolution of 1_[-1/2,1/2])
double bspline_centered(int m, double t);

struct SmoothedCutoff {
  std::vector<Interval> base;
  double scale = 1.0;  // kernel dilated to this length
  XiParams params;
  GridFunction values;  // real-valued samples
};

// chi_E * Xi_scale on the periodic grid; spectrum computed in closed form,
// so the result is exact up to rounding. Throws BandOverflow when the kernel
// spectrum does not fit in the grid band.
SmoothedCutoff smoothed_cutoff(const std::vector<Interval>& E, double scale, const XiParams& p,
                               std::size_t n, double length, double origin = 0.0);

// sampled indicator coefficients of a finite interval union (exact)
std::vector<cplx> indicator_spectrum(const std::vector<Interval>& E, std::size_t n, double length,
                                     double origin);

}  // namespace bfr
