// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

// Slow, independent reference computations. Used by the tests and by the
// hs-oracle experiment; never by the library itself.

#include <functional>
#include <vector>

#include "bfr/core.hpp"
#include "bfr/grid.hpp"

namespace bfr::oracle {

// c_n = (1/N) sum_k f_k e^{-2 pi i n k / N}, FFT order
std::vector<cplx> naive_dft(const std::vector<cplx>& f);

// max over all runs a..b containing x of the mean, by direct summation: O(n^3)
std::vector<double> maximal_bruteforce(const std::vector<double>& v);

// Evaluate a grid function's trigonometric interpolant at an arbitrary x.
cplx eval_trig(const GridFunction& f, double x);

// Principal value of int f(x + s t) g(x - t) dt / t, written as
// int_0^inf [f(x+st)g(x-t) - f(x-st)g(x+t)] e^{-(t/R)^2} dt / t and
// integrated with the trapezoid rule on [0, T] with step dt.
struct PvQuadrature {
  double taper_radius = 0.0;  // R; <= 0 picks 2 * period
  double step = 0.0;          // <= 0 picks period / (8 * band)
  double t_max = 0.0;         // <= 0 picks 7 R
};
GridFunction hs_quadrature(double s, const GridFunction& f, const GridFunction& g,
                           PvQuadrature q = {});

// h^(t) = sum over n1 + n2 = t of f^(n1) g^(n2) m(n1, n2), by direct
// enumeration of nonzero mode pairs.
GridFunction bilinear_direct(const std::function<cplx(long, long)>& m, const GridFunction& f,
                             const GridFunction& g, double tol = 0.0);

}  // namespace bfr::oracle
