// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <vector>

#include "bfr/grid.hpp"

namespace bfr {

// Uncentered Hardy-Littlewood maximal function, exact over all runs of
// consecutive grid cells (non-periodic: the grid window is an interval of the
// line and f vanishes outside it). M_p f = (M_1 |f|^p)^{1/p}.
GridFunction maximal_fn(const GridFunction& f, double p = 1.0);

namespace kernels {
// out[x] = max over a <= x <= b of mean(v[a..b]); O(n^2)
void maximal_serial(const std::vector<double>& v, std::vector<double>& out);
void maximal_omp(const std::vector<double>& v, std::vector<double>& out);
}  // namespace kernels

}  // namespace bfr
