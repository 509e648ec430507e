// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <utility>
#include <vector>

#include "bfr/grid.hpp"

// Dyadic projections indexed by growing bands of the physical frequency
// xi = n/L: Q_j keeps 2^{j-1} < |xi| <= 2^j, P_j keeps |xi| <= 2^j.
// The shrinking bands [2^{-k-1}, 2^{-k}] of the classical notation are
// Q_{-k}; with L = 2^K the grid resolves every band down to 2^{-K}.
namespace bfr::paraproduct {

GridFunction qk(const GridFunction& f, int j);
GridFunction pk(const GridFunction& f, int j);
GridFunction zero_mode(const GridFunction& f);

// smallest and largest j with a nonempty Q_j on the grid of f
std::pair<int, int> band_range(const GridFunction& f);

// PP(f, g) = sum_m Q_{2m}(f) P_m(g), over every m with Q_{2m} nonempty
GridFunction pp_apply(const GridFunction& f, const GridFunction& g);

// The telescoping chain for <PP(f,g), h> = integral of PP(f,g) h (no conjugate):
//   A = int sum_m Q_{2m}f g h
//   B = int sum_m Q_{2m}f (sum_{l>m} Q_l g) h
//   C = int sum_m Q_{2m}f (sum_{s>m+1} Q_s h) g
//   D = int sum_l Q_l g Q_l h     sum_{m<l-1} Q_{2m} f
//   E = int sum_l Q_l g Q_{l+1} h sum_{m<l}   Q_{2m} f
//   F = int sum_l Q_l g Q_{l-1} h sum_{m<l-2} Q_{2m} f
// with <PP(f,g),h> = A - B - C + D + E + F whenever f has no spectrum above
// |xi| = 1 (then every product Q_{2m}f P_m g lives inside P_{m+1}).
struct Telescoping {
  cplx lhs;         // <PP(f,g), h>
  cplx first_step;  // int sum_m Q_{2m}f P_m g P_{m+1} h
  cplx A, B, C, D, E, F;
  double scale = 0;             // ||f||_2 ||g||_inf ||h||_2
  double residual = 0;          // |lhs - (A - B - C + D + E + F)| / scale
  double first_step_residual = 0;
  // D and F with the ranges m < l and m < l - 1 (one index looser)
  cplx D_loose, F_loose;
  double residual_loose = 0;
  // B with h replaced by (Q_{l-1} + Q_l + Q_{l+1}) h inside the l-sum
  cplx B_diagonal;
  double diagonal_residual = 0;
  bool admissible = true;  // f has no spectrum above |xi| = 1
};
Telescoping telescoping_decompose(const GridFunction& f, const GridFunction& g,
                                  const GridFunction& h);

// (sum_j |Q_j psi|^2)^{1/2}; the zero mode is excluded
GridFunction square_function(const GridFunction& psi);

// sup_l |sum_{k>l} a_k Q_k psi|, l over the band range; a[k - j_lo]
GridFunction max_martingale(const std::vector<double>& a, const GridFunction& psi);

}  // namespace bfr::paraproduct
