// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/maximal.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bfr {
namespace kernels {
namespace {

std::vector<double> prefix(const std::vector<double>& v) {
  std::vector<double> s(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) s[i + 1] = s[i] + v[i];
  return s;
}

// For a fixed left end a: best[x] = max_{b >= x} mean(a..b), folded into out.
inline void sweep_from(std::size_t a, const std::vector<double>& s, std::vector<double>& out) {
  const std::size_t n = s.size() - 1;
  double run = 0.0;
  for (std::size_t b = n; b-- > a;) {
    double m = (s[b + 1] - s[a]) / static_cast<double>(b - a + 1);
    run = std::max(run, m);
    out[b] = std::max(out[b], run);
  }
}

}  // namespace

void maximal_serial(const std::vector<double>& v, std::vector<double>& out) {
  const auto s = prefix(v);
  out.assign(v.size(), 0.0);
  for (std::size_t a = 0; a < v.size(); ++a) sweep_from(a, s, out);
}

void maximal_omp(const std::vector<double>& v, std::vector<double>& out) {
  const auto s = prefix(v);
  const std::size_t n = v.size();
  out.assign(n, 0.0);
#pragma omp parallel
  {
    std::vector<double> local(n, 0.0);
#pragma omp for schedule(dynamic, 16) nowait
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(n); ++a)
      sweep_from(static_cast<std::size_t>(a), s, local);
#pragma omp critical
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(out[i], local[i]);
  }
}

}  // namespace kernels

GridFunction maximal_fn(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw ContractError("maximal_fn: p must be >= 1");
  std::vector<double> v(f.size()), m;
  for (std::size_t k = 0; k < f.size(); ++k) v[k] = std::pow(std::abs(f[k]), p);
  kernels::maximal_omp(v, m);
  std::vector<cplx> s(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) s[k] = std::pow(m[k], 1.0 / p);
  return GridFunction::from_samples(std::move(s), f.length(), f.origin());
}

}  // namespace bfr
