// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace bfr {

std::vector<Interval> merge_intervals(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& I : v) {
    if (!out.empty() && I.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, I.hi);
    else
      out.push_back(I);
  }
  return out;
}

double union_measure(const std::vector<Interval>& v) {
  double m = 0;
  for (const auto& I : merge_intervals(v)) m += I.length();
  return m;
}

bool union_contains(const std::vector<Interval>& v, double x) {
  for (const auto& I : v)
    if (I.lo <= x && x < I.hi) return true;
  return false;
}

std::vector<Interval> random_interval_union(Rng& rng, double length, double origin, int count,
                                            double max_len) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Interval> v;
  for (int i = 0; i < count; ++i) {
    double len = max_len * (0.1 + 0.9 * u(rng));
    double lo = origin + (length - len) * u(rng);
    v.push_back({lo, lo + len});
  }
  return merge_intervals(std::move(v));
}

GridFunction restricted_type(Rng& rng, std::size_t n, double length, double origin,
                             const std::vector<Interval>& E, double phase_cell) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  std::vector<cplx> s(n);
  const double h = length / static_cast<double>(n);
  if (phase_cell <= 0) {
    for (std::size_t k = 0; k < n; ++k) {
      double ph = u(rng);  // drawn for every sample so the stream is grid-aligned
      if (union_contains(E, origin + k * h)) s[k] = std::polar(1.0, ph);
    }
  } else {
    const std::size_t cells = static_cast<std::size_t>(std::ceil(length / phase_cell));
    std::vector<double> ph(cells);
    for (auto& p : ph) p = u(rng);
    for (std::size_t k = 0; k < n; ++k) {
      if (!union_contains(E, origin + k * h)) continue;
      auto c = std::min(cells - 1, static_cast<std::size_t>((k * h) / phase_cell));
      s[k] = std::polar(1.0, ph[c]);
    }
  }
  return GridFunction::from_samples(std::move(s), length, origin);
}

GridFunction StepFunction::sampled(std::size_t n) const {
  std::vector<cplx> s(n);
  const double h = length / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = origin + static_cast<double>(k) * h;
    for (std::size_t p = 0; p < pieces.size(); ++p)
      if (pieces[p].lo <= x && x < pieces[p].hi) s[k] += values[p];
  }
  return GridFunction::from_samples(std::move(s), length, origin);
}

GridFunction StepFunction::band_limited(std::size_t n) const {
  std::vector<cplx> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    const long f = GridFunction::freq_of(k, n);
    if (2 * std::abs(f) >= static_cast<long>(n)) continue;
    cplx acc = 0;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const Interval& I = pieces[p];
      if (f == 0) {
        acc += values[p] * I.length() / length;
      } else {
        const double w = 2.0 * kPi * static_cast<double>(f) / length;
        acc += values[p] * (std::polar(1.0, -w * (I.lo - origin)) - std::polar(1.0, -w * (I.hi - origin))) /
               cplx(0.0, 2.0 * kPi * static_cast<double>(f));
      }
    }
    c[k] = acc;
  }
  return GridFunction::from_spectrum(std::move(c), length, origin);
}

double StepFunction::support_measure() const {
  double m = 0;
  for (std::size_t p = 0; p < pieces.size(); ++p)
    if (values[p] != cplx(0)) m += pieces[p].length();
  return m;
}

StepFunction StepFunction::restricted(const std::vector<Interval>& U) const {
  StepFunction out{length, origin, {}, {}};
  const auto M = merge_intervals(U);
  for (std::size_t p = 0; p < pieces.size(); ++p)
    for (const auto& J : M) {
      const Interval c{std::max(pieces[p].lo, J.lo), std::min(pieces[p].hi, J.hi)};
      if (c.length() > 0) {
        out.pieces.push_back(c);
        out.values.push_back(values[p]);
      }
    }
  return out;
}

StepFunction restricted_step(Rng& rng, double length, double origin, const std::vector<Interval>& E,
                             double phase_cell) {
  if (!(phase_cell > 0)) throw ContractError("restricted_step: phase_cell must be positive");
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  const std::size_t cells = static_cast<std::size_t>(std::ceil(length / phase_cell));
  std::vector<double> ph(cells);
  for (auto& p : ph) p = u(rng);
  StepFunction f{length, origin, {}, {}};
  for (std::size_t c = 0; c < cells; ++c) {
    const Interval cell{origin + static_cast<double>(c) * phase_cell,
                        std::min(origin + length, origin + static_cast<double>(c + 1) * phase_cell)};
    for (const auto& I : merge_intervals(E)) {
      const Interval x{std::max(cell.lo, I.lo), std::min(cell.hi, I.hi)};
      if (x.length() > 0) {
        f.pieces.push_back(x);
        f.values.push_back(std::polar(1.0, ph[c]));
      }
    }
  }
  return f;
}

std::vector<Interval> complement(const std::vector<Interval>& U, const Interval& window) {
  std::vector<Interval> out;
  double at = window.lo;
  for (const auto& I : merge_intervals(U)) {
    if (I.hi <= at) continue;
    if (I.lo >= window.hi) break;
    if (I.lo > at) out.push_back({at, I.lo});
    at = std::max(at, I.hi);
  }
  if (at < window.hi) out.push_back({at, window.hi});
  return out;
}

GridFunction indicator(std::size_t n, double length, double origin, const std::vector<Interval>& E) {
  std::vector<cplx> s(n);
  const double h = length / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = union_contains(E, origin + k * h) ? 1.0 : 0.0;
  return GridFunction::from_samples(std::move(s), length, origin);
}

GridFunction band_window(Rng& rng, std::size_t n, long lo, long hi, double length, double origin) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> c(n);
  for (long f = lo; f <= hi; ++f) {
    double re = g(rng), im = g(rng);
    c[GridFunction::index_of(f, n)] = {re, im};
  }
  return GridFunction::from_spectrum(std::move(c), length, origin);
}

GridFunction band_limited(Rng& rng, std::size_t n, long band, double length, double origin) {
  return band_window(rng, n, -band, band, length, origin);
}

}  // namespace bfr
