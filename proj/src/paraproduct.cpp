// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/paraproduct.hpp"

#include <algorithm>
#include <cmath>

namespace bfr::paraproduct {

namespace {

bool in_band(long n, double L, int j) {
  double a = std::abs(double(n)) / L;
  return a > std::ldexp(1.0, j - 1) && a <= std::ldexp(1.0, j);
}

using Samples = std::vector<cplx>;

// band pieces of f as sample arrays, index j - j_lo, plus the zero mode
struct Bands {
  int lo = 0, hi = -1;
  std::vector<Samples> q;
  Samples zero;
  const Samples& at(int j) const { return q[j - lo]; }
  bool has(int j) const { return j >= lo && j <= hi; }
};

Bands split(const GridFunction& f) {
  auto [lo, hi] = band_range(f);
  Bands b;
  b.lo = lo, b.hi = hi;
  for (int j = lo; j <= hi; ++j) b.q.push_back(qk(f, j).samples());
  b.zero = zero_mode(f).samples();
  return b;
}

void axpy(Samples& y, const Samples& x, cplx a = 1.0) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

cplx integrate3(const Samples& a, const Samples& b, const Samples& c, double dx) {
  cplx s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k] * c[k];
  return s * dx;
}

}  // namespace

std::pair<int, int> band_range(const GridFunction& f) {
  // nonzero integer frequencies 1..N/2 span |xi| in [1/L, N/(2L)]
  double L = f.length();
  int lo = int(std::ceil(std::log2(1.0 / L) - 1e-12));
  int hi = int(std::ceil(std::log2(double(f.nyquist()) / L) - 1e-12));
  while (!in_band(1, L, lo) && lo < hi) ++lo;
  return {lo, hi};
}

GridFunction qk(const GridFunction& f, int j) {
  double L = f.length();
  return fourier_multiply(f, [&](double n) { return in_band(long(n), L, j) ? 1.0 : 0.0; });
}

GridFunction pk(const GridFunction& f, int j) {
  double L = f.length(), t = std::ldexp(1.0, j);
  return fourier_multiply(f, [&](double n) { return std::abs(n) / L <= t ? 1.0 : 0.0; });
}

GridFunction zero_mode(const GridFunction& f) {
  return fourier_multiply(f, [](double n) { return n == 0 ? 1.0 : 0.0; });
}

GridFunction pp_apply(const GridFunction& f, const GridFunction& g) {
  if (!f.same_grid(g)) throw ContractError("pp_apply: grids differ");
  Bands F = split(f), G = split(g);
  Samples out(f.size(), 0.0), low = G.zero;
  for (int m = std::min(F.lo, 0); m <= G.hi; ++m) {
    if (G.has(m)) axpy(low, G.at(m));  // low = P_m g
    if (!F.has(2 * m)) continue;
    const Samples& q = F.at(2 * m);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += q[k] * low[k];
  }
  return GridFunction::from_samples(std::move(out), f.length(), f.origin());
}

Telescoping telescoping_decompose(const GridFunction& f, const GridFunction& g,
                                  const GridFunction& h) {
  if (!f.same_grid(g) || !f.same_grid(h)) throw ContractError("telescoping: grids differ");
  const std::size_t N = f.size();
  const double dx = f.step();
  Bands Fb = split(f), Gb = split(g), Hb = split(h);
  const int lo = Fb.lo, hi = Fb.hi;
  Samples zeros(N, 0.0);
  auto Fq2 = [&](int m) -> const Samples& { return Fb.has(2 * m) ? Fb.at(2 * m) : zeros; };
  auto Gq = [&](int j) -> const Samples& { return Gb.has(j) ? Gb.at(j) : zeros; };
  auto Hq = [&](int j) -> const Samples& { return Hb.has(j) ? Hb.at(j) : zeros; };
  // m with Q_{2m} possibly nonempty
  const int m_lo = (lo - 1) / 2 - 1, m_hi = hi / 2 + 1;

  Telescoping t;
  t.admissible = lp_norm(f - pk(f, 0), 2) <= 1e-13 * std::max(lp_norm(f, 2), 1e-300);
  t.scale = lp_norm(f, 2) * lp_norm(g, INFINITY) * lp_norm(h, 2);
  t.lhs = integrate3(pp_apply(f, g).samples(), h.samples(), std::vector<cplx>(N, 1.0), dx);

  const Samples& gs = g.samples();
  const Samples& hs = h.samples();
  // P_m g, P_{m+1} h, high parts g - P_m g, h - P_{m+1} h, all incremental in m
  Samples Pg = Gb.zero, Ph = Hb.zero;
  for (int j = lo; j <= m_lo; ++j) axpy(Pg, Gq(j));
  for (int j = lo; j <= m_lo + 1; ++j) axpy(Ph, Hq(j));
  Samples sumF(N, 0.0);
  t.first_step = t.A = t.B = t.C = 0;
  for (int m = m_lo; m <= m_hi; ++m) {
    if (m > m_lo) axpy(Pg, Gq(m)), axpy(Ph, Hq(m + 1));
    const Samples& q = Fq2(m);
    axpy(sumF, q);
    Samples highg = gs, highh = hs;
    axpy(highg, Pg, -1.0);
    axpy(highh, Ph, -1.0);
    t.first_step += integrate3(q, Pg, Ph, dx);
    t.B += integrate3(q, highg, hs, dx);
    t.C += integrate3(q, highh, gs, dx);
  }
  t.A = integrate3(sumF, gs, hs, dx);

  // prefix sums S_below[c] = sum_{m < c} Q_{2m} f
  auto below = [&](int c) {
    Samples s(N, 0.0);
    for (int m = m_lo; m < c; ++m) axpy(s, Fq2(m));
    return s;
  };
  t.D = t.E = t.F = t.D_loose = t.F_loose = t.B_diagonal = 0;
  for (int l = lo; l <= hi; ++l) {
    const Samples& ql = Gq(l);
    Samples b0 = below(l), b1 = below(l - 1), b2 = below(l - 2);
    t.D += integrate3(ql, Hq(l), b1, dx);
    t.E += integrate3(ql, Hq(l + 1), b0, dx);
    t.F += integrate3(ql, Hq(l - 1), b2, dx);
    t.D_loose += integrate3(ql, Hq(l), b0, dx);
    t.F_loose += integrate3(ql, Hq(l - 1), b1, dx);
    Samples near = Hq(l - 1);
    axpy(near, Hq(l));
    axpy(near, Hq(l + 1));
    t.B_diagonal += integrate3(ql, near, b0, dx);
  }
  double sc = t.scale > 0 ? t.scale : 1.0;
  t.residual = std::abs(t.lhs - (t.A - t.B - t.C + t.D + t.E + t.F)) / sc;
  t.first_step_residual = std::abs(t.lhs - t.first_step) / sc;
  t.residual_loose = std::abs(t.lhs - (t.A - t.B - t.C + t.D_loose + t.E + t.F_loose)) / sc;
  t.diagonal_residual = std::abs(t.B - t.B_diagonal) / sc;
  return t;
}

GridFunction square_function(const GridFunction& psi) {
  auto [lo, hi] = band_range(psi);
  std::vector<double> acc(psi.size(), 0.0);
  for (int j = lo; j <= hi; ++j) {
    auto q = qk(psi, j);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += std::norm(q[k]);
  }
  std::vector<cplx> out(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) out[k] = std::sqrt(acc[k]);
  return GridFunction::from_samples(std::move(out), psi.length(), psi.origin());
}

GridFunction max_martingale(const std::vector<double>& a, const GridFunction& psi) {
  auto [lo, hi] = band_range(psi);
  if (a.size() < std::size_t(hi - lo + 1)) throw ContractError("max_martingale: coefficient per band required");
  std::vector<cplx> tail(psi.size(), 0.0);
  std::vector<double> best(psi.size(), 0.0);
  // tails sum_{k>l} for l = hi, hi-1, ..., lo-1
  for (int k = hi; k >= lo; --k) {
    auto q = qk(psi, k);
    for (std::size_t i = 0; i < tail.size(); ++i) {
      tail[i] += a[k - lo] * q[i];
      best[i] = std::max(best[i], std::abs(tail[i]));
    }
  }
  std::vector<cplx> out(best.begin(), best.end());
  return GridFunction::from_samples(std::move(out), psi.length(), psi.origin());
}

}  // namespace bfr::paraproduct
