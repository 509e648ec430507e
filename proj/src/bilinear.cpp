// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/bilinear.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

namespace bfr {

namespace {

struct ModeList {
  std::vector<long> freq;
  std::vector<cplx> coef;
};

ModeList modes_of(const GridFunction& f, long box) {
  const std::size_t n = f.size();
  double cmax = 0;
  for (auto c : f.spectrum()) cmax = std::max(cmax, std::abs(c));
  ModeList out;
  if (cmax == 0) return out;
  const double cut = 1e-15 * cmax;
  for (std::size_t k = 0; k < n; ++k) {
    const long fr = GridFunction::freq_of(k, n);
    if (box >= 0 && std::abs(fr) > box) continue;
    if (std::abs(f.spectrum()[k]) > cut) {
      out.freq.push_back(fr);
      out.coef.push_back(f.spectrum()[k]);
    }
  }
  // ascending frequency keeps the gather loop's inner range contiguous
  std::vector<std::size_t> order(out.freq.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out.freq[a] < out.freq[b]; });
  ModeList sorted;
  for (auto i : order) {
    sorted.freq.push_back(out.freq[i]);
    sorted.coef.push_back(out.coef[i]);
  }
  return sorted;
}

double sgn_tol(double x, double scale) {
  if (std::abs(x) <= 1e-12 * scale) return 0.0;
  return x > 0 ? 1.0 : -1.0;
}

void check_same_grid(const GridFunction& f, const GridFunction& g, const char* who) {
  if (!f.same_grid(g)) throw ContractError(std::string(who) + ": inputs on different grids");
}

}  // namespace

Symbol2D Symbol2D::one() { return closed("one", [](long, long) { return cplx(1); }, 1.0); }

Symbol2D Symbol2D::closed(std::string name, std::function<cplx(long, long)> m, double sup,
                          long box) {
  Symbol2D s;
  s.kind = Kind::Closed;
  s.name = std::move(name);
  s.eval = std::move(m);
  s.sup = sup;
  s.box = box;
  return s;
}

Symbol2D Symbol2D::indicator(std::string name, std::function<bool(long, long)> in, long box) {
  Symbol2D s;
  s.kind = Kind::Indicator;
  s.name = std::move(name);
  s.eval = [in = std::move(in)](long a, long b) { return in(a, b) ? cplx(1) : cplx(0); };
  s.sup = 1;
  s.box = box;
  return s;
}

Symbol2D Symbol2D::tabulate(const Symbol2D& m, long band) {
  if (band < 0) throw ContractError("Symbol2D::tabulate: negative band");
  const long w = 2 * band + 1;
  auto table = std::make_shared<std::vector<cplx>>(static_cast<std::size_t>(w * w));
  double sup = 0;
#pragma omp parallel for reduction(max : sup) schedule(static)
  for (long i = 0; i < w; ++i)
    for (long j = 0; j < w; ++j) {
      cplx v = m(i - band, j - band);
      (*table)[static_cast<std::size_t>(i * w + j)] = v;
      sup = std::max(sup, std::abs(v));
    }
  Symbol2D s;
  s.kind = Kind::Table;
  s.name = m.name + "/table";
  s.sup = sup;
  s.box = m.box >= 0 ? std::min(m.box, band) : band;
  s.eval = [table, band, w](long a, long b) {
    if (std::abs(a) > band || std::abs(b) > band) return cplx(0);
    return (*table)[static_cast<std::size_t>((a + band) * w + (b + band))];
  };
  return s;
}

GridFunction bilinear_apply(const Symbol2D& m, const GridFunction& f, const GridFunction& g,
                            BilinearInfo* info, Kernel kernel) {
  check_same_grid(f, g, "bilinear_apply");
  const std::size_t n = f.size();
  const long half = static_cast<long>(n / 2);
  const long lo = -half, hi = lo + static_cast<long>(n) - 1;
  const ModeList F = modes_of(f, m.box), G = modes_of(g, m.box);
  std::vector<cplx> out(n);
  double total = 0, wrapped = 0;
  std::size_t pairs = 0;

  if (!F.freq.empty() && !G.freq.empty()) {
    if (kernel == Kernel::Serial) {
      // reference: scatter every pair
      for (std::size_t i = 0; i < F.freq.size(); ++i)
        for (std::size_t j = 0; j < G.freq.size(); ++j) {
          const long a = F.freq[i], b = G.freq[j];
          const cplx v = F.coef[i] * G.coef[j] * m(a, b);
          const double av = std::abs(v);
          total += av;
          if (a + b < lo || a + b > hi) wrapped += av;
          out[GridFunction::index_of(a + b, n)] += v;
          ++pairs;
        }
    } else {
      // gather: one output frequency per iteration, g read from a dense window
      const long gmin = G.freq.front(), gmax = G.freq.back();
      std::vector<cplx> gd(static_cast<std::size_t>(gmax - gmin + 1));
      std::vector<char> gm(gd.size(), 0);
      for (std::size_t j = 0; j < G.freq.size(); ++j) {
        gd[static_cast<std::size_t>(G.freq[j] - gmin)] = G.coef[j];
        gm[static_cast<std::size_t>(G.freq[j] - gmin)] = 1;
      }
      const long smin = F.freq.front() + gmin, smax = F.freq.back() + gmax;
      std::vector<cplx> acc(static_cast<std::size_t>(smax - smin + 1));
      std::vector<double> mass(acc.size());
      std::size_t npairs = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : npairs)
      for (long s = smin; s <= smax; ++s) {
        // a ranges over F with s - a inside [gmin, gmax]
        auto first = std::lower_bound(F.freq.begin(), F.freq.end(), s - gmax);
        auto last = std::upper_bound(F.freq.begin(), F.freq.end(), s - gmin);
        cplx h = 0;
        double ms = 0;
        for (auto it = first; it != last; ++it) {
          const std::size_t i = static_cast<std::size_t>(it - F.freq.begin());
          const long a = *it, b = s - a;
          const std::size_t gi = static_cast<std::size_t>(b - gmin);
          if (!gm[gi]) continue;
          const cplx v = F.coef[i] * gd[gi] * m(a, b);
          h += v;
          ms += std::abs(v);
          ++npairs;
        }
        acc[static_cast<std::size_t>(s - smin)] = h;
        mass[static_cast<std::size_t>(s - smin)] = ms;
      }
      pairs = npairs;
      for (long s = smin; s <= smax; ++s) {
        const std::size_t k = static_cast<std::size_t>(s - smin);
        out[GridFunction::index_of(s, n)] += acc[k];
        total += mass[k];
        if (s < lo || s > hi) wrapped += mass[k];
      }
    }
  }
  if (info) {
    info->pairs = pairs;
    info->wrapped_mass = total > 0 ? wrapped / total : 0.0;
    info->aliased = info->wrapped_mass > 1e-12;
  }
  return GridFunction::from_spectrum(std::move(out), f.length(), f.origin());
}

Symbol2D hs_symbol(double s, double offset) {
  if (!(s > 0)) throw ContractError("hs_symbol: s must be positive");
  std::ostringstream name;
  name << "hs(" << s << ")";
  return Symbol2D::closed(
      name.str(),
      [s, offset](long a, long b) {
        const double x = s * static_cast<double>(a) - static_cast<double>(b) - offset;
        const double scale = std::max({1.0, std::abs(s * a), std::abs(double(b)), std::abs(offset)});
        return cplx(0, kPi * sgn_tol(x, scale));
      },
      kPi);
}

GridFunction hs_apply(double s, const GridFunction& f, const GridFunction& g, BilinearInfo* info) {
  return bilinear_apply(hs_symbol(s), f, g, info);
}

long LacLattice::band() const {
  if (!(scale > 0)) throw ContractError("LacLattice: scale must be positive");
  return static_cast<long>(std::floor(1.0 / scale + 1e-12));
}

Symbol2D lac_symbol(const geometry::LacPolygon& P, LacLattice lat) {
  const long band = lat.band();
  Symbol2D chi = Symbol2D::indicator(
      "lac", [P, lat](long a, long b) { return P.contains(lat.map(a, b)); }, band);
  // the polygon lies in the unit disc, so a table on the band is exact
  return Symbol2D::tabulate(chi, band);
}

GridFunction lac_apply(const geometry::LacPolygon& P, LacLattice lat, const GridFunction& f,
                       const GridFunction& g, BilinearInfo* info) {
  return bilinear_apply(lac_symbol(P, lat), f, g, info);
}

GridFunction lac_apply(const geometry::LacPolygon& P, const GridFunction& f, const GridFunction& g,
                       BilinearInfo* info) {
  return lac_apply(P, LacLattice::for_grid(f.size()), f, g, info);
}

Symbol2D partition_symbol(const geometry::PartitionOfUnity& pu, LacLattice lat, std::size_t first,
                          std::size_t last) {
  Symbol2D s = Symbol2D::closed(
      "psi",
      [&pu, lat, first, last](long a, long b) {
        double v = 0;
        for (const auto& t : pu.evaluate(lat.map(a, b)))
          if (t.index >= first && t.index < last) v += t.psi;
        return cplx(v);
      },
      1.0, lat.band());
  return Symbol2D::tabulate(s, lat.band());
}

DecompositionCheck decomposition_check(const geometry::PolygonCollection& C, LacLattice lat,
                                       const GridFunction& f, const GridFunction& g) {
  const geometry::PartitionOfUnity pu(C.rects, C.options.alpha);
  const long band = lat.band();
  const std::size_t w0 = 1, w1 = 1 + C.n_whitney, end = C.rects.size();
  const Symbol2D pieces[3] = {partition_symbol(pu, lat, 0, w0), partition_symbol(pu, lat, w0, w1),
                              partition_symbol(pu, lat, w1, end)};
  const Symbol2D chi = lac_symbol(C.polygon, lat);

  const long w = 2 * band + 1;
  std::vector<char> ok(static_cast<std::size_t>(w * w), 0);
  DecompositionCheck out;
  for (long a = -band; a <= band; ++a)
    for (long b = -band; b <= band; ++b) {
      const Point2 p = lat.map(a, b);
      const double gauge = C.polygon.gauge(p);
      ++out.lattice_points;
      // boundary points are ambiguous: chi = 1, every psi = 0
      const bool res = std::abs(gauge - 1) > 1e-12 && (gauge > 1 || C.resolved(p));
      if (!res) {
        ++out.unresolved;
        continue;
      }
      ok[static_cast<std::size_t>((a + band) * w + (b + band))] = 1;
      cplx sum = pieces[0](a, b) + pieces[1](a, b) + pieces[2](a, b);
      const double d = std::abs(chi(a, b) - sum);
      out.symbol_max_diff = std::max(out.symbol_max_diff, d);
      if (d > 1e-9) ++out.mismatched;
    }

  auto masked = [&](const Symbol2D& s) {
    return Symbol2D::closed(
        s.name + "/resolved",
        [&, s](long a, long b) {
          return ok[static_cast<std::size_t>((a + band) * w + (b + band))] ? s(a, b) : cplx(0);
        },
        s.sup, band);
  };
  const GridFunction lhs = bilinear_apply(masked(chi), f, g);
  GridFunction rhs = GridFunction::zeros(f.size(), f.length(), f.origin());
  for (const auto& p : pieces) rhs = rhs + bilinear_apply(masked(p), f, g);
  const double nl = lp_norm(lhs, 2);
  out.op_residual = nl > 0 ? lp_norm(lhs - rhs, 2) / nl : lp_norm(rhs, 2);
  return out;
}

cplx trilinear_form(const Symbol2D& m, const GridFunction& f, const GridFunction& g,
                    const GridFunction& h) {
  check_same_grid(f, g, "trilinear_form");
  check_same_grid(f, h, "trilinear_form");
  const ModeList F = modes_of(f, m.box), G = modes_of(g, m.box);
  const long n = static_cast<long>(f.size());
  const long lo = -n / 2, hi = lo + n - 1;
  cplx acc = 0;
#pragma omp parallel
  {
    cplx local = 0;
#pragma omp for schedule(static) nowait
    for (std::size_t i = 0; i < F.freq.size(); ++i)
      for (std::size_t j = 0; j < G.freq.size(); ++j) {
        const long c = -F.freq[i] - G.freq[j];
        if (c < lo || c > hi) continue;
        local += F.coef[i] * G.coef[j] * h.coeff(c) * m(F.freq[i], G.freq[j]);
      }
#pragma omp critical
    acc += local;
  }
  return acc * f.length();
}

cplx product_integral(const GridFunction& f, const GridFunction& g, const GridFunction& h) {
  return integral(f * g * h);
}

LineData LineData::make(int mu, Interval I1, Interval I2, long xi, long eta) {
  LineData ld;
  ld.mu = mu;
  ld.I[0] = I1;
  ld.I[1] = I2;
  ld.I[2] = neg_sum(I1, I2);
  ld.s = I2.length() / I1.length();
  ld.xi = xi;
  ld.eta = eta;
  ld.theta = -xi - eta;
  ld.validate();
  return ld;
}

bool LineData::meets_rectangle() const {
  // eta' = eta + s (xi' - xi) over xi' in I^1 is an interval; does it meet I^2?
  const double y0 = static_cast<double>(eta) + s * (I[0].lo - static_cast<double>(xi));
  const double y1 = static_cast<double>(eta) + s * (I[0].hi - static_cast<double>(xi));
  return Interval{std::min(y0, y1), std::max(y0, y1)}.meets(I[1]);
}

namespace {
long integer_step(double s, long t) {
  const double st = s * static_cast<double>(t);
  const double r = std::round(st);
  if (std::abs(st - r) > 1e-9) throw ContractError("LineData: s*t is not an integer");
  return static_cast<long>(r);
}
}  // namespace

LineData LineData::moved(long t) const {
  LineData o = *this;
  const long st = integer_step(s, t);
  o.xi += t;
  o.eta += st;
  o.theta = -o.xi - o.eta;
  return o;
}

LineData LineData::translated(long t) const {
  LineData o = moved(t);
  const double d[3] = {double(t), double(integer_step(s, t)), -double(t + integer_step(s, t))};
  for (int i = 0; i < 3; ++i) o.I[i] = {I[i].lo + d[i], I[i].hi + d[i]};
  return o;
}

void LineData::validate() const {
  if (!(I[0].length() > 0 && I[1].length() > 0))
    throw ContractError("LineData: intervals must have positive length");
  if (!(s > 0)) throw ContractError("LineData: slope must be positive");
  if (theta != -xi - eta) throw ContractError("LineData: theta != -xi - eta");
  const Interval e = neg_sum(I[0], I[1]);
  if (std::abs(e.lo - I[2].lo) > 1e-9 || std::abs(e.hi - I[2].hi) > 1e-9)
    throw ContractError("LineData: I^3 != -I^1 - I^2");
}

GridFunction localize(const GridFunction& f, const Interval& I) {
  const PlateauBump phi = PlateauBump::dilated(I, 0.5);
  return fourier_multiply(f, [&phi](double n) { return phi(n); });
}

cplx trilinear_lambda(const LineData& ld, const GridFunction& f1, const GridFunction& f2,
                      const GridFunction& f3) {
  ld.validate();
  const GridFunction a = modulate(localize(f1, ld.I[0]), ld.xi);
  const GridFunction b = modulate(localize(f2, ld.I[1]), ld.eta);
  const GridFunction c = modulate(localize(f3, ld.I[2]), ld.theta);
  return integral(hs_apply(ld.s, a, b) * c);
}

cplx trilinear_lambda_direct(const LineData& ld, const GridFunction& f1, const GridFunction& f2,
                             const GridFunction& f3) {
  ld.validate();
  return trilinear_form(hs_symbol(ld.s, ld.offset()), localize(f1, ld.I[0]),
                        localize(f2, ld.I[1]), localize(f3, ld.I[2]));
}

ScanStats norm_scan(const BilinearOp& op, const ScanOptions& opt) {
  const double inv = 1 / opt.p1 + 1 / opt.p2 + 1 / opt.p3;
  if (std::abs(inv - 1) > 1e-12) throw ContractError("norm_scan: 1/p1 + 1/p2 + 1/p3 must be 1");
  if (opt.trials < 0) throw ContractError("norm_scan: negative trial count");
  const double q = opt.p3 / (opt.p3 - 1);  // dual exponent of p3
  ScanStats st;
  st.options = opt;
  st.records.resize(static_cast<std::size_t>(opt.trials));
  std::vector<char> skip(st.records.size(), 0);

  // trials are independent; each owns its seed, so the order of completion is irrelevant
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < opt.trials; ++t) {
    const std::uint64_t seed = trial_seed(opt.seed, static_cast<std::uint64_t>(t));
    Rng rng(seed);
    GridFunction f, g;
    if (opt.ensemble == Ensemble::RestrictedType) {
      auto E1 = random_interval_union(rng, opt.length, 0, opt.intervals, opt.max_len * opt.length);
      auto E2 = random_interval_union(rng, opt.length, 0, opt.intervals, opt.max_len * opt.length);
      f = restricted_type(rng, opt.n, opt.length, 0, E1, opt.phase_cell * opt.length);
      g = restricted_type(rng, opt.n, opt.length, 0, E2, opt.phase_cell * opt.length);
    } else {
      f = band_limited(rng, opt.n, opt.band, opt.length);
      g = band_limited(rng, opt.n, opt.band, opt.length);
    }
    const double den = lp_norm(f, opt.p1) * lp_norm(g, opt.p2);
    auto& r = st.records[static_cast<std::size_t>(t)];
    r.seed = seed;
    if (!(den > 0)) {
      skip[static_cast<std::size_t>(t)] = 1;
      continue;
    }
    r.ratio = lp_norm(op(f, g), q) / den;
  }

  std::vector<double> ratios;
  std::vector<ScanRecord> kept;
  for (std::size_t t = 0; t < st.records.size(); ++t) {
    if (skip[t]) {
      ++st.skipped;
      continue;
    }
    kept.push_back(st.records[t]);
    ratios.push_back(st.records[t].ratio);
  }
  st.records = std::move(kept);
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    auto quant = [&](double p) {
      const double pos = p * static_cast<double>(ratios.size() - 1);
      const std::size_t i = static_cast<std::size_t>(pos);
      const double fr = pos - static_cast<double>(i);
      return i + 1 < ratios.size() ? ratios[i] * (1 - fr) + ratios[i + 1] * fr : ratios[i];
    };
    st.max = ratios.back();
    st.q50 = quant(0.5);
    st.q90 = quant(0.9);
  }
  return st;
}

void write_scan(std::ostream& os, const ScanStats& s) {
  os << "seed,p1,p2,p3,N,ratio\n";
  for (const auto& r : s.records)
    os << r.seed << ',' << s.options.p1 << ',' << s.options.p2 << ',' << s.options.p3 << ','
       << s.options.n << ',' << r.ratio << '\n';
}

}  // namespace bfr
