// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/sizes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "bfr/ensemble.hpp"
#include "bfr/maximal.hpp"

namespace bfr::sizes {

namespace {

// tanh^(k) = P_k(tanh), P_0 = T, P_{k+1} = P_k' (1 - T^2)
std::vector<std::vector<double>> tanh_polys(int order) {
  std::vector<std::vector<double>> P{{0.0, 1.0}};
  for (int k = 0; k < order; ++k) {
    const auto& p = P.back();
    std::vector<double> d(p.size() + 1, 0.0);  // derivative times (1 - T^2)
    for (std::size_t e = 1; e < p.size(); ++e) {
      const double c = p[e] * static_cast<double>(e);
      d[e - 1] += c;
      d[e + 1] -= c;
    }
    while (d.size() > 1 && d.back() == 0.0) d.pop_back();
    P.push_back(std::move(d));
  }
  return P;
}

double horner(const std::vector<double>& p, double x) {
  double r = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

const std::vector<std::vector<double>>& tanh_table() {
  static const auto t = tanh_polys(16);
  return t;
}

double tanh_derivative(int k, double v) { return horner(tanh_table()[static_cast<std::size_t>(k)], std::tanh(v)); }

double shift_of(int k) {
  if (k == 0) return 0.0;
  // -1/2, +1/2, -1/4, +1/4, -3/4, +3/4, ...
  const int pair = (k - 1) / 2;
  static const double mags[] = {0.5, 0.25, 0.75, 0.125, 0.375};
  const double m = mags[pair % 5];
  return (k % 2) ? -m : m;
}

}  // namespace

CanonicalFamily::CanonicalFamily(FamilyParams p) : params_(p) {
  if (p.members < 1) throw ContractError("CanonicalFamily: at least one member");
  if (p.members > 11) throw ContractError("CanonicalFamily: at most 11 members");
  if (!(p.plateau > 0 && p.plateau < 1)) throw ContractError("CanonicalFamily: plateau in (0,1)");
  order_ = std::max(0, p.order);
  if (p.smoothness >= 0) order_ = std::min(order_, p.smoothness);
  if (order_ > 15) throw ContractError("CanonicalFamily: order above 15");
  const StepShape shape = p.smoothness < 0 ? StepShape::smooth() : StepShape::finite(p.smoothness);

  // sup |tanh^(k)| on a dense sample
  std::vector<double> T(static_cast<std::size_t>(order_) + 1, 0.0);
  for (int k = 0; k <= order_; ++k)
    for (int s = 0; s <= 20000; ++s)
      T[static_cast<std::size_t>(k)] =
          std::max(T[static_cast<std::size_t>(k)], std::abs(tanh_derivative(k, -10.0 + s * 1e-3)));

  for (int m = 0; m < p.members; ++m) {
    const double sh = shift_of(m);
    if (p.half_width + std::abs(sh) > 5.0)
      throw ContractError("CanonicalFamily: member support leaves 10 omega");
    Interval sup{-p.half_width + sh, p.half_width + sh};
    PlateauBump b(sup, sup.dilate(p.plateau), shape);
    std::vector<double> B(static_cast<std::size_t>(order_) + 1, 0.0);
    for (int k = 0; k <= order_; ++k)
      for (int s = 0; s <= 20000; ++s) {
        const double u = sup.lo + sup.length() * s / 20000.0;
        B[static_cast<std::size_t>(k)] = std::max(B[static_cast<std::size_t>(k)], std::abs(b.derivative(u, k)));
      }
    double worst = 1.0;
    for (int k = 1; k <= order_; ++k) {
      double bound = 0;
      for (int l = 0; l <= k; ++l)
        bound += binom(k, l) * B[static_cast<std::size_t>(l)] * T[static_cast<std::size_t>(k - l)];
      worst = std::max(worst, 1.02 * bound);  // sampled sups, 2% margin
    }
    bumps_.push_back(b);
    kappa_.push_back(1.0 / worst);
  }
}

double CanonicalFamily::eval(std::size_t k, const Interval& w, double xi, double z) const {
  const double len = w.length();
  const double u = (z - w.center()) / len;
  const double b = bumps_[k](u);
  if (b == 0.0) return 0.0;
  return kappa_[k] * b * std::tanh((z - xi) / len);
}

double CanonicalFamily::derivative(std::size_t k, int order, const Interval& w, double xi,
                                   double z) const {
  if (order == 0) return eval(k, w, xi, z);
  const double len = w.length();
  const double u = (z - w.center()) / len, v = (z - xi) / len;
  double acc = 0;
  for (int l = 0; l <= order; ++l) {
    const double bl = bumps_[k].derivative(u, l);
    if (bl != 0.0) acc += binom(order, l) * bl * tanh_derivative(order - l, v);
  }
  return kappa_[k] * acc / std::pow(len, order);
}

double CanonicalFamily::check(const Interval& w, double xi, int samples) const {
  const double len = w.length(), c = w.center();
  double worst = 0;
  for (std::size_t k = 0; k < size(); ++k)
    for (int s = 0; s < samples; ++s) {
      const double z = c - 10 * len + 20 * len * s / (samples - 1);
      const double m = eval(k, w, xi, z);
      worst = std::max(worst, std::abs(m) - std::abs(z - xi) / len);
      if (std::abs(z - c) >= 5 * len) worst = std::max(worst, std::abs(m));
      for (int d = 1; d <= order_; ++d)
        worst = std::max(worst, std::abs(derivative(k, d, w, xi, z)) * std::pow(len, d) - 1.0);
    }
  return std::max(worst, 0.0);
}

double chi_tilde_periodic(const Interval& I, double x, double length) {
  double d = std::fmod(std::abs(x - I.center()), length);
  d = std::min(d, length - d);
  return 1.0 / (1.0 + d / I.length());
}

SizeContext::SizeContext(GridFunction f, CanonicalFamily fam) : f_(std::move(f)), fam_(std::move(fam)) {}

const std::vector<std::vector<double>>& SizeContext::filtered(const Interval& w, double xi) {
  const Key key{w.lo, w.hi, xi};
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = filtered_.find(key);
    if (it != filtered_.end()) return *it->second;
  }
  auto out = std::make_shared<std::vector<std::vector<double>>>();
  const double L = f_.length();
  for (std::size_t k = 0; k < fam_.size(); ++k) {
    auto g = fourier_multiply(f_, [&](double n) { return fam_.eval(k, w, xi, n / L); });
    std::vector<double> a(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) a[x] = std::norm(g[x]);
    out->push_back(std::move(a));
  }
  std::lock_guard<std::mutex> lock(mutex_);
  return *filtered_.emplace(key, std::move(out)).first->second;
}

double SizeContext::seminorm(const Interval& I, const Interval& w, double xi) {
  const auto key = std::make_tuple(I.lo, I.hi, w.lo, w.hi, xi);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = seminorms_.find(key);
    if (it != seminorms_.end()) return it->second;
  }
  const auto& a = filtered(w, xi);
  const std::size_t n = f_.size();
  std::vector<double> wt(n);
  for (std::size_t x = 0; x < n; ++x) wt[x] = std::pow(chi_tilde_periodic(I, f_.x(x), f_.length()), 20);
  double best = 0;
  for (const auto& v : a) {
    double s = 0;
    for (std::size_t x = 0; x < n; ++x) s += wt[x] * v[x];
    best = std::max(best, std::sqrt(s * f_.step()));
  }
  std::lock_guard<std::mutex> lock(mutex_);
  seminorms_[key] = best;
  return best;
}

double tile_seminorm(SizeContext& ctx, const Interval& I, const Interval& w, double xi) {
  return ctx.seminorm(I, w, xi);
}

TreeSize tree_size(SizeContext& ctx, const tf::TileSet& P, const tf::Tree& T, int i) {
  if (i < 0 || i > 2) throw ContractError("tree_size: i must be 0, 1 or 2");
  const double xi = T.xi(i, P.s);
  double acc = 0;
  for (auto k : T.members) {
    const auto& p = P.tiles[k];
    const double v = ctx.seminorm(p.I, P.boxes[p.box].omega[static_cast<std::size_t>(i)], xi);
    acc += v * v;
  }
  TreeSize r;
  r.sum_term = std::sqrt(acc / T.I.length());
  r.top_term = ctx.seminorm(T.I, T.omega(i, P.s), xi) / std::sqrt(T.I.length());
  return r;
}

SizeReport max_size(SizeContext& ctx, const tf::TileSet& P, const std::vector<std::uint32_t>& members,
                    int i) {
  std::vector<char> alive(P.tiles.size(), 0);
  for (auto k : members) alive[k] = 1;
  auto tops = tf::candidate_tops(P, alive);
  tops.erase(std::unique(tops.begin(), tops.end(),
                         [](const tf::TopData& a, const tf::TopData& b) { return a.t == b.t && a.I == b.I; }),
             tops.end());
  std::vector<tf::Tree> trees;
  for (const auto& c : tops)
    if (auto T = tf::maximal_tree(P, alive, c.t, c.I)) trees.push_back(std::move(*T));
  std::vector<TreeSize> sizes(trees.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < trees.size(); ++k) sizes[k] = tree_size(ctx, P, trees[k], i);

  SizeReport r;
  r.i = i;
  r.tops = trees.size();
  r.family = ctx.family().size();
  r.n = ctx.f().size();
  for (std::size_t k = 0; k < trees.size(); ++k)
    if (sizes[k].value() > r.value) {
      r.value = sizes[k].value();
      r.achieved = sizes[k];
      r.t = trees[k].t;
      r.I = trees[k].I;
    }
  return r;
}

void write_size_report(std::ostream& os, const std::string& id, const SizeReport& r) {
  os << "collection,i,size,sum_term,top_term,t,I_lo,I_hi,family,N\n";
  os << id << ',' << r.i + 1 << ',' << r.value << ',' << r.achieved.sum_term << ','
     << r.achieved.top_term << ',' << r.t << ',' << r.I.lo << ',' << r.I.hi << ',' << r.family << ','
     << r.n << '\n';
}

std::vector<Interval> exceptional_set(const std::vector<Interval>& E, std::size_t n, double length,
                                      double origin, double lambda) {
  const double measure = union_measure(E);
  if (!(measure > 0)) throw ContractError("exceptional_set: |E| must be positive");
  auto M = maximal_fn(indicator(n, length, origin, E));
  std::vector<Interval> out;
  const double h = length / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k)
    if (M[k].real() > lambda * measure) out.push_back({origin + k * h, origin + (k + 1) * h});
  return merge_intervals(std::move(out));
}

namespace {
bool inside_union(const std::vector<Interval>& U, const Interval& J) {
  auto it = std::upper_bound(U.begin(), U.end(), J.lo, [](double x, const Interval& I) { return x < I.lo; });
  return it != U.begin() && std::prev(it)->contains(J);
}
}  // namespace

ExceptionalLayers exceptional_layers(const tf::TileSet& P, const std::vector<std::uint32_t>& members,
                                     const std::vector<Interval>& omega) {
  ExceptionalLayers out;
  out.omega = merge_intervals(omega);
  out.layer.assign(P.tiles.size(), -1);
  for (auto k : members) {
    const Interval& I = P.tiles[k].I;
    int l = 0;
    if (inside_union(out.omega, I)) {
      l = 1;
      while (inside_union(out.omega, I.dilate(std::pow(4.0, l)))) ++l;
    }
    out.layer[k] = l;
    if (static_cast<std::size_t>(l) >= out.members.size()) out.members.resize(static_cast<std::size_t>(l) + 1);
    out.members[static_cast<std::size_t>(l)].push_back(k);
  }
  return out;
}

FilterResult frequency_filter(const tf::TileSet& P, const std::vector<std::uint32_t>& members,
                              const std::array<Interval, 3>& J, double C) {
  FilterResult r;
  for (auto k : members) {
    const auto& box = P.boxes[P.tiles[k].box];
    bool disjoint = false, oversized = false;
    for (std::size_t i = 0; i < 3; ++i) {
      disjoint = disjoint || !box.omega[i].meets(J[i]);
      oversized = oversized || box.omega[i].length() > C * J[i].length();
    }
    if (disjoint)
      ++r.disjoint;
    else if (oversized)
      ++r.oversized;
    else
      r.kept.push_back(k);
  }
  return r;
}

std::array<Interval, 3> shifted_intervals(const LineData& ld) {
  const double b[3] = {static_cast<double>(ld.xi), static_cast<double>(ld.eta), static_cast<double>(ld.theta)};
  std::array<Interval, 3> J;
  for (std::size_t i = 0; i < 3; ++i) J[i] = {ld.I[i].lo - b[i], ld.I[i].hi - b[i]};
  return J;
}

GridFunction model_projection(const GridFunction& f, const Interval& w, const ModelOptions& o) {
  const PlateauBump b = PlateauBump::dilated(w, o.plateau, o.shape);
  const double L = f.length();
  return fourier_multiply(f, [&](double n) { return b(n / L); });
}

double composition_residual(const GridFunction& f, const Interval& I, long xi, const Interval& w) {
  const ModelOptions o;
  const PlateauBump phi = PlateauBump::dilated(I, 0.5);
  const GridFunction lhs = model_projection(modulate(localize(f, I), xi), w, o);
  const GridFunction mf = modulate(f, xi, INFINITY);
  const double x = static_cast<double>(xi);
  const GridFunction rhs =
      model_projection(fourier_multiply(mf, [&](double n) { return phi(n + x); }), w, o);
  const double scale = std::max(lp_norm(lhs, 2), lp_norm(f, 2));
  return scale > 0 ? lp_norm(lhs - rhs, 2) / scale : 0.0;
}

std::vector<cplx> model_terms(const tf::TileSet& P, const std::vector<std::uint32_t>& members,
                              const std::array<GridFunction, 3>& g, const ModelOptions& o) {
  std::vector<cplx> out(members.size());
  if (members.empty()) return out;
  const std::size_t n = g[0].size();
  const double L = g[0].length(), origin = g[0].origin();
  for (const auto& x : g)
    if (!x.same_grid(g[0])) throw ContractError("model_terms: inputs on different grids");

  // members grouped by box
  std::map<std::uint32_t, std::vector<std::size_t>> by_box;
  for (std::size_t m = 0; m < members.size(); ++m) by_box[P.tiles[members[m]].box].push_back(m);
  std::vector<std::uint32_t> boxes;
  for (const auto& [b, v] : by_box) boxes.push_back(b);

  // pi_w g^i, shared by equal intervals
  std::map<std::tuple<int, double, double>, std::size_t> slot;
  std::vector<std::pair<int, Interval>> jobs;
  for (auto b : boxes)
    for (int i = 0; i < 3; ++i) {
      const Interval& w = P.boxes[b].omega[static_cast<std::size_t>(i)];
      if (slot.emplace(std::make_tuple(i, w.lo, w.hi), jobs.size()).second) jobs.push_back({i, w});
    }
  std::vector<GridFunction> proj(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < jobs.size(); ++k)
    proj[k] = model_projection(g[static_cast<std::size_t>(jobs[k].first)], jobs[k].second, o);

  const XiKernel xi(o.xi);
  const long nyq = static_cast<long>(n / 2);
  // checked up front: nothing may throw inside the parallel region
  for (auto k : members)
    if (std::floor(o.xi.spectral_radius * L / P.tiles[k].I.length()) >= static_cast<double>(nyq))
      throw BandOverflow("model_terms: cutoff spectrum exceeds the grid band");
#pragma omp parallel for schedule(dynamic)
  for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
    const auto& box = P.boxes[boxes[bi]];
    // spectrum of the product: inside L (w_1 + w_2 + w_3) unless it wraps
    const double s_lo = L * (box.omega[0].lo + box.omega[1].lo + box.omega[2].lo);
    const double s_hi = L * (box.omega[0].hi + box.omega[1].hi + box.omega[2].hi);
    const bool wraps = s_lo < -static_cast<double>(nyq) || s_hi >= static_cast<double>(nyq);
    if (!wraps) {
      bool any = false;
      for (auto m : by_box.at(boxes[bi])) {
        const double band = std::floor(o.xi.spectral_radius * L / P.tiles[members[m]].I.length());
        any = any || (s_lo <= band && s_hi >= -band);
      }
      if (!any) continue;  // every term is exactly zero
    }
    const GridFunction* pr[3];
    for (int i = 0; i < 3; ++i) {
      const Interval& w = box.omega[static_cast<std::size_t>(i)];
      pr[i] = &proj[slot.at(std::make_tuple(i, w.lo, w.hi))];
    }
    std::vector<cplx> prod(n);
    for (std::size_t x = 0; x < n; ++x) prod[x] = (*pr[0])[x] * (*pr[1])[x] * (*pr[2])[x];
    const GridFunction G = GridFunction::from_samples(std::move(prod), L, origin);
    for (auto m : by_box.at(boxes[bi])) {
      const Interval& I = P.tiles[members[m]].I;
      const double s = I.length();
      const long band = static_cast<long>(std::floor(o.xi.spectral_radius * L / s));
      // integral chi G = L sum_k chi^(k) G^(-k)
      cplx acc = 0;
      for (long k = -band; k <= band; ++k) {
        cplx ind;
        if (k == 0) {
          ind = s / L;
        } else {
          const double w = 2.0 * kPi * static_cast<double>(k) / L;
          ind = (std::polar(1.0, -w * (I.lo - origin)) - std::polar(1.0, -w * (I.hi - origin))) /
                cplx(0.0, 2.0 * kPi * static_cast<double>(k));
        }
        acc += ind * xi.hat(s * static_cast<double>(k) / L) * G.coeff(-k);
      }
      out[m] = L * acc;
    }
  }
  return out;
}

cplx model_inner(const tf::TileSet& P, const std::vector<std::uint32_t>& members,
                 const std::array<GridFunction, 3>& g, const ModelOptions& o) {
  cplx s = 0;
  for (auto v : model_terms(P, members, g, o)) s += v;
  return s;
}

std::array<GridFunction, 3> stream_inputs(const LineData& ld, const GridFunction& f1,
                                          const GridFunction& f2, const GridFunction& f3) {
  return {modulate(localize(f1, ld.I[0]), ld.xi), modulate(localize(f2, ld.I[1]), ld.eta),
          modulate(localize(f3, ld.I[2]), ld.theta)};
}

double model_sum(const std::vector<ModelStream>& streams, const GridFunction& f1,
                 const GridFunction& f2, const GridFunction& f3, const ModelOptions& o) {
  double s = 0;
  for (const auto& st : streams)
    s += std::abs(model_inner(st.tiles, st.members, stream_inputs(st.line, f1, f2, f3), o));
  return s;
}

TreeAudit subtree_audit(const tf::TileSet& P, const tf::Tree& T, const std::vector<std::uint32_t>& sub,
                        const std::array<GridFunction, 3>& g, std::array<double, 3> theta,
                        const FamilyParams& fam, const ModelOptions& o) {
  if (theta[0] != 1.0 || !(theta[1] > 0 && theta[1] < 1) || !(theta[2] > 0 && theta[2] < 1))
    throw ContractError("single_tree_audit: theta = (1, t2, t3) with 0 < t2, t3 < 1");
  for (const auto& x : g)
    if (lp_norm(x, INFINITY) > 1.0 + 1e-9) throw ContractError("single_tree_audit: ||f^i||_inf must be <= 1");
  TreeAudit a;
  a.lhs = std::abs(model_inner(P, sub, g, o));
  const CanonicalFamily family(fam);
  a.rhs = T.I.length();
  for (int i = 0; i < 3; ++i) {
    SizeContext ctx(g[static_cast<std::size_t>(i)], family);
    a.size[static_cast<std::size_t>(i)] = max_size(ctx, P, T.members, i).value;
    a.rhs *= std::pow(a.size[static_cast<std::size_t>(i)], theta[static_cast<std::size_t>(i)]);
  }
  a.ratio = a.rhs > 0 ? a.lhs / a.rhs : (a.lhs > 0 ? INFINITY : 0.0);
  return a;
}

TreeAudit single_tree_audit(const tf::TileSet& P, const tf::Tree& T,
                            const std::array<GridFunction, 3>& g, std::array<double, 3> theta,
                            const FamilyParams& fam, const ModelOptions& o) {
  return subtree_audit(P, T, T.members, g, theta, fam, o);
}

std::vector<BesselLevel> bessel_levels(const tf::ForestDecomposition& d, double norm) {
  std::vector<BesselLevel> out;
  for (const auto& F : d.forests) {
    BesselLevel b;
    b.n = F.n;
    b.trees = F.trees.size();
    b.bessel = F.bessel;
    b.ratio = norm > 0 ? F.bessel / (std::ldexp(1.0, 2 * F.n) * norm) : 0.0;
    out.push_back(b);
  }
  return out;
}

}  // namespace bfr::sizes
