// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/timefreq.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace bfr::tf {

TileParams TileParams::desk() {
  TileParams p;
  p.C0 = 1;
  p.lattice_bits = 0;
  p.J = 2;
  p.dilation = 3;
  p.nest = 2;
  p.slack = 0.25;
  p.enforce_nesting = false;
  return p;
}

double WhitneyCube3::side() const { return std::ldexp(1.0, j); }

double WhitneyCube3::center(int i) const {
  return std::ldexp(static_cast<double>(n[static_cast<std::size_t>(i)]), j - bits);
}

Interval WhitneyCube3::omega(int i) const {
  const double c = center(i), h = 0.5 * side();
  return {c - h, c + h};
}

long WhitneyCube3::spread() const {
  auto [lo, hi] = std::minmax({n[0], n[1], n[2]});
  return hi - lo;
}

double diagonal_distance(const std::array<double, 3>& p) {
  const double m = (p[0] + p[1] + p[2]) / 3.0;
  return std::sqrt((p[0] - m) * (p[0] - m) + (p[1] - m) * (p[1] - m) + (p[2] - m) * (p[2] - m));
}

bool dilate_meets_diagonal(const WhitneyCube3& q, double c) {
  // [n_i - h, n_i + h] share a point iff max n - min n <= 2h, h = c 2^bits / 2
  return static_cast<double>(q.spread()) <= c * std::ldexp(1.0, q.bits);
}

bool whitney3_accept(const WhitneyCube3& q, int C0) {
  const long unit = 1L << q.bits;
  const long s = q.spread();
  return s > C0 * unit && s <= 10L * C0 * unit;
}

std::vector<WhitneyCube3> whitney_cubes3(int C0, int j_lo, int j_hi, double f_lo, double f_hi,
                                         int bits, std::size_t max_count) {
  if (C0 <= 0 || bits < 0 || bits > 20) throw ContractError("whitney_cubes3: bad parameters");
  std::vector<WhitneyCube3> out;
  const long S = 10L * C0 * (1L << bits), lo_s = static_cast<long>(C0) * (1L << bits);
  for (int j = j_lo; j <= j_hi; ++j) {
    const double u = std::ldexp(1.0, j - bits);
    const long a = static_cast<long>(std::ceil(f_lo / u)), b = static_cast<long>(std::floor(f_hi / u));
    for (long n1 = a; n1 <= b; ++n1)
      for (long n2 = std::max(a, n1 - S); n2 <= std::min(b, n1 + S); ++n2) {
        const long mn = std::min(n1, n2), mx = std::max(n1, n2);
        for (long n3 = std::max(a, mx - S); n3 <= std::min(b, mn + S); ++n3) {
          const long spread = std::max(mx, n3) - std::min(mn, n3);
          if (spread <= lo_s || spread > S) continue;
          out.push_back({j, {n1, n2, n3}, bits});
          if (out.size() > max_count) throw ContractError("whitney_cubes3: more than max_count cubes");
        }
      }
  }
  return out;
}

std::string sparse_conflict(const WhitneyCube3& a, const WhitneyCube3& b, int J) {
  if (a == b) return "duplicate cube";
  if (a.j != b.j) {
    if (std::abs(a.j - b.j) < J) return "scales closer than 2^J";
    return "";
  }
  const double side = a.side();
  for (int i = 0; i < 3; ++i) {
    const double d = std::abs(a.center(i) - b.center(i));
    if (d == 0) return "shared omega_" + std::to_string(i + 1);
    if (d - side < std::ldexp(side, J)) return "omega_" + std::to_string(i + 1) + " closer than 2^J |omega|";
  }
  return "";
}

std::string sparse_violation(const std::vector<WhitneyCube3>& cubes, int J) {
  for (std::size_t a = 0; a < cubes.size(); ++a)
    for (std::size_t b = a + 1; b < cubes.size(); ++b) {
      auto why = sparse_conflict(cubes[a], cubes[b], J);
      if (!why.empty()) {
        std::ostringstream os;
        os << "cubes " << a << " and " << b << ": " << why;
        return os.str();
      }
    }
  return "";
}

SparseClasses sparsify(const std::vector<WhitneyCube3>& cubes, int J) {
  if (J < 1) throw ContractError("sparsify: J must be positive");
  {
    std::set<WhitneyCube3> seen(cubes.begin(), cubes.end());
    if (seen.size() != cubes.size()) throw ContractError("sparsify: duplicate cubes");
  }
  std::map<int, std::vector<std::size_t>> by_scale;
  for (std::size_t k = 0; k < cubes.size(); ++k) by_scale[cubes[k].j].push_back(k);

  std::vector<int> colour(cubes.size(), -1);
  for (auto& [j, idx] : by_scale) {
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return cubes[a].n < cubes[b].n; });
    // same-scale conflicts live in three coordinate slabs of half-width (2^J + 1) side
    std::vector<std::vector<std::size_t>> adj(idx.size());
    const long reach = ((1L << J) + 1) << cubes[idx[0]].bits;
    for (int i = 0; i < 3; ++i) {
      std::vector<std::size_t> ord(idx.size());
      std::iota(ord.begin(), ord.end(), 0);
      std::sort(ord.begin(), ord.end(),
                [&](auto a, auto b) { return cubes[idx[a]].n[i] < cubes[idx[b]].n[i]; });
      for (std::size_t x = 0; x < ord.size(); ++x)
        for (std::size_t y = x + 1; y < ord.size(); ++y) {
          if (cubes[idx[ord[y]]].n[i] - cubes[idx[ord[x]]].n[i] >= reach) break;
          adj[ord[x]].push_back(ord[y]);
          adj[ord[y]].push_back(ord[x]);
        }
    }
    for (std::size_t x = 0; x < idx.size(); ++x) {
      std::vector<char> used;
      for (auto y : adj[x]) {
        int c = colour[idx[y]];
        if (c < 0) continue;
        if (static_cast<std::size_t>(c) >= used.size()) used.resize(static_cast<std::size_t>(c) + 1, 0);
        used[static_cast<std::size_t>(c)] = 1;
      }
      int c = 0;
      while (static_cast<std::size_t>(c) < used.size() && used[static_cast<std::size_t>(c)]) ++c;
      colour[idx[x]] = c;
    }
  }

  std::map<std::pair<int, int>, int> id;
  for (std::size_t k = 0; k < cubes.size(); ++k) id[{((cubes[k].j % J) + J) % J, colour[k]}] = 0;
  int next = 0;
  for (auto& [key, v] : id) v = next++;
  SparseClasses out;
  out.cls.resize(cubes.size());
  out.members.resize(static_cast<std::size_t>(next));
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    int c = id[{((cubes[k].j % J) + J) % J, colour[k]}];
    out.cls[k] = c;
    out.members[static_cast<std::size_t>(c)].push_back(k);
  }
  return out;
}

Interval scaled_about_center(const Interval& w, double c) {
  const double m = w.center(), h = 0.5 * c * w.length();
  return {m - h, m + h};
}

namespace {

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

std::string cube_name(const WhitneyCube3& q) {
  std::ostringstream os;
  os << "j=" << q.j << " n=(" << q.n[0] << "," << q.n[1] << "," << q.n[2] << ")";
  return os.str();
}

}  // namespace

std::vector<Bars> enlarge_omegas(const std::vector<WhitneyCube3>& sparse, const TileParams& p) {
  const std::size_t n = sparse.size();
  std::vector<Bars> bars(n);
  for (std::size_t k = 0; k < n; ++k)
    for (int i = 0; i < 3; ++i) bars[k][static_cast<std::size_t>(i)] = scaled_about_center(sparse[k].omega(i), p.dilation);
  if (!p.enforce_nesting) return bars;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sparse[a].j < sparse[b].j; });

  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t k = order[pos];
    // smaller cubes are final; collect their nest-dilates and hulls
    std::vector<std::size_t> smaller;
    for (std::size_t q = 0; q < pos; ++q)
      if (sparse[order[q]].j < sparse[k].j) smaller.push_back(order[q]);
    std::vector<Bars> nb(smaller.size());
    std::vector<Interval> hl(smaller.size());
    for (std::size_t s = 0; s < smaller.size(); ++s) {
      for (int i = 0; i < 3; ++i)
        nb[s][static_cast<std::size_t>(i)] = scaled_about_center(bars[smaller[s]][static_cast<std::size_t>(i)], p.nest);
      hl[s] = hull(hull(nb[s][0], nb[s][1]), nb[s][2]);
    }
    for (int i = 0; i < 3; ++i) {
      const Interval base = bars[k][static_cast<std::size_t>(i)];
      const double pad = p.slack * base.length();
      Interval B = base;
      std::size_t culprit = k;
      bool changed = true;
      int pass = 0;
      for (; changed && pass < p.retry_budget; ++pass) {
        changed = false;
        for (std::size_t s = 0; s < smaller.size(); ++s) {
          bool touches = nb[s][0].meets(B) || nb[s][1].meets(B) || nb[s][2].meets(B);
          if (touches && !B.contains(hl[s])) {
            B = hull(B, hl[s]);
            culprit = smaller[s];
            changed = true;
          }
        }
      }
      if (changed || B.lo < base.lo - pad || B.hi > base.hi + pad) {
        std::ostringstream os;
        os << "enlarge_omegas: bar_" << i + 1 << " of cube " << cube_name(sparse[k])
           << " cannot absorb cube " << cube_name(sparse[culprit]) << " within the slack";
        throw EnlargementError(os.str(), culprit, k);
      }
      bars[k][static_cast<std::size_t>(i)] = B;
    }
  }
  return bars;
}

NestingReport check_nesting(const std::vector<WhitneyCube3>& cubes, const std::vector<Bars>& bars,
                            const TileParams& p) {
  NestingReport r;
  r.min_ratio = INFINITY;
  for (std::size_t k = 0; k < cubes.size(); ++k)
    for (int i = 0; i < 3; ++i) {
      const Interval& b = bars[k][static_cast<std::size_t>(i)];
      const Interval d = scaled_about_center(cubes[k].omega(i), p.dilation);
      const double ratio = b.length() / cubes[k].side();
      r.min_ratio = std::min(r.min_ratio, ratio);
      r.max_ratio = std::max(r.max_ratio, ratio);
      const double pad = p.slack * d.length();
      if (!b.contains(d) || b.lo < d.lo - pad || b.hi > d.hi + pad) {
        ++r.violations;
        if (r.witness.empty()) r.witness = "bar outside its bounds: " + cube_name(cubes[k]);
      }
    }
  for (std::size_t a = 0; a < cubes.size(); ++a)
    for (std::size_t b = 0; b < cubes.size(); ++b) {
      if (!(cubes[a].j < cubes[b].j)) continue;
      ++r.pairs;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const Interval big = bars[b][static_cast<std::size_t>(j)];
          if (!scaled_about_center(bars[a][static_cast<std::size_t>(i)], p.nest).meets(big)) continue;
          for (int k = 0; k < 3; ++k)
            if (!big.contains(scaled_about_center(bars[a][static_cast<std::size_t>(k)], p.nest))) {
              ++r.violations;
              if (r.witness.empty())
                r.witness = "nesting: " + cube_name(cubes[a]) + " against " + cube_name(cubes[b]);
            }
        }
    }
  if (cubes.empty()) r.min_ratio = 0;
  return r;
}

Interval apply_L(const Interval& w, int i, double s) {
  const double v = i == 0 ? 1.0 : i == 1 ? s : -1.0 - s;
  return v > 0 ? Interval{v * w.lo, v * w.hi} : Interval{v * w.hi, v * w.lo};
}

TileSet make_boxes(int mu, double s, const std::vector<WhitneyCube3>& cubes,
                   const std::vector<Bars>& bars, const TileParams& p) {
  if (cubes.size() != bars.size()) throw ContractError("make_boxes: size mismatch");
  if (!(s > 0)) throw ContractError("make_boxes: s must be positive");
  TileSet P;
  P.mu = mu;
  P.s = s;
  P.params = p;
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    Box b;
    b.cube = cubes[k];
    for (int i = 0; i < 3; ++i) {
      const auto u = static_cast<std::size_t>(i);
      b.omega_t[u] = cubes[k].omega(i);
      b.bar_t[u] = bars[k][u];
      b.omega[u] = apply_L(b.omega_t[u], i, s);
      b.bar[u] = apply_L(b.bar_t[u], i, s);
    }
    P.boxes.push_back(b);
  }
  return P;
}

TileSet build_multitiles(int mu, double s, const std::vector<WhitneyCube3>& cubes,
                         const std::vector<Bars>& bars, Interval window, const TileParams& p) {
  TileSet P = make_boxes(mu, s, cubes, bars, p);
  for (std::uint32_t b = 0; b < P.boxes.size(); ++b) {
    const int j = P.boxes[b].cube.j;
    const double len = std::ldexp(1.0, -j);
    const double k0 = std::ceil(window.lo / len), k1 = std::floor(window.hi / len);
    if (k1 - k0 > 1e7) throw ContractError("build_multitiles: window holds too many intervals");
    for (double k = k0; k + 1 <= k1; k += 1) {
      MultiTile t;
      t.mu = mu;
      t.box = b;
      t.j = j;
      t.I = {k * len, (k + 1) * len};
      t.bar_t = P.boxes[b].bar_t;
      P.tiles.push_back(t);
    }
  }
  return P;
}

bool tile_leq(const MultiTile& p, int i, const MultiTile& q, int k) {
  return q.I.contains(p.I) && p.bar_t[static_cast<std::size_t>(i)].contains(q.bar_t[static_cast<std::size_t>(k)]);
}

namespace {
void same_mu(const MultiTile& p, const MultiTile& q) {
  if (p.mu != q.mu) throw ContractError("multi-tiles with different mu are never compared");
}
}  // namespace

bool order_leq(const MultiTile& p, const MultiTile& q) {
  same_mu(p, q);
  for (int i = 0; i < 3; ++i)
    if (tile_leq(p, i, q, i)) return true;
  return false;
}

bool order_lessdot(const MultiTile& p, const MultiTile& q) {
  same_mu(p, q);
  for (std::size_t i = 0; i < 3; ++i)
    if (p.bar_t[i].contains(q.bar_t[i])) return true;
  return false;
}

RegularityReport is_regular(const TileSet& P, const std::vector<std::uint32_t>& members) {
  std::map<std::uint32_t, std::vector<Interval>> E;
  std::map<std::uint32_t, std::uint32_t> rep;  // a tile carrying each box
  for (auto k : members) {
    E[P.tiles[k].box].push_back(P.tiles[k].I);
    rep.emplace(P.tiles[k].box, k);
  }
  for (auto& [b, v] : E) v = merge_intervals(std::move(v));
  RegularityReport r;
  for (const auto& [qa, Ea] : E)
    for (const auto& [qb, Eb] : E) {
      if (qa == qb) continue;
      const MultiTile& ta = P.tiles[rep[qa]];
      const MultiTile& tb = P.tiles[rep[qb]];
      if (!order_lessdot(ta, tb)) continue;
      for (const auto& piece : Ea) {
        auto it = std::upper_bound(Eb.begin(), Eb.end(), piece.lo,
                                   [](double x, const Interval& I) { return x < I.lo; });
        bool inside = it != Eb.begin() && std::prev(it)->contains(piece);
        if (!inside) {
          r.regular = false;
          // witness: a tile of box qa inside the uncovered piece
          for (auto k : members)
            if (P.tiles[k].box == qa && piece.contains(P.tiles[k].I)) {
              r.a = k;
              break;
            }
          r.b = rep[qb];
          return r;
        }
      }
    }
  return r;
}

Interval Tree::omega(int i, double s) const {
  const double len = (i == 0 ? 1.0 : i == 1 ? s : 1.0 + s) / I.length();
  const double c = xi(i, s);
  return {c - 0.5 * len, c + 0.5 * len};
}

double Tree::xi(int i, double s) const { return (i == 0 ? 1.0 : i == 1 ? s : -1.0 - s) * t; }

Interval Tree::bar(double dilation) const {
  const double h = 0.5 * dilation / I.length();
  return {t - h, t + h};
}

std::optional<Tree> maximal_tree(const TileSet& P, const std::vector<char>& alive, double t,
                                 Interval I) {
  Tree T;
  T.mu = P.mu;
  T.t = t;
  T.I = I;
  const Interval top = T.bar(P.params.dilation);
  for (std::uint32_t k = 0; k < P.tiles.size(); ++k) {
    if (!alive[k]) continue;
    const MultiTile& p = P.tiles[k];
    if (!I.contains(p.I)) continue;
    if (p.bar_t[0].contains(top) || p.bar_t[1].contains(top) || p.bar_t[2].contains(top))
      T.members.push_back(k);
  }
  if (T.members.empty()) return std::nullopt;
  return T;
}

std::vector<TopData> candidate_tops(const TileSet& P, const std::vector<char>& alive) {
  std::vector<TopData> c;
  for (std::uint32_t k = 0; k < P.tiles.size(); ++k) {
    if (!alive[k]) continue;
    for (int i = 0; i < 3; ++i)
      c.push_back({P.boxes[P.tiles[k].box].omega_t[static_cast<std::size_t>(i)].center(), P.tiles[k].I, k});
  }
  std::sort(c.begin(), c.end(), [](const TopData& a, const TopData& b) {
    if (a.I.length() != b.I.length()) return a.I.length() > b.I.length();
    if (a.t != b.t) return a.t < b.t;
    if (a.I.lo != b.I.lo) return a.I.lo < b.I.lo;
    return a.source < b.source;
  });
  return c;
}

std::vector<std::uint32_t> all_members(const TileSet& P) {
  std::vector<std::uint32_t> m(P.tiles.size());
  std::iota(m.begin(), m.end(), 0u);
  return m;
}

std::vector<Tree> greedy_select(const TileSet& P, const std::vector<std::uint32_t>& members) {
  std::vector<char> alive(P.tiles.size(), 0);
  for (auto k : members) alive[k] = 1;
  std::vector<Tree> out;
  for (const auto& c : candidate_tops(P, alive)) {
    if (!alive[c.source]) continue;
    auto T = maximal_tree(P, alive, c.t, c.I);
    // the source tile always belongs to its own candidate's tree
    for (auto k : T->members) alive[k] = 0;
    out.push_back(std::move(*T));
  }
  return out;
}

UnionCheck consecutive_union_check(const TileSet& P, const std::vector<std::uint32_t>& members,
                                   const std::vector<Tree>& trees) {
  const std::size_t n = members.size();
  std::map<std::uint32_t, std::size_t> local;
  for (std::size_t a = 0; a < n; ++a) local[members[a]] = a;
  std::vector<long> tix(n, -1);
  for (std::size_t t = 0; t < trees.size(); ++t)
    for (auto k : trees[t].members) {
      auto it = local.find(k);
      if (it != local.end()) tix[it->second] = static_cast<long>(t);
    }
  std::vector<char> leq(n * n);
#pragma omp parallel for schedule(static)
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      leq[a * n + b] = order_leq(P.tiles[members[a]], P.tiles[members[b]]);

  UnionCheck r;
  for (std::size_t mid = 0; mid < n; ++mid) {
    const double lm = P.tiles[members[mid]].length();
    for (std::size_t lo = 0; lo < n; ++lo) {
      if (!leq[lo * n + mid] || !(P.tiles[members[lo]].length() < lm)) continue;
      for (std::size_t hi = 0; hi < n; ++hi) {
        if (!leq[mid * n + hi] || !(lm < P.tiles[members[hi]].length())) continue;
        ++r.triples;
        const long a = tix[hi], b = tix[lo], c = tix[mid];
        if (a < 0 || b < 0 || c < 0 || c < std::min(a, b) || c > std::max(a, b)) {
          ++r.violations;
          if (r.witness.empty()) {
            std::ostringstream os;
            os << "p'=" << members[lo] << " (tree " << b << ") p''=" << members[mid] << " (tree "
               << c << ") p=" << members[hi] << " (tree " << a << ")";
            r.witness = os.str();
          }
        }
      }
    }
  }
  return r;
}

SubtreePartition subtree_regular_partition(const TileSet& P, const Tree& T,
                                           const std::vector<char>& inS,
                                           const std::vector<char>& inS2) {
  std::vector<std::uint32_t> sub;
  for (auto k : T.members)
    if (inS[k] && inS2[k]) sub.push_back(k);
  std::vector<std::uint32_t> tops;
  for (auto p : sub) {
    bool maximal = true;
    for (auto q : sub)
      if (q != p && order_leq(P.tiles[p], P.tiles[q]) && !order_leq(P.tiles[q], P.tiles[p])) {
        maximal = false;
        break;
      }
    if (maximal) tops.push_back(p);
  }
  SubtreePartition out;
  std::map<std::uint32_t, int> hits;
  for (auto top : tops) {
    Tree part;
    part.mu = T.mu;
    part.t = T.t;
    part.I = T.I;
    for (auto p : sub)
      if (order_leq(P.tiles[p], P.tiles[top])) {
        part.members.push_back(p);
        ++hits[p];
      }
    out.top_length += P.tiles[top].length();
    out.parts.push_back(std::move(part));
  }
  for (auto p : sub)
    if (hits[p] != 1) out.partitions = false;
  return out;
}

ForestDecomposition forest_decompose(const TileSet& P, const std::vector<std::uint32_t>& members,
                                     const std::function<double(const Tree&)>& size,
                                     int max_levels) {
  if (!is_regular(P, members).regular) throw ContractError("forest_decompose: input is not regular");
  std::vector<char> alive(P.tiles.size(), 0);
  for (auto k : members) alive[k] = 1;
  ForestDecomposition d;
  std::size_t left = members.size();
  if (left == 0) return d;

  for (const auto& c : candidate_tops(P, alive))
    if (auto T = maximal_tree(P, alive, c.t, c.I)) d.initial_size = std::max(d.initial_size, size(*T));
  if (!(d.initial_size > 0)) {
    d.residual = left;
    return d;
  }
  d.n0 = static_cast<int>(std::floor(-std::log2(d.initial_size)));

  for (int level = 0; level < max_levels && left > 0; ++level) {
    Forest F;
    F.n = d.n0 + level;
    const double tau = std::ldexp(1.0, -F.n - 1);
    bool picked = true;
    while (picked && left > 0) {
      picked = false;
      for (const auto& c : candidate_tops(P, alive)) {
        if (!alive[c.source]) continue;
        auto T = maximal_tree(P, alive, c.t, c.I);
        const double sz = size(*T);
        if (!(sz > tau)) continue;
        for (auto k : T->members) alive[k] = 0;
        left -= T->members.size();
        F.bessel += T->I.length();
        F.sizes.push_back(sz);
        F.trees.push_back(std::move(*T));
        picked = true;
      }
    }
    d.forests.push_back(std::move(F));
  }
  d.residual = left;
  return d;
}

TileSet random_regular_collection(Rng& rng, const RegularCollectionOptions& opt) {
  const TileParams& p = opt.params;
  if (opt.scales < 1 || opt.boxes_per_scale < 1) throw ContractError("random_regular_collection: empty");
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const long S = 10L * p.C0 * (1L << p.lattice_bits);
  std::uniform_int_distribution<long> D(-S, S);
  const double W = std::max(0.45 * p.dilation, std::ldexp(1.0 * opt.boxes_per_scale, p.J)) *
                   std::ldexp(1.0, p.J * (opt.scales - 1));

  for (int attempt = 0; attempt < 1000; ++attempt) {
    // coarse frequency scales first; finer cubes are placed inside the
    // dilate of a random coarser one so that the orders are populated
    std::vector<WhitneyCube3> cubes;
    for (int k = opt.scales - 1; k >= 0; --k) {
      const int j = k * p.J;
      const double u = std::ldexp(1.0, j - p.lattice_bits);
      std::vector<WhitneyCube3> parents;
      for (const auto& q : cubes)
        if (q.j == j + p.J) parents.push_back(q);
      for (int b = 0; b < opt.boxes_per_scale; ++b) {
        for (int tries = 0; tries < 100; ++tries) {
          double t = (2 * U(rng) - 1) * W;
          if (!parents.empty()) {
            const auto& par = parents[static_cast<std::size_t>(U(rng) * static_cast<double>(parents.size()))];
            t = par.center(0) + (2 * U(rng) - 1) * 0.45 * p.dilation * par.side();
          }
          const long base = std::lround(t / u);
          WhitneyCube3 q{j, {base, base + D(rng), base + D(rng)}, p.lattice_bits};
          if (!whitney3_accept(q, p.C0)) continue;
          bool ok = true;
          for (const auto& o : cubes) ok = ok && sparse_conflict(q, o, p.J).empty();
          if (!ok) continue;
          cubes.push_back(q);
          break;
        }
      }
    }
    std::vector<Bars> bars;
    try {
      bars = enlarge_omegas(cubes, p);
    } catch (const EnlargementError&) {
      continue;
    }
    TileSet P = make_boxes(opt.mu, opt.s, cubes, bars, p);

    // supports, spatially coarse (small omega) first
    std::vector<std::uint32_t> order(P.boxes.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return P.boxes[a].cube.j < P.boxes[b].cube.j; });
    std::vector<double> anchors;
    for (int m = 0; m < opt.intervals_per_box; ++m) anchors.push_back(U(rng));
    std::vector<std::vector<Interval>> E(P.boxes.size());
    std::vector<char> done(P.boxes.size(), 0);
    std::size_t total = 0;
    for (auto q : order) {
      std::vector<Interval> C{{0.0, 1.0}};
      for (auto r : order) {
        if (!done[r]) continue;
        bool lessdot = false;
        for (std::size_t i = 0; i < 3; ++i) lessdot = lessdot || P.boxes[q].bar_t[i].contains(P.boxes[r].bar_t[i]);
        if (!lessdot) continue;
        std::vector<Interval> next;
        for (const auto& a : C)
          for (const auto& b : E[r]) {
            Interval x{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
            if (x.lo < x.hi) next.push_back(x);
          }
        C = merge_intervals(std::move(next));
      }
      done[q] = 1;
      const double len = std::ldexp(1.0, -P.boxes[q].cube.j);
      // supports grow around shared anchor points, so that nested boxes overlap
      std::set<double> starts;
      std::vector<double> usable;
      for (double x : anchors)
        if (union_contains(C, x)) usable.push_back(x);
      for (double x : usable)
        if (U(rng) < 0.6) starts.insert(std::floor(x / len) * len);
      if (starts.empty() && !usable.empty())
        starts.insert(std::floor(usable[static_cast<std::size_t>(U(rng) * static_cast<double>(usable.size()))] / len) * len);
      for (double a : starts) E[q].push_back({a, a + len});
      total += starts.size();
    }
    if (total > opt.max_tiles) continue;
    for (auto q : order)
      for (const auto& I : E[q]) {
        MultiTile t;
        t.mu = opt.mu;
        t.box = q;
        t.j = P.boxes[q].cube.j;
        t.I = I;
        t.bar_t = P.boxes[q].bar_t;
        P.tiles.push_back(t);
      }
    return P;
  }
  throw ContractError("random_regular_collection: no admissible sample");
}

void write_tiles(std::ostream& os, const TileSet& P) {
  os << "mu,j,I_lo,I_hi";
  for (int i = 1; i <= 3; ++i) os << ",w" << i << "_lo,w" << i << "_hi";
  for (int i = 1; i <= 3; ++i) os << ",b" << i << "_lo,b" << i << "_hi";
  os << '\n';
  for (const auto& t : P.tiles) {
    const Box& b = P.boxes[t.box];
    os << t.mu << ',' << t.j << ',' << t.I.lo << ',' << t.I.hi;
    for (const auto& w : b.omega) os << ',' << w.lo << ',' << w.hi;
    for (const auto& w : b.bar) os << ',' << w.lo << ',' << w.hi;
    os << '\n';
  }
}

void write_forests(std::ostream& os, const ForestDecomposition& d) {
  os << "n,tree,t,I_lo,I_hi,size,members\n";
  for (const auto& F : d.forests)
    for (std::size_t k = 0; k < F.trees.size(); ++k) {
      const Tree& T = F.trees[k];
      os << F.n << ',' << k << ',' << T.t << ',' << T.I.lo << ',' << T.I.hi << ',' << F.sizes[k] << ',';
      for (std::size_t m = 0; m < T.members.size(); ++m) os << (m ? " " : "") << T.members[m];
      os << '\n';
    }
}

}  // namespace bfr::tf
