// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace bfr::geometry {

namespace {

int log2_floor(double w) { return std::ilogb(w); }

std::uint64_t cell_key(std::int64_t ix, std::int64_t iy) {
  return std::uint64_t(ix) * 0x9E3779B97F4A7C15ULL ^ (std::uint64_t(iy) + 0x632BE59BD9B4E019ULL);
}

std::int64_t cell_of(double x, int l) { return std::int64_t(std::floor(std::ldexp(x, -l))); }

}  // namespace

RectIndex::RectIndex(const std::vector<Rect2>& rects) : rects_(&rects), n_(rects.size()) {
  std::map<std::pair<int, int>, std::size_t> slot;
  for (std::uint32_t i = 0; i < rects.size(); ++i) {
    const Rect2& r = rects[i];
    int lx = log2_floor(std::max(r.I.length(), 1e-300));
    int ly = log2_floor(std::max(r.J.length(), 1e-300));
    auto [it, fresh] = slot.try_emplace({lx, ly}, levels_.size());
    if (fresh) levels_.push_back({lx, ly, {}});
    Level& L = levels_[it->second];
    for (auto ix = cell_of(r.I.lo, lx); ix <= cell_of(r.I.hi, lx); ++ix)
      for (auto iy = cell_of(r.J.lo, ly); iy <= cell_of(r.J.hi, ly); ++iy)
        L.cells[cell_key(ix, iy)].push_back(i);
  }
}

void RectIndex::query(Point2 p, std::vector<std::uint32_t>& out) const {
  out.clear();
  for (const auto& L : levels_) {
    auto it = L.cells.find(cell_key(cell_of(p.x, L.lx), cell_of(p.y, L.ly)));
    if (it == L.cells.end()) continue;
    for (auto i : it->second)
      if ((*rects_)[i].contains(p)) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());  // hash collisions
}

std::string HypothesisReport::violations() const {
  std::ostringstream os;
  if (!contained()) os << "(1) containment: " << protruding << " rectangles leave the domain, e.g. "
                       << containment_witness << "; ";
  if (!covered())
    os << "(2) cover: " << uncovered << " sample points outside every alpha R, e.g. ("
       << uncovered_witness.x << ", " << uncovered_witness.y << "); ";
  if (!overlap_ok()) os << "(3) overlap " << M1 << " > " << M1_bound << "; ";
  if (!comparable()) os << "(4) side ratio " << M2 << " > " << M2_bound << " for " << comparability_witness << "; ";
  return os.str();
}

PartitionOfUnity::PartitionOfUnity(std::vector<Rect2> rects, double alpha, StepShape shape)
    : rects_(std::move(rects)), alpha_(alpha), shape_(shape) {
  if (!(alpha > 0 && alpha < 1)) throw ContractError("alpha must lie in (0,1)");
  if (rects_.empty()) throw ContractError("empty rectangle collection");
  for (const auto& r : rects_) {
    if (!(r.I.length() > 0 && r.J.length() > 0)) throw ContractError("degenerate rectangle");
    bx_.push_back(PlateauBump::dilated(r.I, alpha, shape));
    by_.push_back(PlateauBump::dilated(r.J, alpha, shape));
  }
  index_ = RectIndex(rects_);
}

double PartitionOfUnity::eta(std::size_t i, Point2 p) const {
  if (!rects_.at(i).contains(p)) return 0.0;
  double a = bx_[i](p.x);
  return a == 0.0 ? 0.0 : a * by_[i](p.y);
}

std::vector<PartitionOfUnity::Term> PartitionOfUnity::evaluate(Point2 p) const {
  std::vector<std::uint32_t> hits;
  index_.query(p, hits);
  std::vector<Term> out;
  double sum = 0;
  for (auto i : hits) {
    double e = eta(i, p);
    if (e > 0) out.push_back({i, e, 0.0}), sum += e;
  }
  for (auto& t : out) t.psi = t.eta / sum;
  return out;
}

double PartitionOfUnity::total(Point2 p) const {
  double s = 0;
  for (const auto& t : evaluate(p)) s += t.psi;
  return s;
}

int PartitionOfUnity::multiplicity(Point2 p) const {
  std::vector<std::uint32_t> hits;
  index_.query(p, hits);
  return int(hits.size());
}

bool PartitionOfUnity::alpha_covered(Point2 p) const {
  std::vector<std::uint32_t> hits;
  index_.query(p, hits);
  for (auto i : hits)
    if (rects_[i].dilate(alpha_).contains(p)) return true;
  return false;
}

std::vector<double> PartitionOfUnity::sample_total(Point2 origin, double step, int nx, int ny) const {
  std::vector<double> out(std::size_t(nx) * ny);
#pragma omp parallel for schedule(dynamic, 4)
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      out[std::size_t(iy) * nx + ix] = total({origin.x + ix * step, origin.y + iy * step});
  return out;
}

ComparabilityResult side_comparability(const std::vector<Rect2>& rects, const std::vector<bool>& skip) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < rects.size(); ++i)
    if (skip.empty() || !skip[i]) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rects[a].I.lo < rects[b].I.lo; });
  ComparabilityResult res;
  std::vector<std::size_t> active;
  for (auto i : order) {
    const Rect2& r = rects[i];
    std::erase_if(active, [&](auto k) { return rects[k].I.hi < r.I.lo; });
    for (auto k : active) {
      const Rect2& q = rects[k];
      if (!r.J.meets(q.J)) continue;
      ++res.pairs;
      double wx = r.I.length() / q.I.length(), wy = r.J.length() / q.J.length();
      double m = std::max({wx, 1 / wx, wy, 1 / wy});
      if (m > res.M2) res.M2 = m, res.a = k, res.b = i;
    }
    active.push_back(i);
  }
  return res;
}

HypothesisReport check_hypotheses(const std::vector<Rect2>& rects, double alpha,
                                  const std::function<double(Point2)>& gauge,
                                  const std::vector<Point2>& samples,
                                  const std::function<bool(Point2)>& resolved,
                                  const HypothesisOptions& opt) {
  HypothesisReport rep;
  rep.M1_bound = opt.M1_bound;
  rep.M2_bound = opt.M2_bound;
  double worst = -1;
  for (const auto& r : rects) {
    double g = 0;
    for (const auto& c : r.corners()) g = std::max(g, gauge(c));
    rep.max_gauge = std::max(rep.max_gauge, g);
    if (g > 1 + opt.touch_tol) {
      ++rep.protruding;
      if (g > worst) worst = g, rep.containment_witness = describe(r) + " (gauge " + std::to_string(g) + ")";
    } else if (g >= 1 - opt.touch_tol) {
      ++rep.touching;
    }
  }

  RectIndex index(rects);
  rep.samples = samples.size();
  std::size_t excluded = 0, uncovered = 0;
  int M1 = 0;
  Point2 witness{};
#pragma omp parallel
  {
    std::vector<std::uint32_t> hits;
    std::size_t ex = 0, un = 0;
    int m1 = 0;
    Point2 w{};
#pragma omp for schedule(static) nowait
    for (std::size_t k = 0; k < samples.size(); ++k) {
      Point2 p = samples[k];
      index.query(p, hits);
      m1 = std::max(m1, int(hits.size()));
      if (!resolved(p)) {
        ++ex;
        continue;
      }
      bool cov = false;
      for (auto i : hits) cov = cov || rects[i].dilate(alpha).contains(p);
      if (!cov) {
        if (un == 0) w = p;
        ++un;
      }
    }
#pragma omp critical
    {
      excluded += ex;
      if (un && !uncovered) witness = w;
      uncovered += un;
      M1 = std::max(M1, m1);
    }
  }
  rep.excluded = excluded;
  rep.uncovered = uncovered;
  rep.uncovered_witness = witness;
  rep.M1 = M1;

  auto cmp = side_comparability(rects);
  rep.M2 = cmp.M2;
  if (cmp.pairs) rep.comparability_witness = describe(rects[cmp.a]) + " vs " + describe(rects[cmp.b]);
  return rep;
}

bool PolygonCollection::resolved(Point2 p) const {
  Point2 c{-std::abs(p.x), std::abs(p.y)};
  if (c.x == 0 && c.y == 0) return true;
  if (options.alpha * std::sqrt(0.5) >= std::max(-c.x, c.y)) return true;  // inside alpha S_0
  double beta = std::atan2(c.y, -c.x);  // angle from the negative axis, in [0, pi/2]
  int mu = beta <= 0 ? 1 << 30 : int(std::floor(std::log2(kPi / beta)));
  mu = std::max(mu, 1);
  const int k = options.whitney.depth_shift;
  if (mu > polygon.mu_max())
    return polygon.gauge(c) <= 1 - trapezoid_depth(polygon.mu_max() + 1, k);
  // distance to the diagonal in the Whitney frame of mu
  Point2 v = polygon.vertex(mu);
  double s = polygon.edge_slope(mu);
  double qx = -(c.x - v.x), qy = -(c.y - v.y) / s;
  double floor_dist = (options.C0 + 1.0) * std::ldexp(1.0, j_min[mu - 1]);
  return qy - qx >= floor_dist;
}

PolygonCollection polygon_collection(const PolygonCollectionOptions& opt) {
  PolygonCollection out;
  out.polygon = LacPolygon(opt.mu_max);
  out.options = opt;
  const double h = std::sqrt(0.5);
  out.rects.push_back({{-h, h}, {-h, h}});
  for (int mu = 1; mu <= opt.mu_max; ++mu) {
    auto fam = whitney_rectangles(out.polygon, mu, opt.C0, opt.alpha, opt.whitney);
    out.j_min.push_back(fam.j_min);
    for (Quadrant q : {Quadrant::Q1, Quadrant::Q2, Quadrant::Q3, Quadrant::Q4})
      for (const auto& w : fam.rects) out.rects.push_back(w.rect.reflected(q));
    out.n_whitney += 4 * fam.rects.size();
  }
  int pp_hi = opt.paraproduct_mu_max < 0 ? opt.mu_max + 1 : opt.paraproduct_mu_max;
  if (pp_hi >= 2) {
    auto pp = paraproduct_rectangles(2, pp_hi, opt.alpha, opt.whitney.depth_shift);
    out.rects.insert(out.rects.end(), pp.dilated.begin(), pp.dilated.end());
    out.n_paraproduct = pp.dilated.size();
  }
  return out;
}

}  // namespace bfr::geometry
