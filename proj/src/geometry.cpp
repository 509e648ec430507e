// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/geometry.hpp"

#include <algorithm>
#include <ranges>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace bfr::geometry {

namespace {

double theta(int mu) { return std::ldexp(kPi, -mu); }

void check_mu(const LacPolygon& P, int mu) {
  if (mu < 1 || mu > P.mu_max())
    throw ContractError("mu=" + std::to_string(mu) + " outside [1, " +
                        std::to_string(P.mu_max()) + "]");
}

// separating-axis test: convex polygon against an axis-aligned box
bool polygon_meets_box(const std::array<Point2, 4>& poly, const Rect2& box) {
  double xmin = poly[0].x, xmax = xmin, ymin = poly[0].y, ymax = ymin;
  for (const auto& p : poly) {
    xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
  }
  if (xmax < box.I.lo || box.I.hi < xmin || ymax < box.J.lo || box.J.hi < ymin) return false;
  auto corners = box.corners();
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const Point2& a = poly[e];
    const Point2& b = poly[(e + 1) % poly.size()];
    double nx = b.y - a.y, ny = a.x - b.x;
    double pmin = 1e300, pmax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const auto& p : poly) {
      double t = nx * (p.x - a.x) + ny * (p.y - a.y);
      pmin = std::min(pmin, t), pmax = std::max(pmax, t);
    }
    for (const auto& p : corners) {
      double t = nx * (p.x - a.x) + ny * (p.y - a.y);
      bmin = std::min(bmin, t), bmax = std::max(bmax, t);
    }
    if (pmax < bmin || bmax < pmin) return false;
  }
  return true;
}

}  // namespace

Point2 reflect(Point2 p, Quadrant q) {
  switch (q) {
    case Quadrant::Q1: return {-p.x, p.y};
    case Quadrant::Q2: return p;
    case Quadrant::Q3: return {p.x, -p.y};
    case Quadrant::Q4: return {-p.x, -p.y};
  }
  return p;
}

Rect2 Rect2::reflected(Quadrant q) const {
  Interval nI{-I.hi, -I.lo}, nJ{-J.hi, -J.lo};
  switch (q) {
    case Quadrant::Q1: return {nI, J};
    case Quadrant::Q2: return *this;
    case Quadrant::Q3: return {I, nJ};
    case Quadrant::Q4: return {nI, nJ};
  }
  return *this;
}

LacPolygon::LacPolygon(int mu_max) : mu_max_(mu_max) {
  if (mu_max < 1) throw ContractError("mu_max must be >= 1");
  // chord between angles a < b: outward normal at (a+b)/2, support cos((b-a)/2)
  for (int mu = 1; mu <= mu_max + 1; ++mu) {
    double a = kPi - theta(mu);
    double b = mu <= mu_max ? kPi - theta(mu + 1) : kPi;
    double m = 0.5 * (a + b);
    normals_.push_back({std::cos(m), std::sin(m)});
    offsets_.push_back(std::cos(0.5 * (b - a)));
  }
}

Point2 LacPolygon::vertex(int mu) const {
  if (mu < 1 || mu > mu_max_ + 1) throw ContractError("vertex index out of range");
  double t = theta(mu);
  return {-std::cos(t), std::sin(t)};
}

Point2 LacPolygon::vertex_offset(int mu) const {
  if (mu < 1 || mu > mu_max_ + 1) throw ContractError("vertex index out of range");
  double t = theta(mu), h = std::sin(0.5 * t);
  return {2.0 * h * h, std::sin(t)};
}

std::vector<Point2> LacPolygon::chain() const {
  std::vector<Point2> out;
  for (int mu = 1; mu <= mu_max_ + 1; ++mu) out.push_back(vertex(mu));
  out.push_back({-1.0, 0.0});
  return out;
}

std::vector<Point2> LacPolygon::boundary() const {
  auto q2 = chain();  // (0,1) ... (-1,0)
  std::vector<Point2> out;
  // Q1 traversed from (1,0) up to (0,1)
  for (auto it = q2.rbegin(); it != q2.rend(); ++it) out.push_back(reflect(*it, Quadrant::Q1));
  out.pop_back();
  for (const auto& p : q2) out.push_back(p);
  out.pop_back();
  for (const auto& p : q2 | std::views::reverse) out.push_back(reflect(p, Quadrant::Q3));
  out.pop_back();
  for (const auto& p : q2) out.push_back(reflect(p, Quadrant::Q4));
  out.pop_back();
  return out;
}

double LacPolygon::gauge(Point2 p) const {
  Point2 c{-std::abs(p.x), std::abs(p.y)};
  double g = 0.0;
  for (std::size_t e = 0; e < normals_.size(); ++e)
    g = std::max(g, (normals_[e].x * c.x + normals_[e].y * c.y) / offsets_[e]);
  return g;
}

double LacPolygon::edge_slope(int mu) const {
  check_mu(*this, mu);
  // chord between angles pi - t and pi - t/2 has slope cot(3t/4)
  return 1.0 / std::tan(0.75 * theta(mu));
}

double trapezoid_depth(int mu, int depth_shift) { return std::ldexp(1.0, 2 * (depth_shift - mu)); }

Trapezoid trapezoid(const LacPolygon& P, int mu, int depth_shift) {
  check_mu(P, mu);
  double f = 1.0 - trapezoid_depth(mu, depth_shift);
  Point2 a = P.vertex(mu), b = P.vertex(mu + 1);
  return {mu, {{a, b, {f * b.x, f * b.y}, {f * a.x, f * a.y}}}};
}

bool Trapezoid::contains(Point2 p, double tol) const {
  int pos = 0, neg = 0;
  for (int e = 0; e < 4; ++e) {
    const Point2& a = v[e];
    const Point2& b = v[(e + 1) % 4];
    double cr = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cr > tol) ++pos;
    if (cr < -tol) ++neg;
  }
  return pos == 0 || neg == 0;
}

bool Trapezoid::on_chord(Point2 p, double tol) const {
  const Point2 &a = v[0], &b = v[1];
  double dx = b.x - a.x, dy = b.y - a.y, len = std::hypot(dx, dy);
  double cr = (dx * (p.y - a.y) - dy * (p.x - a.x)) / len;
  double t = (dx * (p.x - a.x) + dy * (p.y - a.y)) / (len * len);
  return std::abs(cr) <= tol && t >= -tol && t <= 1 + tol;
}

double Trapezoid::area() const {
  double s = 0;
  for (int e = 0; e < 4; ++e) s += v[e].x * v[(e + 1) % 4].y - v[(e + 1) % 4].x * v[e].y;
  return 0.5 * std::abs(s);
}

double WhitneySquare2::side() const { return std::ldexp(1.0, j); }
Point2 WhitneySquare2::center() const {
  return {std::ldexp(double(a), j - shift), std::ldexp(double(b), j - shift)};
}

bool whitney_accept(long a, long b, int C0, int shift) {
  long d = std::abs(a - b), unit = long(C0) << shift;
  return d > unit && d <= 4 * unit;
}

WhitneyFamily whitney_rectangles(const LacPolygon& P, int mu, int C0, double alpha,
                                 const WhitneyOptions& opt) {
  check_mu(P, mu);
  if (!(alpha > 0 && alpha < 1)) throw ContractError("alpha must lie in (0,1)");
  if (C0 < 2) throw ContractError("C0 must be >= 2");
  if (opt.lattice_shift < 0 || opt.lattice_shift > 12) throw ContractError("lattice_shift in [0,12]");
  if (opt.depth < 0) throw ContractError("depth must be >= 0");

  WhitneyFamily fam;
  fam.mu = mu, fam.C0 = C0, fam.alpha = alpha;
  const double s = P.edge_slope(mu);
  const double delta = trapezoid_depth(mu, opt.depth_shift);
  const Point2 Va = P.vertex_offset(mu), Vb = P.vertex_offset(mu + 1);

  // T_mu in the frame S = L2^{-1}(p - v_mu); differences taken in offset coordinates
  auto inner = [&](Point2 V) { return Point2{V.x * (1 - delta) + delta, V.y * (1 - delta)}; };
  auto local = [&](Point2 V) { return Point2{-(V.x - Va.x), -(V.y - Va.y) / s}; };
  std::array<Point2, 4> T{{local(Va), local(Vb), local(inner(Vb)), local(inner(Va))}};

  double dmax = 0, xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& q : T) {
    dmax = std::max(dmax, q.y - q.x);
    xmin = std::min(xmin, q.x), xmax = std::max(xmax, q.x);
    ymin = std::min(ymin, q.y), ymax = std::max(ymax, q.y);
  }
  // alpha S meets T only if (C0 - alpha) 2^j < dmax
  int jmax = int(std::ceil(std::log2(dmax / (C0 - 1)))) - 1;
  while (std::ldexp(C0 - alpha, jmax + 1) < dmax) ++jmax;
  fam.j_max = jmax;
  fam.j_min = jmax - opt.depth;

  const int sh = opt.lattice_shift;
  const long unit = long(C0) << sh;
  for (int j = fam.j_min; j <= fam.j_max; ++j) {
    double side = std::ldexp(1.0, j), h = std::ldexp(1.0, j - sh), half = 0.5 * alpha * side;
    long a0 = long(std::ceil((xmin - half) / h)), a1 = long(std::floor((xmax + half) / h));
    for (long a = a0; a <= a1; ++a) {
      // only squares on the polygon side (above the diagonal) can meet T
      for (long d = unit + 1; d <= 4 * unit; ++d) {
        long b = a + d;
        double cy = std::ldexp(double(b), j - sh);
        if (cy + half < ymin || cy - half > ymax) continue;
        double cx = std::ldexp(double(a), j - sh);
        Rect2 aS{{cx - half, cx + half}, {cy - half, cy + half}};
        if (!polygon_meets_box(T, aS)) continue;

        WhitneyRect w;
        w.square = {j, a, b, sh};
        w.mu = mu;
        Interval Ioff{Va.x - cx - 0.5 * side, Va.x - cx + 0.5 * side};
        Interval J{Va.y - s * (cy + 0.5 * side), Va.y - s * (cy - 0.5 * side)};
        w.offset = {Ioff, J};
        w.rect = {{Ioff.lo - 1.0, Ioff.hi - 1.0}, J};
        fam.rects.push_back(w);
      }
    }
  }
  for (const auto& w : fam.rects) {
    bool in = true;
    for (const auto& c : w.rect.corners()) in = in && P.gauge(c) < 1.0;
    if (!in) ++fam.outside_count;
  }
  fam.all_inside = fam.outside_count == 0;
  return fam;
}

Rect2 paraproduct_rect(int mu, int depth_shift) {
  if (mu < 2) throw ContractError("paraproduct rectangles need mu >= 2");
  double f0 = 1 - trapezoid_depth(mu, depth_shift), f1 = 1 - trapezoid_depth(mu - 1, depth_shift);
  return {{-f0 * std::cos(theta(mu + 1)), -f1 * std::cos(theta(mu))},
          {0.0, f0 * std::sin(theta(mu))}};
}

ParaproductFamily paraproduct_rectangles(int mu_lo, int mu_hi, double alpha, int depth_shift) {
  if (mu_lo < 2) throw ContractError("paraproduct rectangles need mu >= 2");
  if (!(alpha > 0 && alpha < 1)) throw ContractError("alpha must lie in (0,1)");
  ParaproductFamily out;
  for (Quadrant q : {Quadrant::Q1, Quadrant::Q2, Quadrant::Q3, Quadrant::Q4})
    for (int mu = mu_lo; mu <= mu_hi; ++mu) {
      Rect2 r = paraproduct_rect(mu, depth_shift).reflected(q);
      out.base.push_back({r, mu, q});
      out.dilated.push_back(r.dilate(1.0 / alpha));
    }
  return out;
}

int max_overlap(const std::vector<Interval>& v) {
  std::vector<std::pair<double, int>> ev;
  ev.reserve(2 * v.size());
  for (const auto& i : v) ev.push_back({i.lo, -1}), ev.push_back({i.hi, +1});
  // openings sort before closings at equal coordinates: closed intervals
  std::sort(ev.begin(), ev.end());
  int cur = 0, best = 0;
  for (const auto& e : ev) {
    cur -= e.second;
    best = std::max(best, cur);
  }
  return best;
}

IntervalFamily interval_families(const std::vector<WhitneyFamily>& fams, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ContractError("alpha must lie in (0,1)");
  IntervalFamily out;
  out.alpha = alpha;
  std::array<std::vector<Interval>, 3> dil;
  for (const auto& f : fams) {
    if (f.rects.empty()) continue;
    std::array<std::vector<Interval>, 3> parts;
    for (const auto& w : f.rects) {
      parts[0].push_back(w.offset.I);
      parts[1].push_back(w.offset.J);
      parts[2].push_back(neg_sum(w.offset.I, w.offset.J));
    }
    std::array<Interval, 3> J, I;
    std::array<bool, 3> conn;
    for (int i = 0; i < 3; ++i) {
      auto& p = parts[i];
      std::sort(p.begin(), p.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
      conn[i] = true;
      double reach = p.front().hi;
      for (const auto& x : p) {
        if (x.lo > reach) conn[i] = false;
        reach = std::max(reach, x.hi);
      }
      J[i] = {p.front().lo, reach};
      I[i] = J[i].dilate(1.0 / alpha);
      dil[i].push_back(I[i]);
    }
    out.mus.push_back(f.mu);
    out.J.push_back(J);
    out.I.push_back(I);
    out.connected.push_back(conn);
  }
  for (int i = 0; i < 3; ++i) out.overlap[i] = max_overlap(dil[i]);
  return out;
}

std::string describe(const Rect2& r) {
  std::ostringstream os;
  os << std::setprecision(17) << "[" << r.I.lo << ", " << r.I.hi << "] x [" << r.J.lo << ", "
     << r.J.hi << "]";
  return os.str();
}

void write_rects(std::ostream& os, const std::vector<WhitneyRect>& rects) {
  os << "quadrant,mu,I_lo,I_hi,J_lo,J_hi\n" << std::setprecision(17);
  for (const auto& w : rects)
    os << int(w.quadrant) << ',' << w.mu << ',' << w.rect.I.lo << ',' << w.rect.I.hi << ','
       << w.rect.J.lo << ',' << w.rect.J.hi << '\n';
}

}  // namespace bfr::geometry
