// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "bfr/ensemble.hpp"
#include "bfr/geometry.hpp"
#include "bfr/partition.hpp"
#include "doctest.h"

using namespace bfr;
using namespace bfr::geometry;

namespace {

// width of a convex polygon along the horizontal line at height y
double width_at(const std::array<Point2, 4>& v, double y) {
  double lo = 1e300, hi = -1e300;
  for (int e = 0; e < 4; ++e) {
    Point2 a = v[e], b = v[(e + 1) % 4];
    if ((a.y - y) * (b.y - y) > 0 || a.y == b.y) continue;
    double x = a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y);
    lo = std::min(lo, x), hi = std::max(hi, x);
  }
  return hi > lo ? hi - lo : 0.0;
}

}  // namespace

TEST_CASE("polygon vertices") {
  LacPolygon P1(1);
  CHECK(P1.vertex(1).x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(P1.vertex(1).y == 1.0);

  LacPolygon P(4);
  CHECK(P.vertex(3).x == doctest::Approx(-0.9238795325112867).epsilon(1e-15));
  CHECK(P.vertex(3).y == doctest::Approx(0.3826834323650898).epsilon(1e-15));

  LacPolygon big(20);
  double worst = 0;
  for (const auto& v : big.boundary()) worst = std::max(worst, std::abs(v.x * v.x + v.y * v.y - 1));
  CHECK(worst <= 1e-12);
  for (int mu = 1; mu <= 21; ++mu) {
    Point2 v = big.vertex(mu), o = big.vertex_offset(mu);
    CHECK(o.x - 1.0 == doctest::Approx(v.x).epsilon(1e-15));
    CHECK(o.y == v.y);
  }
  // four quadrant images, each vertex once
  CHECK(P.boundary().size() == 4 * (P.mu_max() + 1));
  CHECK_THROWS_AS(LacPolygon(0), ContractError);
}

TEST_CASE("edge slopes") {
  LacPolygon P(20);
  CHECK(P.edge_slope(1) == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-15));
  Point2 a = P.vertex(3), b = P.vertex(4);
  double fd = (b.y - a.y) / (b.x - a.x);
  CHECK(P.edge_slope(3) == doctest::Approx(fd).epsilon(1e-13));
  CHECK(P.edge_slope(3) == doctest::Approx(3.2966).epsilon(1e-4));
  double lo = 1e9, hi = 0, prev = 0;
  for (int mu = 1; mu <= 20; ++mu) {
    double r = P.edge_slope(mu) / std::ldexp(1.0, mu);
    lo = std::min(lo, r), hi = std::max(hi, r);
    CHECK(r > prev);  // increases to 4/(3 pi)
    prev = r;
  }
  CHECK(lo == doctest::Approx((std::sqrt(2.0) - 1) / 2).epsilon(1e-14));
  CHECK(hi < 4 / (3 * kPi));
  CHECK(hi > 4 / (3 * kPi) - 1e-9);
  CHECK_THROWS_AS(P.edge_slope(21), ContractError);
  CHECK_THROWS_AS(P.edge_slope(0), ContractError);
}

TEST_CASE("polygon membership") {
  LacPolygon P(6);
  CHECK(P.contains({0, 0}));
  CHECK_FALSE(P.contains({2, 0}));
  Point2 a = P.vertex(3), b = P.vertex(4);
  Point2 m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  CHECK(P.contains(m));
  CHECK_FALSE(P.contains({1.001 * m.x, 1.001 * m.y}));
  for (Quadrant q : {Quadrant::Q1, Quadrant::Q3, Quadrant::Q4}) {
    CHECK(P.contains(reflect(m, q)));
    CHECK_FALSE(P.contains(reflect({1.001 * m.x, 1.001 * m.y}, q)));
  }
  // the closing chord to the axis
  Point2 last = P.vertex(7);
  CHECK(P.contains({0.5 * (last.x - 1), 0.5 * last.y}));
  CHECK_FALSE(P.contains({0.5 * (last.x - 1) * 1.0001, 0.5 * last.y}));
  // gauge is positively homogeneous
  CHECK(P.gauge({0.3 * m.x, 0.3 * m.y}) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("trapezoids") {
  LacPolygon P(8);
  for (int mu = 1; mu <= 8; ++mu) {
    Trapezoid T = trapezoid(P, mu);
    Point2 a = P.vertex(mu), b = P.vertex(mu + 1);
    Point2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    CHECK(T.on_chord(mid));
    CHECK(T.contains(mid));
    double f = 1 - std::ldexp(1.0, -2 * mu);
    CHECK(T.v[3].x == doctest::Approx(f * a.x).epsilon(1e-15));
    CHECK(T.v[3].y == doctest::Approx(f * a.y).epsilon(1e-15));
    CHECK_FALSE(T.contains({0, 0}));
  }
  Trapezoid T2 = trapezoid(P, 2);
  std::vector<double> ys;
  for (const auto& v : T2.v) ys.push_back(v.y);
  std::sort(ys.begin(), ys.end());
  double area = 0;
  for (int k = 0; k + 1 < 4; ++k)
    if (ys[k + 1] > ys[k])
      area += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          [&](double y) { return width_at(T2.v, y); }, ys[k], ys[k + 1]);
  CHECK(std::abs(area - T2.area()) <= 1e-10);
  CHECK_THROWS_AS(trapezoid(P, 9), ContractError);
}

TEST_CASE("Whitney acceptance is an exact lattice test") {
  // shift 1: centres on 2^{j-1} Z^2, so |a - b| counts half sides
  CHECK(whitney_accept(0, 9, 4, 1));    // |c_x - c_y| = 4.5 s
  CHECK_FALSE(whitney_accept(0, 8, 4, 1));  // C0 S touches the diagonal
  CHECK(whitney_accept(0, 32, 4, 1));   // 4 C0 S just touches it
  CHECK_FALSE(whitney_accept(0, 33, 4, 1));
  CHECK(whitney_accept(40, 9, 4, 1));
  CHECK(whitney_accept(0, 4 * 1024 + 1, 4, 10));
}

TEST_CASE("Whitney rectangles cover T_mu off the chord and stay inside") {
  LacPolygon P(6);
  const double alpha = 0.99;
  for (int mu = 1; mu <= 5; ++mu) {
    WhitneyOptions opt;
    opt.depth = 5;
    auto fam = whitney_rectangles(P, mu, 4, alpha, opt);
    REQUIRE_FALSE(fam.rects.empty());
    CHECK(fam.all_inside);
    for (const auto& w : fam.rects) {
      CHECK(whitney_accept(w.square.a, w.square.b, 4, w.square.shift));
      for (const auto& c : w.rect.corners()) CHECK(P.gauge(c) < 1);
    }
    std::vector<Rect2> dil;
    for (const auto& w : fam.rects) dil.push_back(w.rect.dilate(alpha));
    RectIndex idx(dil);

    // sample T_mu by bilinear coordinates; skip the layer below the finest scale
    Trapezoid T = trapezoid(P, mu);
    double s = P.edge_slope(mu);
    double floor_dist = 5.0 * std::ldexp(1.0, fam.j_min);
    std::vector<std::uint32_t> hits;
    int tested = 0, missed = 0;
    for (int i = 0; i <= 60; ++i)
      for (int k = 0; k <= 60; ++k) {
        double u = i / 60.0, t = k / 60.0;
        Point2 o{T.v[0].x + u * (T.v[1].x - T.v[0].x), T.v[0].y + u * (T.v[1].y - T.v[0].y)};
        Point2 in{T.v[3].x + u * (T.v[2].x - T.v[3].x), T.v[3].y + u * (T.v[2].y - T.v[3].y)};
        Point2 p{o.x + t * (in.x - o.x), o.y + t * (in.y - o.y)};
        Point2 v = P.vertex(mu);
        double dist = -(p.y - v.y) / s + (p.x - v.x);
        if (dist < floor_dist) continue;
        ++tested;
        idx.query(p, hits);
        if (hits.empty()) ++missed;
      }
    CHECK(tested > 3000);
    CHECK(missed == 0);
  }
}

TEST_CASE("paraproduct rectangles") {
  Rect2 R2 = paraproduct_rect(2);
  CHECK(R2.I.lo == doctest::Approx(-(15.0 / 16) * std::cos(kPi / 8)).epsilon(1e-15));
  CHECK(R2.I.hi == doctest::Approx(-(3.0 / 4) * std::cos(kPi / 4)).epsilon(1e-15));
  CHECK(R2.J.lo == 0.0);
  CHECK(R2.J.hi == doctest::Approx((15.0 / 16) * std::sin(kPi / 4)).epsilon(1e-15));
  for (int mu = 2; mu < 12; ++mu)
    CHECK(paraproduct_rect(mu).I.lo == paraproduct_rect(mu + 1).I.hi);
  CHECK_THROWS_AS(paraproduct_rect(1), ContractError);

  // As displayed, the corner (x of (1-4^-mu) v_{mu+1}, y of (1-4^-mu) v_mu)
  // leaves the polygon for every mu; the coarser depth convention stays inside.
  LacPolygon P(14);
  for (int mu = 2; mu <= 13; ++mu) {
    Rect2 r = paraproduct_rect(mu);
    CHECK(P.gauge({r.I.lo, r.J.hi}) > 1);
    Rect2 q = paraproduct_rect(mu, 1);
    for (const auto& c : q.corners()) CHECK(P.gauge(c) < 1);
  }
  auto fam = paraproduct_rectangles(2, 5, 0.99);
  CHECK(fam.base.size() == 16);
  CHECK(fam.dilated[0].I.length() == doctest::Approx(fam.base[0].rect.I.length() / 0.99));
}

TEST_CASE("interval families") {
  WhitneyFamily one;
  one.mu = 1;
  WhitneyRect w;
  w.offset = {{0.1, 0.3}, {0.5, 0.6}};
  w.rect = w.offset;
  one.rects.push_back(w);
  auto f = interval_families({one}, 0.99);
  REQUIRE(f.J.size() == 1);
  CHECK(f.J[0][0] == w.offset.I);
  CHECK(f.J[0][1] == w.offset.J);
  CHECK(f.J[0][2] == neg_sum(w.offset.I, w.offset.J));
  for (int i = 0; i < 3; ++i) {
    CHECK(f.I[0][i].contains(f.J[0][i]));
    CHECK(f.I[0][i].length() == doctest::Approx(f.J[0][i].length() / 0.99));
  }

  CHECK(max_overlap({{0, 1}, {1, 2}, {2, 3}}) == 2);  // closed intervals share endpoints
  CHECK(max_overlap({{0, 1}, {1.5, 2}}) == 1);
  CHECK(max_overlap({{0, 10}, {1, 2}, {1.5, 3}, {1.8, 1.9}}) == 4);

  LacPolygon P(10);
  std::vector<WhitneyFamily> fams;
  WhitneyOptions opt;
  opt.depth = 3;
  for (int mu = 1; mu <= 10; ++mu) fams.push_back(whitney_rectangles(P, mu, 4, 0.99, opt));
  auto fam = interval_families(fams, 0.99);
  for (int i = 0; i < 3; ++i) {
    CHECK(fam.overlap[i] >= 1);
    CHECK(fam.overlap[i] <= 10);
  }
  for (const auto& c : fam.connected) CHECK((c[0] && c[1] && c[2]));
  // the first frequency interval is the shortest once s_mu > 1
  for (std::size_t k = 1; k < fam.J.size(); ++k) {
    CHECK(fam.J[k][0].length() < fam.J[k][1].length());
    CHECK(fam.J[k][0].length() < fam.J[k][2].length());
  }
}

TEST_CASE("rectangle index agrees with brute force") {
  Rng rng(3);
  std::uniform_real_distribution<double> U(-1, 1), L(-12, 0);
  std::vector<Rect2> rs;
  for (int k = 0; k < 2000; ++k) {
    double cx = U(rng), cy = U(rng), w = std::exp2(L(rng)), h = std::exp2(L(rng));
    rs.push_back({{cx - w, cx + w}, {cy - h, cy + h}});
  }
  RectIndex idx(rs);
  std::vector<std::uint32_t> hits;
  for (int k = 0; k < 2000; ++k) {
    Point2 p{U(rng), U(rng)};
    idx.query(p, hits);
    std::vector<std::uint32_t> brute;
    for (std::uint32_t i = 0; i < rs.size(); ++i)
      if (rs[i].contains(p)) brute.push_back(i);
    CHECK(hits == brute);
  }
  auto cmp = side_comparability(rs);
  double m2 = 1;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t k = i + 1; k < rs.size(); ++k)
      if (rs[i].meets(rs[k])) {
        ++pairs;
        double a = rs[i].I.length() / rs[k].I.length(), b = rs[i].J.length() / rs[k].J.length();
        m2 = std::max({m2, a, 1 / a, b, 1 / b});
      }
  CHECK(cmp.pairs == pairs);
  CHECK(cmp.M2 == doctest::Approx(m2).epsilon(1e-15));
}

TEST_CASE("partition normalization") {
  Rect2 R{{0, 1}, {0, 2}};
  PartitionOfUnity single({R}, 0.9);
  Rng rng(5);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 200; ++k) {
    Rect2 in = R.dilate(0.9);
    Point2 p{in.I.lo + U(rng) * in.I.length(), in.J.lo + U(rng) * in.J.length()};
    CHECK(single.total(p) == 1.0);
  }
  CHECK(single.total({2, 2}) == 0.0);

  // symmetric steps take the value 1/2 in the middle of the transition band
  const double a = 0.8;
  Rect2 A{{-1, 1}, {-1, 1}};  // x-band [0.8, 1], y on the plateau
  Point2 p{0.9, 0.0};
  Rect2 B{{p.x - 0.1, p.x + 1.9}, {p.y - 0.1, p.y + 1.9}};  // p mid-band in x and y
  PartitionOfUnity pu({A, B}, a);
  CHECK(pu.eta(0, p) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pu.eta(1, p) == doctest::Approx(0.25).epsilon(1e-14));
  auto terms = pu.evaluate(p);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].psi == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(terms[1].psi == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("hypothesis check on a small polygon collection") {
  PolygonCollectionOptions opt;
  opt.mu_max = 3;
  opt.whitney.depth = 3;
  auto C = polygon_collection(opt);
  CHECK(C.rects.size() == 1 + C.n_whitney + C.n_paraproduct);
  Rng rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<Point2> S;
  while (S.size() < 3000) {
    Point2 p{U(rng), U(rng)};
    if (C.polygon.gauge(p) < 1) S.push_back(p);
  }
  auto rep = check_hypotheses(
      C.rects, opt.alpha, [&](Point2 p) { return C.polygon.gauge(p); }, S,
      [&](Point2 p) { return C.resolved(p); });
  CHECK(rep.covered());
  CHECK(rep.excluded < S.size() / 10);
  CHECK(rep.touching >= 1);   // S_0 meets the boundary at its corners
  CHECK_FALSE(rep.contained());  // the displayed paraproduct rectangles protrude
  CHECK(rep.violations().find("(1)") != std::string::npos);

  PartitionOfUnity pu(C.rects, opt.alpha);
  for (const auto& p : S)
    if (C.resolved(p)) CHECK(std::abs(pu.total(p) - 1) <= 1e-12);
  for (const auto& t : pu.evaluate({-0.8, 0.2})) {
    CHECK(t.psi >= 0);
    CHECK(t.psi <= 1);
  }
  CHECK(pu.total({1.2, 0}) == 0.0);
}

TEST_CASE("sampled partition total matches pointwise evaluation") {
  PolygonCollectionOptions opt;
  opt.mu_max = 4;
  opt.whitney.depth = 3;
  auto C = polygon_collection(opt);
  PartitionOfUnity pu(C.rects, opt.alpha);
  const int nx = 61, ny = 47;
  const double step = 2.0 / 64;
  auto grid = pu.sample_total({-0.97, -0.73}, step, nx, ny);
  REQUIRE(grid.size() == std::size_t(nx) * ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      CHECK(grid[std::size_t(iy) * nx + ix] == pu.total({-0.97 + ix * step, -0.73 + iy * step}));
}
