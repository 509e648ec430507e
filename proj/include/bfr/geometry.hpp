// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bfr/bump.hpp"
#include "bfr/core.hpp"

namespace bfr::geometry {

// Quadrant images of second-quadrant geometry: Q2 is the identity, Q1 flips
// x, Q3 flips y, Q4 flips both.
enum class Quadrant { Q1 = 1, Q2 = 2, Q3 = 3, Q4 = 4 };
Point2 reflect(Point2 p, Quadrant q);

struct Rect2 {
  Interval I;  // abscissa
  Interval J;  // ordinate

  bool contains(Point2 p) const { return I.contains(p.x) && J.contains(p.y); }
  bool meets(const Rect2& o) const { return I.meets(o.I) && J.meets(o.J); }
  Rect2 dilate(double a) const { return {I.dilate(a), J.dilate(a)}; }
  std::array<Point2, 4> corners() const {
    return {{{I.lo, J.lo}, {I.hi, J.lo}, {I.hi, J.hi}, {I.lo, J.hi}}};
  }
  Rect2 reflected(Quadrant q) const;
};

// Lacunary polygon truncated at depth mu_max: second-quadrant vertices
// v_mu = (cos(pi - pi 2^-mu), sin(pi - pi 2^-mu)), 1 <= mu <= mu_max + 1,
// closed by the chord from v_{mu_max+1} to (-1, 0); other quadrants by symmetry.
class LacPolygon {
 public:
  explicit LacPolygon(int mu_max);

  int mu_max() const { return mu_max_; }
  Point2 vertex(int mu) const;  // second quadrant
  // vertex relative to (-1, 0): (1 - cos(pi 2^-mu), sin(pi 2^-mu)), full precision
  Point2 vertex_offset(int mu) const;
  // second-quadrant chain v_1..v_{mu_max+1}, (-1,0)
  std::vector<Point2> chain() const;
  // closed counter-clockwise boundary of the whole polygon
  std::vector<Point2> boundary() const;

  // Minkowski gauge: p is in the closed polygon iff gauge(p) <= 1
  double gauge(Point2 p) const;
  bool contains(Point2 p, double tol = 1e-12) const { return gauge(p) <= 1.0 + tol; }

  // slope of l_mu (chord v_mu v_{mu+1}), computed without cancellation
  double edge_slope(int mu) const;

 private:
  int mu_max_;
  std::vector<Point2> normals_;  // outward unit normals of the chain edges
  std::vector<double> offsets_;  // support values n . a
};

// T_mu: inside U_mu between (1 - 4^-mu) P and P.
// Vertices: v_mu, v_{mu+1}, (1-4^-mu) v_{mu+1}, (1-4^-mu) v_mu.
struct Trapezoid {
  int mu = 1;
  std::array<Point2, 4> v;
  bool contains(Point2 p, double tol = 1e-12) const;
  // on the outer chord l_mu
  bool on_chord(Point2 p, double tol = 1e-12) const;
  double area() const;  // shoelace
};
// depth_shift k uses (1 - 4^{k-mu}) in place of (1 - 4^{-mu}); 0 is the
// displayed definition.
Trapezoid trapezoid(const LacPolygon& P, int mu, int depth_shift = 0);
double trapezoid_depth(int mu, int depth_shift = 0);  // 4^{k-mu}

struct WhitneyOptions {
  int lattice_shift = 1;  // centers on 2^{j - shift} Z^2
  int depth = 6;          // number of dyadic scales below the coarsest admissible
  int depth_shift = 0;    // trapezoid depth convention, see trapezoid()
};

struct WhitneySquare2 {
  int j = 0;     // side 2^j
  long a = 0;    // center = (a, b) 2^{j - shift}
  long b = 0;
  int shift = 1;
  double side() const;
  Point2 center() const;
};
// C0 S misses the diagonal and 4 C0 S meets it (exact integer test)
bool whitney_accept(long a, long b, int C0, int shift);

struct WhitneyRect {
  Rect2 rect;    // absolute coordinates
  Rect2 offset;  // x measured from -1 (second quadrant, full precision)
  WhitneySquare2 square;
  int mu = 1;
  Quadrant quadrant = Quadrant::Q2;
};

struct WhitneyFamily {
  int mu = 1;
  int C0 = 4;
  double alpha = 0.99;
  int j_min = 0, j_max = 0;
  std::vector<WhitneyRect> rects;  // second quadrant
  bool all_inside = true;          // every rectangle corner inside the polygon
  std::size_t outside_count = 0;
};

// All R_{S,mu} = v_mu + L2(S) (L2(x, y) = (-x, -s_mu y)) whose alpha-dilate
// meets T_mu, for Whitney squares within the configured scale range.
WhitneyFamily whitney_rectangles(const LacPolygon& P, int mu, int C0, double alpha,
                                 const WhitneyOptions& opt = {});

// R_mu for mu >= 2, second quadrant; depth_shift = 0 is the displayed formula
// [-(1-4^-mu) cos(pi 2^{-mu-1}), -(1-4^{1-mu}) cos(pi 2^-mu)] x [0, (1-4^-mu) sin(pi 2^-mu)].
Rect2 paraproduct_rect(int mu, int depth_shift = 0);
struct ParaproductRect {
  Rect2 rect;
  int mu = 2;
  Quadrant quadrant = Quadrant::Q2;
};
struct ParaproductFamily {
  std::vector<ParaproductRect> base;  // R_mu in all four quadrants
  std::vector<Rect2> dilated;         // (1/alpha) R_mu, same order
};
ParaproductFamily paraproduct_rectangles(int mu_lo, int mu_hi, double alpha,
                                         int depth_shift = 0);

// Interval families J_mu^i (unions of projections) and I_mu^i = J/alpha.
// Stored in offset coordinates: J^1 as x + 1, J^2 as y, J^3 as theta - 1,
// which keeps full relative precision for large mu.
struct IntervalFamily {
  double alpha = 0.99;
  std::vector<int> mus;
  std::vector<std::array<Interval, 3>> J;
  std::vector<std::array<Interval, 3>> I;
  std::vector<std::array<bool, 3>> connected;  // union of projections is one interval
  std::array<int, 3> overlap{0, 0, 0};         // max point multiplicity of (I_mu^i)_mu
};
IntervalFamily interval_families(const std::vector<WhitneyFamily>& fams, double alpha);
// max number of intervals sharing a point (closed intervals), exact sweep
int max_overlap(const std::vector<Interval>& v);

std::string describe(const Rect2& r);
void write_rects(std::ostream& os, const std::vector<WhitneyRect>& rects);

}  // namespace bfr::geometry
