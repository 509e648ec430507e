// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bfr/ensemble.hpp"
#include "bfr/geometry.hpp"
#include "bfr/grid.hpp"
#include "bfr/partition.hpp"

namespace bfr {

// A bilinear Fourier multiplier m(a, b) on integer frequency pairs.
struct Symbol2D {
  enum class Kind { Indicator, Table, Closed };

  Kind kind = Kind::Closed;
  std::string name;
  std::function<cplx(long, long)> eval;
  double sup = 0;  // recorded sup |m|
  // m vanishes unless |a|, |b| <= box; < 0 means no such bound
  long box = -1;

  cplx operator()(long a, long b) const { return eval(a, b); }

  static Symbol2D one();
  static Symbol2D closed(std::string name, std::function<cplx(long, long)> m, double sup,
                         long box = -1);
  static Symbol2D indicator(std::string name, std::function<bool(long, long)> in, long box = -1);
  // dense copy of m on [-band, band]^2, zero outside; sup recomputed
  static Symbol2D tabulate(const Symbol2D& m, long band);
};

struct BilinearInfo {
  std::size_t pairs = 0;      // mode pairs visited
  double wrapped_mass = 0;    // sum |f_a g_b m| over pairs with a+b outside the band, relative
  bool aliased = false;       // wrapped_mass above 1e-12
};

enum class Kernel { Serial, Parallel };

// h^(t) = sum_{a+b=t} f^(a) g^(b) m(a, b). Pairs leaving the band are folded
// back mod N (what the grid product does) and reported in `info`. Modes below
// 1e-15 of the largest coefficient are skipped.
GridFunction bilinear_apply(const Symbol2D& m, const GridFunction& f, const GridFunction& g,
                            BilinearInfo* info = nullptr, Kernel kernel = Kernel::Parallel);

// i pi sgn(s a - b - offset), sgn(0) = 0 up to a relative 1e-12
Symbol2D hs_symbol(double s, double offset = 0.0);
GridFunction hs_apply(double s, const GridFunction& f, const GridFunction& g,
                      BilinearInfo* info = nullptr);

// Polygon coordinates of the frequency lattice: p = scale * (a, b).
struct LacLattice {
  double scale = 1.0;
  static LacLattice for_grid(std::size_t n) { return {4.0 / static_cast<double>(n)}; }
  Point2 map(long a, long b) const { return {scale * a, scale * b}; }
  long band() const;  // largest |n| with scale*|n| <= 1
};

Symbol2D lac_symbol(const geometry::LacPolygon& P, LacLattice lat);
GridFunction lac_apply(const geometry::LacPolygon& P, const GridFunction& f, const GridFunction& g,
                       BilinearInfo* info = nullptr);
GridFunction lac_apply(const geometry::LacPolygon& P, LacLattice lat, const GridFunction& f,
                       const GridFunction& g, BilinearInfo* info = nullptr);

// sum of psi_R over rectangles first <= R < last, on the lattice
Symbol2D partition_symbol(const geometry::PartitionOfUnity& pu, LacLattice lat, std::size_t first,
                          std::size_t last);

// chi_P against psi_{S_0} + sum psi_{Whitney} + sum psi_{paraproduct}, on the
// lattice points the truncated collection resolves.
struct DecompositionCheck {
  std::size_t lattice_points = 0;  // inside the lattice box
  std::size_t unresolved = 0;
  std::size_t mismatched = 0;      // resolved points with |chi - sum psi| > 1e-9
  double symbol_max_diff = 0;      // over resolved points
  double op_residual = 0;          // relative L2, operators restricted to resolved points
};
DecompositionCheck decomposition_check(const geometry::PolygonCollection& C, LacLattice lat,
                                       const GridFunction& f, const GridFunction& g);

// integral of T_m(f, g) h computed on the frequency side:
// L * sum_{a+b+c=0} f^(a) g^(b) h^(c) m(a, b)
cplx trilinear_form(const Symbol2D& m, const GridFunction& f, const GridFunction& g,
                    const GridFunction& h);
// integral of f g h
cplx product_integral(const GridFunction& f, const GridFunction& g, const GridFunction& h);

// A line l through (xi, eta, theta) with direction (1, s, -1-s), and the
// intervals I^1, I^2, I^3 = -I^1 - I^2. Frequencies are integers; s = |I^2|/|I^1|.
struct LineData {
  int mu = 0;
  double s = 1;
  long xi = 0, eta = 0, theta = 0;
  Interval I[3];

  static LineData make(int mu, Interval I1, Interval I2, long xi, long eta);
  double offset() const { return s * static_cast<double>(xi) - static_cast<double>(eta); }
  // the line (projected to the (xi, eta) plane) meets I^1 x I^2
  bool meets_rectangle() const;
  // another base point on the same line; s*t must be an integer
  LineData moved(long t) const;
  // intervals and base point shifted by t(1, s, -1-s); s*t must be an integer
  LineData translated(long t) const;
  void validate() const;
};

// f^i: spectrum times a plateau bump equal to 1 on the middle half of I
GridFunction localize(const GridFunction& f, const Interval& I);

// integral of H_s(M_xi f^1, M_eta f^2) M_theta f^3, through hs_apply
cplx trilinear_lambda(const LineData& ld, const GridFunction& f1, const GridFunction& f2,
                      const GridFunction& f3);
// the same value from the frequency-side sum with the shifted half-plane symbol
cplx trilinear_lambda_direct(const LineData& ld, const GridFunction& f1, const GridFunction& f2,
                             const GridFunction& f3);

// ---- empirical operator-norm scans ----

using BilinearOp = std::function<GridFunction(const GridFunction&, const GridFunction&)>;

enum class Ensemble { RestrictedType, BandLimited };

struct ScanOptions {
  double p1 = 2, p2 = 4, p3 = 4;
  Ensemble ensemble = Ensemble::RestrictedType;
  int trials = 50;
  std::uint64_t seed = 1;
  std::size_t n = 512;
  double length = 1.0;
  // restricted type: E_i is a union of `intervals` pieces of length <= max_len * L,
  // phases constant on cells of phase_cell * L (fixed in x, so refinement keeps the input)
  int intervals = 6;
  double max_len = 0.15;
  double phase_cell = 1.0 / 64;
  long band = 32;  // band-limited ensemble
};

struct ScanRecord {
  std::uint64_t seed = 0;
  double ratio = 0;
};

struct ScanStats {
  ScanOptions options;
  std::vector<ScanRecord> records;  // trial order
  int skipped = 0;                  // zero-norm inputs
  double max = 0, q50 = 0, q90 = 0;
};

// ||op(f, g)||_{p3'} / (||f||_{p1} ||g||_{p2}); requires 1/p1 + 1/p2 + 1/p3 = 1
ScanStats norm_scan(const BilinearOp& op, const ScanOptions& opt);
// one row per trial: seed,p1,p2,p3,N,ratio
void write_scan(std::ostream& os, const ScanStats& s);

}  // namespace bfr
