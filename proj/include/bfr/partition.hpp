// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bfr/bump.hpp"
#include "bfr/geometry.hpp"

namespace bfr::geometry {

// Point location for rectangles spanning many scales and aspect ratios:
// one hash grid per (log2 width, log2 height) class, so every rectangle
// touches at most 3x3 cells of its own grid.
class RectIndex {
 public:
  RectIndex() = default;
  explicit RectIndex(const std::vector<Rect2>& rects);

  // indices of rectangles whose closure contains p
  void query(Point2 p, std::vector<std::uint32_t>& out) const;
  std::size_t size() const { return n_; }

 private:
  struct Level {
    int lx, ly;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells;
  };
  const std::vector<Rect2>* rects_ = nullptr;
  std::vector<Level> levels_;
  std::size_t n_ = 0;
};

struct HypothesisReport {
  // (1) every R inside Omega; corners on the boundary are counted as touching
  std::size_t protruding = 0;
  std::size_t touching = 0;
  double max_gauge = 0;
  std::string containment_witness;
  // (2) Omega = union of alpha R, on sample points
  std::size_t samples = 0;
  std::size_t excluded = 0;  // inside truncation layers, not tested
  std::size_t uncovered = 0;
  Point2 uncovered_witness{};
  // (3) bounded point overlap
  int M1 = 0;
  int M1_bound = 0;
  // (4) intersecting rectangles have comparable sides
  double M2 = 0;
  double M2_bound = 0;
  std::string comparability_witness;

  bool contained() const { return protruding == 0; }
  bool covered() const { return uncovered == 0; }
  bool overlap_ok() const { return M1 <= M1_bound; }
  bool comparable() const { return M2 <= M2_bound; }
  bool ok() const { return contained() && covered() && overlap_ok() && comparable(); }
  // names the violated hypotheses, "" when all pass
  std::string violations() const;
};

// Normalization: psi_R = eta_R / sum eta, eta_R a tensor plateau
// bump equal to 1 on alpha R and vanishing off R.
class PartitionOfUnity {
 public:
  PartitionOfUnity(std::vector<Rect2> rects, double alpha, StepShape shape = StepShape::smooth());

  const std::vector<Rect2>& rects() const { return rects_; }
  double alpha() const { return alpha_; }

  double eta(std::size_t i, Point2 p) const;
  struct Term {
    std::uint32_t index;
    double eta;
    double psi;
  };
  std::vector<Term> evaluate(Point2 p) const;
  double total(Point2 p) const;  // sum of psi_R(p); 0 where no eta is positive
  int multiplicity(Point2 p) const;  // number of closed R containing p
  bool alpha_covered(Point2 p) const;

  // sum of psi on an axis-aligned sample grid, row-major (x fastest)
  std::vector<double> sample_total(Point2 origin, double step, int nx, int ny) const;

 private:
  std::vector<Rect2> rects_;
  double alpha_;
  StepShape shape_;
  std::vector<PlateauBump> bx_, by_;
  RectIndex index_;
};

struct HypothesisOptions {
  int M1_bound = 64;
  double M2_bound = 64;
  double touch_tol = 1e-12;
};

// `gauge` <= 1 defines the closed domain; `resolved(p)` false marks sample
// points inside layers removed by truncation.
HypothesisReport check_hypotheses(const std::vector<Rect2>& rects, double alpha,
                                  const std::function<double(Point2)>& gauge,
                                  const std::vector<Point2>& samples,
                                  const std::function<bool(Point2)>& resolved,
                                  const HypothesisOptions& opt = {});

// max side ratio over intersecting pairs (closed rectangles); sweep over x
struct ComparabilityResult {
  double M2 = 1;
  std::size_t a = 0, b = 0;
  std::size_t pairs = 0;
};
ComparabilityResult side_comparability(const std::vector<Rect2>& rects,
                                       const std::vector<bool>& skip = {});

// The full collection C = S_0 + R~ + R~'' for the truncated polygon.
struct PolygonCollectionOptions {
  int mu_max = 8;
  int C0 = 4;
  double alpha = 0.99;
  WhitneyOptions whitney{};
  int paraproduct_mu_max = -1;  // -1: mu_max + 1
};
struct PolygonCollection {
  LacPolygon polygon{1};
  PolygonCollectionOptions options;
  std::vector<Rect2> rects;  // S_0 first, then Whitney, then paraproduct dilates
  std::size_t n_whitney = 0, n_paraproduct = 0;
  std::vector<int> j_min;    // finest Whitney scale per mu (index mu-1)
  // false inside layers represented only by omitted (finer or deeper) rectangles
  bool resolved(Point2 p) const;
};
PolygonCollection polygon_collection(const PolygonCollectionOptions& opt);

}  // namespace bfr::geometry
