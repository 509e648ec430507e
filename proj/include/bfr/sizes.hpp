// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "bfr/bilinear.hpp"
#include "bfr/bump.hpp"
#include "bfr/cutoff.hpp"
#include "bfr/grid.hpp"
#include "bfr/timefreq.hpp"

// Sizes of trees, exceptional layers and the model sum. Frequencies are
// physical (n / L); tile boxes are read in L_mu coordinates.
namespace bfr::sizes {

// ---- canonical multipliers ----

struct FamilyParams {
  int members = 3;       // plateau shifts 0, -1/2, +1/2, -1/4, +1/4, ...
  int order = 3;         // derivative order M checked (capped by the step smoothness)
  int smoothness = -1;   // r of the plateau step; -1 = C^inf
  double half_width = 4.5;  // support [-4.5, 4.5] + shift, in units of |omega|
  double plateau = 0.5;     // plateau fraction of the support
};

// m_k(z) = kappa_k b_k((z - c(w))/|w| - shift_k) tanh((z - xi)/|w|).
// kappa_k is chosen from Leibniz bounds so that |m| <= |z - xi|/|w| and
// |m^(k)| <= |w|^{-k} for 1 <= k <= order, for every w and xi; support in 10 w.
class CanonicalFamily {
 public:
  explicit CanonicalFamily(FamilyParams p = {});

  std::size_t size() const { return bumps_.size(); }
  int order() const { return order_; }
  const FamilyParams& params() const { return params_; }
  double kappa(std::size_t k) const { return kappa_[k]; }

  double eval(std::size_t k, const Interval& w, double xi, double z) const;
  // exact k-th derivative in z (Leibniz over the bump and tanh jets)
  double derivative(std::size_t k, int order, const Interval& w, double xi, double z) const;

  // largest violation of the three constraints on a dense sample of 20 w
  // (0 when all hold); used by tests and the config validator
  double check(const Interval& w, double xi, int samples = 4001) const;

 private:
  FamilyParams params_;
  int order_;
  std::vector<PlateauBump> bumps_;  // unit |w|, centered at 0 + shift
  std::vector<double> kappa_;
};

// (1 + dist(x, c(I)) / |I|)^{-1}, distance periodic on the grid window
double chi_tilde_periodic(const Interval& I, double x, double length);

// Caches pi_m f per (w, xi, member) and seminorm values per (I, w, xi).
class SizeContext {
 public:
  SizeContext(GridFunction f, CanonicalFamily fam);

  const GridFunction& f() const { return f_; }
  const CanonicalFamily& family() const { return fam_; }

  // sup over the family of || chi~_I^10 pi_m f ||_2
  double seminorm(const Interval& I, const Interval& w, double xi);

 private:
  using Key = std::tuple<double, double, double>;
  const std::vector<std::vector<double>>& filtered(const Interval& w, double xi);

  GridFunction f_;
  CanonicalFamily fam_;
  std::mutex mutex_;
  std::map<Key, std::shared_ptr<std::vector<std::vector<double>>>> filtered_;  // |pi_m f|^2
  std::map<std::tuple<double, double, double, double, double>, double> seminorms_;
};

double tile_seminorm(SizeContext& ctx, const Interval& I, const Interval& w, double xi);

struct TreeSize {
  double sum_term = 0;  // (|I_T|^-1 sum_p ||f||_{P_i, xi_i}^2)^{1/2}
  double top_term = 0;  // |I_T|^{-1/2} sup_m ||chi~_{I_T}^10 pi_m f||_2 on omega_{i,T}
  double value() const { return sum_term + top_term; }
};
// i in {0, 1, 2}
TreeSize tree_size(SizeContext& ctx, const tf::TileSet& P, const tf::Tree& T, int i);

struct SizeReport {
  int i = 0;
  double value = 0;
  TreeSize achieved;
  double t = 0;  // achieving top data
  Interval I;
  std::size_t tops = 0;  // top data scanned
  std::size_t family = 0;
  std::size_t n = 0;  // grid size
};
// max of tree_size over the maximal trees of `members` at the top-data grid
// {(center of omega~_k(p), I_p)}
SizeReport max_size(SizeContext& ctx, const tf::TileSet& P, const std::vector<std::uint32_t>& members,
                    int i);
void write_size_report(std::ostream& os, const std::string& id, const SizeReport& r);

// ---- exceptional set and layers ----

// {x : M_1(1_E)(x) > lambda |E|} as a union of grid cells
std::vector<Interval> exceptional_set(const std::vector<Interval>& E, std::size_t n, double length,
                                      double origin, double lambda = 100);

struct ExceptionalLayers {
  std::vector<Interval> omega;
  std::vector<int> layer;  // per tile of P (-1 for non-members)
  std::vector<std::vector<std::uint32_t>> members;  // members[l]
  int max_layer() const { return static_cast<int>(members.size()) - 1; }
};
// l = 0: I meets the complement of Omega; l >= 1: 4^{l-1} I inside Omega and
// 4^l I meets its complement
ExceptionalLayers exceptional_layers(const tf::TileSet& P, const std::vector<std::uint32_t>& members,
                                     const std::vector<Interval>& omega);

// ---- frequency filter ----

struct FilterResult {
  std::vector<std::uint32_t> kept;
  std::size_t disjoint = 0;   // some omega_{P_i} misses J^i
  std::size_t oversized = 0;  // some |omega_{P_i}| > C |J^i|
};
FilterResult frequency_filter(const tf::TileSet& P, const std::vector<std::uint32_t>& members,
                              const std::array<Interval, 3>& J, double C);
// J^i = I^i - (xi, eta, theta)_i
std::array<Interval, 3> shifted_intervals(const LineData& ld);

// pi_w(M_xi f_mu) against pi_w pi_mu (M_xi f), relative L2 difference
double composition_residual(const GridFunction& f, const Interval& I, long xi, const Interval& w);

// ---- model sum ----

struct ModelOptions {
  XiParams xi{4, 1.0};        // chi_{I,j} = 1_I * Xi at scale |I|
  double plateau = 0.5;       // pi_w: plateau bump on w with this plateau fraction
  StepShape shape = StepShape::smooth();
};

// fixed operators pi_w, shared by equal intervals
GridFunction model_projection(const GridFunction& f, const Interval& w, const ModelOptions& o);

// sum_{p in members} integral chi_{I_p, j_p} prod_i pi_{omega_{P_i}} g^i
cplx model_inner(const tf::TileSet& P, const std::vector<std::uint32_t>& members,
                 const std::array<GridFunction, 3>& g, const ModelOptions& o = {});
// per tile, in member order
std::vector<cplx> model_terms(const tf::TileSet& P, const std::vector<std::uint32_t>& members,
                              const std::array<GridFunction, 3>& g, const ModelOptions& o = {});

struct ModelStream {
  LineData line;
  tf::TileSet tiles;
  std::vector<std::uint32_t> members;
};
// g^i_mu = M_{base_i} (f^i localized to I^i)
std::array<GridFunction, 3> stream_inputs(const LineData& ld, const GridFunction& f1,
                                          const GridFunction& f2, const GridFunction& f3);
// sum_mu | model_inner over the stream |
double model_sum(const std::vector<ModelStream>& streams, const GridFunction& f1,
                 const GridFunction& f2, const GridFunction& f3, const ModelOptions& o = {});

// ---- single-tree audit ----

struct TreeAudit {
  double lhs = 0;
  std::array<double, 3> size{};  // size*_i(T)
  double rhs = 0;                // |I_T| prod size*_i^theta_i
  double ratio = 0;              // lhs / rhs (0 when both vanish)
};
TreeAudit single_tree_audit(const tf::TileSet& P, const tf::Tree& T,
                            const std::array<GridFunction, 3>& g, std::array<double, 3> theta,
                            const FamilyParams& fam = {}, const ModelOptions& o = {});
// the same with the members of T restricted to `sub`, sizes still over T
TreeAudit subtree_audit(const tf::TileSet& P, const tf::Tree& T, const std::vector<std::uint32_t>& sub,
                        const std::array<GridFunction, 3>& g, std::array<double, 3> theta,
                        const FamilyParams& fam = {}, const ModelOptions& o = {});

// ---- Bessel records ----

struct BesselLevel {
  int n = 0;
  std::size_t trees = 0;
  double bessel = 0;  // sum |I_T|
  double ratio = 0;   // bessel / (2^{2n} norm), norm given by the caller
};
std::vector<BesselLevel> bessel_levels(const tf::ForestDecomposition& d, double norm);

}  // namespace bfr::sizes
