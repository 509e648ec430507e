// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfr/core.hpp"
#include "bfr/ensemble.hpp"

namespace bfr::tf {

// Constants of the tile model. published() keeps the published ones; desk()
// shrinks them so that several scales fit inside a grid of a few thousand
// points (the omega-bar nesting is then not enforced).
struct TileParams {
  int C0 = 4;
  int lattice_bits = 10;   // cube centers in 2^{j - bits} Z^3
  int J = 14;              // scale separation exponent of a sparse class
  double dilation = 1000;  // omega-bar contains dilation * omega
  double nest = 10;        // nesting factor in the omega-bar property
  double slack = 0.01;     // enlargement per side, fraction of |dilation * omega|
  bool enforce_nesting = true;
  int retry_budget = 64;   // enlargement passes per interval

  static TileParams published() { return {}; }
  static TileParams desk();
};

// Cube of side 2^j centered at 2^{j - bits} n.
struct WhitneyCube3 {
  int j = 0;
  std::array<long, 3> n{};
  int bits = 10;

  double side() const;
  double center(int i) const;
  Interval omega(int i) const;
  // max_i n_i - min_i n_i; c Q meets the diagonal iff spread <= c 2^bits
  long spread() const;
  auto operator<=>(const WhitneyCube3&) const = default;
};

// Euclidean distance from p to the line {(t, t, t)}
double diagonal_distance(const std::array<double, 3>& p);
// c Q meets {(t, t, t)}: the three coordinate ranges share a t
bool dilate_meets_diagonal(const WhitneyCube3& q, double c);
// C0 Q misses the diagonal and 10 C0 Q meets it; integer arithmetic
bool whitney3_accept(const WhitneyCube3& q, int C0);

// every accepted cube with lo <= j <= hi whose center coordinates lie in
// [f_lo, f_hi]; throws when more than max_count would be produced
std::vector<WhitneyCube3> whitney_cubes3(int C0, int j_lo, int j_hi, double f_lo, double f_hi,
                                         int bits, std::size_t max_count = 1u << 22);

// ---- sparse subcollections ----

// Pairwise form of the sparseness conditions, with the scale condition read as
// |w| < |w'| => 2^J |w| <= |w'|. Empty when the pair is compatible.
std::string sparse_conflict(const WhitneyCube3& a, const WhitneyCube3& b, int J);
// first violating pair of a collection, "" if sparse
std::string sparse_violation(const std::vector<WhitneyCube3>& cubes, int J);

struct SparseClasses {
  std::vector<int> cls;                       // class of each input cube
  std::vector<std::vector<std::size_t>> members;
  int count() const { return static_cast<int>(members.size()); }
};
// class = (j mod J, greedy colour among same-scale conflicts); duplicates rejected
SparseClasses sparsify(const std::vector<WhitneyCube3>& cubes, int J);

// ---- enlarged intervals ----

using Bars = std::array<Interval, 3>;

class EnlargementError : public std::runtime_error {
 public:
  EnlargementError(const std::string& what, std::size_t small, std::size_t big)
      : std::runtime_error(what), small_cube(small), big_cube(big) {}
  std::size_t small_cube, big_cube;
};

Interval scaled_about_center(const Interval& w, double c);

// bar_i contains dilation*omega_i, at most slack*|dilation*omega_i| wider per
// side, and: diam Q < diam Q', nest*bar_i meets bar'_j => nest*bar_k inside bar'_j for all k.
std::vector<Bars> enlarge_omegas(const std::vector<WhitneyCube3>& sparse, const TileParams& p);

struct NestingReport {
  std::size_t pairs = 0, violations = 0;
  std::string witness;
  double min_ratio = 0, max_ratio = 0;  // |bar_i| / |omega_i|
  bool ok() const { return violations == 0; }
};
NestingReport check_nesting(const std::vector<WhitneyCube3>& cubes, const std::vector<Bars>& bars,
                            const TileParams& p);

// ---- multi-tiles ----

struct Box {
  WhitneyCube3 cube;
  Bars omega_t, bar_t;  // Whitney coordinates
  Bars omega, bar;      // after L_mu = diag(1, s, -1-s)
};

struct MultiTile {
  int mu = 0;
  std::uint32_t box = 0;
  int j = 0;  // |I| = 2^-j
  Interval I;
  Bars bar_t;  // copied from the box; orders are decided in Whitney coordinates
  double length() const { return I.length(); }
};

struct TileSet {
  int mu = 0;
  double s = 1;
  TileParams params;
  std::vector<Box> boxes;
  std::vector<MultiTile> tiles;
};

Interval apply_L(const Interval& w, int i, double s);

// every (I, L_mu(Q)) with |I| |omega_1| = 1 and I a dyadic interval inside window
TileSet build_multitiles(int mu, double s, const std::vector<WhitneyCube3>& cubes,
                         const std::vector<Bars>& bars, Interval window, const TileParams& p);
// boxes only; tiles added by the caller
TileSet make_boxes(int mu, double s, const std::vector<WhitneyCube3>& cubes,
                   const std::vector<Bars>& bars, const TileParams& p);

// P_i <= Q_k: I_P inside I_Q and bar(P_i) contains bar(Q_k)
bool tile_leq(const MultiTile& p, int i, const MultiTile& q, int k);
// some i with P_i <= Q_i; throws for different mu
bool order_leq(const MultiTile& p, const MultiTile& q);
// some i with bar(P_i) containing bar(Q_i); throws for different mu
bool order_lessdot(const MultiTile& p, const MultiTile& q);

struct RegularityReport {
  bool regular = true;
  std::uint32_t a = 0, b = 0;  // a <. b with E_a not inside E_b
};
RegularityReport is_regular(const TileSet& P, const std::vector<std::uint32_t>& members);

// ---- trees ----

struct Tree {
  int mu = 0;
  double t = 0;  // top frequency xi = L_mu(t, t, t)
  Interval I;
  std::vector<std::uint32_t> members;

  // omega_{i,T}: centered at xi_i, length (1, s, 1+s)_i / |I|
  Interval omega(int i, double s) const;
  double xi(int i, double s) const;
  // [t - dilation/(2|I|), t + dilation/(2|I|)], Whitney coordinates
  Interval bar(double dilation) const;
};

// tiles of P (alive[k] != 0) with I_p inside I and bar(t, I) inside some bar(P_i);
// nullopt when empty
std::optional<Tree> maximal_tree(const TileSet& P, const std::vector<char>& alive, double t,
                                 Interval I);

struct TopData {
  double t = 0;
  Interval I;
  std::uint32_t source = 0;  // the tile proposing it
};
// (center of omega_i(p), I_p) for alive p and each i, ordered by |I|
// descending, then t, then I.lo
std::vector<TopData> candidate_tops(const TileSet& P, const std::vector<char>& alive);

// Greedy selection: at each step the first candidate whose source is alive,
// its maximal tree in the remaining tiles removed.
std::vector<Tree> greedy_select(const TileSet& P, const std::vector<std::uint32_t>& members);

struct UnionCheck {
  std::size_t triples = 0;     // (p', p'', p) with p' <= p'' <= p and strict lengths
  std::size_t violations = 0;
  std::string witness;
};
// For every range S = T_k..T_l: p, p' in S, p' <= p'' <= p, |I_p'| < |I_p''| < |I_p| => p'' in S.
UnionCheck consecutive_union_check(const TileSet& P, const std::vector<std::uint32_t>& members,
                                   const std::vector<Tree>& trees);

// T~ = T n S n S' split below its <=-maximal tiles
struct SubtreePartition {
  std::vector<Tree> parts;
  double top_length = 0;  // sum |I_{p(i)}|
  bool partitions = true; // every tile of T~ in exactly one part
};
SubtreePartition subtree_regular_partition(const TileSet& P, const Tree& T,
                                           const std::vector<char>& inS,
                                           const std::vector<char>& inS2);

// ---- forests ----

struct Forest {
  int n = 0;  // trees selected above 2^{-n-1}; their sizes are <= 2^{-n}
  std::vector<Tree> trees;
  std::vector<double> sizes;
  double bessel = 0;  // sum |I_T|
};
struct ForestDecomposition {
  double initial_size = 0;
  int n0 = 0;
  std::vector<Forest> forests;
  std::size_t residual = 0;  // tiles left when the level budget ran out
};
// Size-increment selection over the candidate top data. P must be regular.
ForestDecomposition forest_decompose(const TileSet& P, const std::vector<std::uint32_t>& members,
                                     const std::function<double(const Tree&)>& size,
                                     int max_levels = 40);

// ---- random regular collections ----

struct RegularCollectionOptions {
  int mu = 1;
  double s = 2;
  int scales = 3;          // cube scales 0, J, 2J, ...
  int boxes_per_scale = 3;
  int intervals_per_box = 8;  // shared anchor points the supports grow around
  std::size_t max_tiles = 200;
  TileParams params = TileParams::published();
};
// Boxes drawn near the diagonal, then supports chosen coarse-to-fine with
// E(Q) inside E(Q') whenever Q <. Q'.
TileSet random_regular_collection(Rng& rng, const RegularCollectionOptions& opt);

std::vector<std::uint32_t> all_members(const TileSet& P);

// mu,j,I_lo,I_hi,w1_lo,w1_hi,...,b3_lo,b3_hi (L_mu coordinates)
void write_tiles(std::ostream& os, const TileSet& P);
// n,tree,t,I_lo,I_hi,size,members (space separated)
void write_forests(std::ostream& os, const ForestDecomposition& d);

}  // namespace bfr::tf
