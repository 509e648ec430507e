// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include <cmath>
#include <set>

#include "bfr/timefreq.hpp"
#include "doctest.h"

using namespace bfr;
using namespace bfr::tf;

namespace {

TileSet sample(std::uint64_t seed, RegularCollectionOptions opt = {}) {
  Rng rng(seed);
  return random_regular_collection(rng, opt);
}

}  // namespace

TEST_CASE("whitney acceptance") {
  WhitneyCube3 q{0, {10 * 1024, 0, 0}, 10};
  CHECK(diagonal_distance({10, 0, 0}) == doctest::Approx(std::sqrt(200.0 / 3.0)));
  CHECK(diagonal_distance({10, 0, 0}) > 2 * std::sqrt(3.0));
  CHECK(whitney3_accept(q, 4));
  CHECK(dilate_meets_diagonal(q, 40));
  CHECK_FALSE(dilate_meets_diagonal(q, 4));

  WhitneyCube3 d{0, {5, 5, 5}, 10};
  CHECK_FALSE(whitney3_accept(d, 4));
  CHECK(dilate_meets_diagonal(d, 1e-9));

  // translating all three centers along the diagonal changes nothing
  auto base = whitney_cubes3(1, -1, 1, -6, 6, 1);
  CHECK(!base.empty());
  for (double c : {-8.0, 2.0, 40.0}) {
    std::set<WhitneyCube3> shifted;
    for (auto q2 : base) {
      for (auto& n : q2.n) n += std::lround(std::ldexp(c, q2.bits - q2.j));
      shifted.insert(q2);
    }
    auto moved = whitney_cubes3(1, -1, 1, -6 + c, 6 + c, 1);
    CHECK(shifted == std::set<WhitneyCube3>(moved.begin(), moved.end()));
  }

  // brute force: l_inf distance of the center to the diagonal, minimised over a
  // grid that contains the optimum, against the two dilates
  auto fam = whitney_cubes3(2, 0, 0, -20, 20, 2);
  std::size_t brute = 0;
  for (long a = -80; a <= 80; ++a)
    for (long b = -80; b <= 80; ++b)
      for (long c = -80; c <= 80; ++c) {
        double best = INFINITY;
        for (double t : {(std::min({a, b, c}) + std::max({a, b, c})) / 8.0}) {
          double m = 0;
          for (long n : {a, b, c}) m = std::max(m, std::abs(n / 4.0 - t));
          best = std::min(best, m);
        }
        brute += best > 2 * 0.5 && best <= 20 * 0.5;
      }
  CHECK(fam.size() == brute);
}

TEST_CASE("sparsify") {
  const int J = 3;
  WhitneyCube3 a{0, {0, 20, 40}, 2}, b{0, {0, 60, 70}, 2};
  REQUIRE(whitney3_accept(a, 2));
  CHECK(sparse_conflict(a, b, J).find("shared omega_1") != std::string::npos);
  auto c = sparsify({a, b}, J);
  CHECK(c.cls[0] != c.cls[1]);
  CHECK(sparsify({a}, J).count() == 1);
  CHECK_THROWS_AS(sparsify({a, a}, J), ContractError);

  // class count stays below a bound fixed by C0, bits and J alone:
  // J residues times (greedy degree + 1)
  const int Js = 2;
  const long slab = 21 * 21;  // cubes per scale sharing one coordinate, C0 = 1, bits = 0
  const long bound = Js * (3 * (2 * (1L << Js) + 1) * slab + 1);
  for (double F : {2.0, 12.0, 60.0}) {
    auto cubes = whitney_cubes3(1, 0, 3, -F, F, 0);
    auto cls = sparsify(cubes, Js);
    for (const auto& m : cls.members) {
      std::vector<WhitneyCube3> sub;
      for (auto k : m) sub.push_back(cubes[k]);
      CHECK(sparse_violation(sub, Js).empty());
    }
    MESSAGE(cubes.size(), " cubes -> ", cls.count(), " classes");
    CHECK(cls.count() <= bound);
  }
}

TEST_CASE("enlargement") {
  auto p = TileParams::published();
  WhitneyCube3 big{p.J, {0, 20 * 1024, 30 * 1024}, p.lattice_bits};
  auto one = enlarge_omegas({big}, p);
  for (int i = 0; i < 3; ++i) CHECK(one[0][static_cast<std::size_t>(i)] == scaled_about_center(big.omega(i), 1000));

  // a small cube whose 1000-dilate touches the big one's edge
  const double edge = scaled_about_center(big.omega(0), 1000).hi;
  const long n = std::lround(edge * 1024);
  WhitneyCube3 small{0, {n, n + 5000, n + 9000}, p.lattice_bits};
  REQUIRE(whitney3_accept(small, p.C0));
  std::vector<WhitneyCube3> cubes{big, small};
  REQUIRE(sparse_violation(cubes, p.J).empty());
  auto bars = enlarge_omegas(cubes, p);
  CHECK(bars[0][0] != scaled_about_center(big.omega(0), 1000));
  auto rep = check_nesting(cubes, bars, p);
  CHECK(rep.ok());
  CHECK(rep.pairs == 1);
  CHECK(rep.min_ratio >= 1000);
  CHECK(rep.max_ratio <= 1020);

  // without room to grow the enlargement names the offending pair
  auto tight = p;
  tight.slack = 1e-6;
  try {
    enlarge_omegas(cubes, tight);
    FAIL("expected EnlargementError");
  } catch (const EnlargementError& e) {
    CHECK(e.small_cube == 1);
    CHECK(e.big_cube == 0);
  }

  // random sparse families
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto P = sample(seed);
    std::vector<WhitneyCube3> cs;
    std::vector<Bars> bs;
    for (const auto& b : P.boxes) {
      cs.push_back(b.cube);
      bs.push_back(b.bar_t);
    }
    CHECK(sparse_violation(cs, p.J).empty());
    auto r = check_nesting(cs, bs, p);
    CHECK_MESSAGE(r.ok(), r.witness);
    CHECK(r.min_ratio >= 1000);
    CHECK(r.max_ratio <= 1020);
  }
}

TEST_CASE("multi-tiles") {
  auto p = TileParams::desk();
  p.J = 2;
  std::vector<WhitneyCube3> cubes{{0, {0, 3, 6}, 0}, {2, {0, 2, 4}, 0}};
  for (const auto& q : cubes) REQUIRE(whitney3_accept(q, p.C0));
  auto bars = enlarge_omegas(cubes, p);
  auto P = build_multitiles(1, 2.0, cubes, bars, {0, 1}, p);
  // 1 interval of length 1, 4 of length 1/4
  CHECK(P.tiles.size() == 1 + 4);
  for (const auto& t : P.tiles) {
    CHECK(t.length() * P.boxes[t.box].omega[0].length() == 1.0);
    CHECK(t.length() == std::ldexp(1.0, -t.j));
  }
  const auto& b = P.boxes[0];
  CHECK(b.omega[1].length() == 2 * b.omega[0].length());
  CHECK(b.omega[2].length() == 3 * b.omega[0].length());
  CHECK(b.omega[2].hi < 0);

  auto wide = build_multitiles(1, 2.0, cubes, bars, {-2, 2}, p);
  CHECK(wide.tiles.size() == 4 + 16);
}

TEST_CASE("orders") {
  auto P = sample(7);
  REQUIRE(P.tiles.size() > 10);
  for (const auto& t : P.tiles) CHECK(order_leq(t, t));
  MultiTile other = P.tiles[0];
  other.mu = 2;
  CHECK_THROWS_AS(order_leq(P.tiles[0], other), ContractError);
  CHECK_THROWS_AS(order_lessdot(P.tiles[0], other), ContractError);

  Rng rng(11);
  std::size_t chains = 0, bad = 0;
  std::vector<TileSet> sets;
  for (std::uint64_t s = 1; s <= 5; ++s) sets.push_back(sample(100 + s));
  for (int n = 0; n < 10000; ++n) {
    const auto& S = sets[static_cast<std::size_t>(n) % sets.size()];
    std::uniform_int_distribution<std::size_t> U(0, S.tiles.size() - 1);
    const auto &a = S.tiles[U(rng)], &b = S.tiles[U(rng)], &c = S.tiles[U(rng)];
    if (order_leq(a, b) && order_leq(b, c)) {
      ++chains;
      bad += !order_leq(a, c);
    }
  }
  // also all triples of one set, which are dominated by nontrivial chains
  const auto& S = sets[0];
  for (const auto& a : S.tiles)
    for (const auto& b : S.tiles)
      if (order_leq(a, b))
        for (const auto& c : S.tiles)
          if (order_leq(b, c)) {
            ++chains;
            bad += !order_leq(a, c);
          }
  CHECK(chains > 0);
  CHECK(bad == 0);

  // propagation: P_i <= P'_i with different tiles carries over to every index
  std::size_t hyp = 0, fail_other = 0;
  for (const auto& Q : sets)
    for (const auto& a : Q.tiles)
      for (const auto& b : Q.tiles) {
        if (&a == &b || a.box == b.box) continue;
        for (int i = 0; i < 3; ++i) {
          if (!tile_leq(a, i, b, i)) continue;
          ++hyp;
          for (int j = 0; j < 3; ++j) fail_other += !tile_leq(a, i, b, j) || !tile_leq(a, j, b, i);
        }
      }
  MESSAGE("propagation hypotheses ", hyp, ", failures ", fail_other);
  CHECK(hyp > 0);
  CHECK(fail_other == 0);
}

TEST_CASE("regularity") {
  auto P = sample(3);
  CHECK(is_regular(P, all_members(P)).regular);
  CHECK(is_regular(P, {0}).regular);

  // drop a coarse-support tile that covers a finer one below it in the order
  bool found = false;
  for (std::uint32_t a = 0; a < P.tiles.size() && !found; ++a)
    for (std::uint32_t b = 0; b < P.tiles.size() && !found; ++b) {
      const auto &ta = P.tiles[a], &tb = P.tiles[b];
      if (ta.box == tb.box || !order_lessdot(ta, tb) || !tb.I.contains(ta.I)) continue;
      std::vector<std::uint32_t> m;
      for (std::uint32_t k = 0; k < P.tiles.size(); ++k)
        if (k != b) m.push_back(k);
      auto r = is_regular(P, m);
      bool other_b = false;
      for (auto k : m) other_b = other_b || P.tiles[k].box == tb.box;
      if (!other_b) continue;  // the box vanished entirely; nothing to violate
      found = true;
      CHECK_FALSE(r.regular);
      CHECK(P.tiles[r.a].box == ta.box);
      CHECK(P.tiles[r.b].box == tb.box);
    }
  CHECK(found);
}

TEST_CASE("maximal trees") {
  auto P = sample(5);
  std::vector<char> alive(P.tiles.size(), 1);
  // top data of the finest tile in a finest box
  std::uint32_t fine = 0;
  for (std::uint32_t k = 0; k < P.tiles.size(); ++k)
    if (P.tiles[k].j > P.tiles[fine].j) fine = k;
  const auto& ft = P.tiles[fine];
  auto T = maximal_tree(P, alive, P.boxes[ft.box].omega_t[0].center(), ft.I);
  REQUIRE(T);
  CHECK(T->members == std::vector<std::uint32_t>{fine});

  // monotone in I
  for (const auto& c : candidate_tops(P, alive)) {
    auto small = maximal_tree(P, alive, c.t, c.I);
    Interval big{std::floor(c.I.lo / (2 * c.I.length())) * 2 * c.I.length(), 0};
    big.hi = big.lo + 2 * c.I.length();
    auto large = maximal_tree(P, alive, c.t, big);
    REQUIRE(small);
    REQUIRE(large);
    CHECK(std::includes(large->members.begin(), large->members.end(), small->members.begin(),
                        small->members.end()));
  }

  Tree U;
  U.t = 3;
  U.I = {0, 0.25};
  CHECK(U.omega(0, 2.5).length() == 4);
  CHECK(U.omega(1, 2.5).length() == 10);
  CHECK(U.omega(2, 2.5).length() == 14);
  CHECK(U.xi(2, 2.5) == -10.5);
  CHECK(U.bar(1000).length() == 4000);
}

TEST_CASE("greedy selection") {
  std::size_t triples = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto P = sample(seed);
    auto m = all_members(P);
    REQUIRE(P.tiles.size() <= 200);
    auto trees = greedy_select(P, m);
    std::vector<int> owner(P.tiles.size(), 0);
    for (const auto& T : trees) {
      CHECK(!T.members.empty());
      CHECK(is_regular(P, T.members).regular);
      for (auto k : T.members) ++owner[k];
    }
    for (int o : owner) CHECK(o == 1);
    auto u = consecutive_union_check(P, m, trees);
    CHECK_MESSAGE(u.violations == 0, u.witness);
    triples += u.triples;
  }
  CHECK(triples > 0);

  // one maximal tree: a single step
  auto P = sample(9);
  std::vector<char> alive(P.tiles.size(), 1);
  auto c = candidate_tops(P, alive).front();
  auto T = maximal_tree(P, alive, c.t, c.I);
  auto again = greedy_select(P, T->members);
  REQUIRE(again.size() == 1);
  CHECK(again[0].members == T->members);
}

TEST_CASE("subtree partition") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto P = sample(seed);
    auto m = all_members(P);
    auto trees = greedy_select(P, m);
    std::vector<char> all(P.tiles.size(), 1);
    // S, S' = consecutive ranges of two greedy selections
    auto second = greedy_select(P, m);
    const std::size_t h = trees.size() / 2;
    std::vector<char> S(P.tiles.size(), 0), S2(P.tiles.size(), 0);
    for (std::size_t k = 0; k <= h; ++k)
      for (auto x : trees[k].members) S[x] = 1;
    for (std::size_t k = h / 2; k < second.size(); ++k)
      for (auto x : second[k].members) S2[x] = 1;
    for (const auto& T : trees) {
      for (const auto& [a, b] : {std::pair{&all, &all}, std::pair{&S, &S2}}) {
        auto sp = subtree_regular_partition(P, T, *a, *b);
        CHECK(sp.partitions);
        CHECK(sp.top_length <= T.I.length());
        for (const auto& part : sp.parts) CHECK(is_regular(P, part.members).regular);
      }
    }
  }
}

TEST_CASE("forest decomposition") {
  auto P = sample(4);
  auto zero = forest_decompose(P, all_members(P), [](const Tree&) { return 0.0; });
  CHECK(zero.forests.empty());
  CHECK(zero.initial_size == 0);

  // size = sqrt(|T| / 200): monotone under removal, every tile ends in a forest
  auto d = forest_decompose(P, all_members(P), [](const Tree& T) {
    return std::sqrt(static_cast<double>(T.members.size()) / 200.0);
  });
  std::size_t covered = 0;
  for (const auto& F : d.forests) {
    double b = 0;
    for (std::size_t k = 0; k < F.trees.size(); ++k) {
      CHECK(F.sizes[k] > std::ldexp(1.0, -F.n - 1));
      CHECK(F.sizes[k] <= std::ldexp(1.0, -F.n) * (1 + 1e-12));
      covered += F.trees[k].members.size();
      b += F.trees[k].I.length();
    }
    CHECK(F.bessel == doctest::Approx(b));
  }
  CHECK(covered + d.residual == P.tiles.size());
  CHECK(d.residual == 0);

  // non-regular input
  for (std::uint32_t a = 0; a < P.tiles.size(); ++a)
    for (std::uint32_t b = 0; b < P.tiles.size(); ++b) {
      const auto &ta = P.tiles[a], &tb = P.tiles[b];
      if (ta.box == tb.box || !order_lessdot(ta, tb) || !tb.I.contains(ta.I)) continue;
      std::vector<std::uint32_t> m{a};
      for (std::uint32_t k = 0; k < P.tiles.size(); ++k)
        if (P.tiles[k].box == tb.box && k != b) m.push_back(k);
      if (m.size() == 1) continue;
      CHECK_THROWS_AS(forest_decompose(P, m, [](const Tree&) { return 1.0; }), ContractError);
      return;
    }
}
