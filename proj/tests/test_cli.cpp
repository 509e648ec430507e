// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include <set>
#include <sstream>

#include "bfr/experiments.hpp"
#include "doctest.h"

using namespace bfr;
using namespace bfr::xp;

namespace {

std::string records(const RunResult& r) {
  std::ostringstream os;
  write_records(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("schema: every key once, every kind's defaults valid") {
  std::set<std::string> seen;
  for (const auto& k : schema()) {
    CHECK_MESSAGE(seen.insert(k.key).second, k.key);
    CHECK(!k.help.empty());
  }
  for (const auto* sym : {"C0", "J", "N_decay", "k0", "alpha", "theta1", "theta2", "theta3", "gamma2", "gamma3",
                          "mu_max", "p1", "p2", "p3", "n", "seed", "trials"})
    CHECK_MESSAGE(seen.count(sym), sym);
  CHECK(kinds().size() == 8);
  for (const auto& k : kinds()) {
    const auto c = Config::defaults(k);
    CHECK_NOTHROW(c.validate());
    CHECK(!describe_kind(k).empty());
    // the text form reads back to the same config
    CHECK(Config::parse_string(c.text()).values() == c.values());
  }
  CHECK_THROWS_AS(Config::defaults("nope"), ConfigError);
}

TEST_CASE("parsing") {
  auto c = Config::parse_string("# comment\nkind = polygon-scan\n p1 = 5/3 \np3=20/3  # trailing\n");
  CHECK(c.kind() == "polygon-scan");
  CHECK(c.num("p1") == doctest::Approx(5.0 / 3));
  CHECK(c.num("p3") == doctest::Approx(20.0 / 3));
  CHECK(c.num("p2") == 4);           // default
  CHECK(c.num("gamma3") == doctest::Approx(0.6 - 0.34));  // auto
  CHECK(c.length() == 1.0);
  CHECK(c.list("N_decay") == std::vector<double>{2, 4, 6});
  CHECK_NOTHROW(c.validate());

  CHECK_THROWS_WITH_AS(Config::parse_string("kind = tiles\nbogus = 1\n"), doctest::Contains("unknown key 'bogus'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse_string("kind = tiles\nJ = 1\nJ = 2\n"), doctest::Contains("duplicate"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse_string("p1 = 2\n"), doctest::Contains("kind"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse_string("kind = tiles\nno equals sign\n"), doctest::Contains("line 2"),
                       ConfigError);
  CHECK_THROWS_AS(Config::parse_string("kind = tiles\nalpha = 0.9x\n").num("alpha"), ConfigError);
}

TEST_CASE("validation names the violated constraint") {
  auto bad = [](const std::string& text) {
    try {
      Config::parse_string(text).validate();
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  // 1/2 + 1/2 + 1/2 != 1
  CHECK(bad("kind = model-sum\np1 = 2\np2 = 2\np3 = 2\n").find("Hoelder") != std::string::npos);
  // (3/2, 4, 4) is not a Hoelder triple either
  CHECK(bad("kind = polygon-scan\np1 = 3/2\np2 = 4\np3 = 4\n").find("triple") != std::string::npos);
  CHECK(bad("kind = model-sum\np1 = 3\np2 = 3\np3 = 3\ngamma2 = 0.2\n").find("1 < p1 < 2") != std::string::npos);
  CHECK(bad("kind = tiles\ngamma2 = 0.2\n").find("gamma2: must exceed 1/p2") != std::string::npos);
  CHECK(bad("kind = tiles\ngamma2 = 0.34\ngamma3 = 0.3\n").find("gamma2 + gamma3") != std::string::npos);
  CHECK(bad("kind = tiles\ntheta2 = 0.6\n").find("theta2") != std::string::npos);
  CHECK(bad("kind = tiles\ntheta1 = 0.9\n").find("theta1") != std::string::npos);
  CHECK(bad("kind = tiles\nalpha = 1\n").find("alpha") != std::string::npos);
  CHECK(bad("kind = polygon-scan\nn = 500\n").find("power of two") != std::string::npos);
  CHECK(bad("kind = model-sum\nk0 = 2\n").find("k0") != std::string::npos);
  CHECK(bad("kind = paraproduct\nband = 200\n").find("band") != std::string::npos);
  CHECK(bad("kind = tiles\nseed = -3\n").find("seed") != std::string::npos);
  CHECK(bad("kind = tiles\nfamily_order = 16\n").find("family_order") != std::string::npos);
  CHECK(bad("kind = tiles\n") == "");
}

TEST_CASE("hash ignores the grid size and the seed only") {
  auto a = Config::defaults("polygon-scan");
  auto b = a;
  b.set("n", "1024");
  b.set("seed", "99");
  CHECK(a.hash() == b.hash());
  b.set("trials", "7");
  CHECK(a.hash() != b.hash());
  CHECK(Config::defaults("tiles").hash() != Config::defaults("partition").hash());
}

TEST_CASE("runs are deterministic and records round-trip exactly") {
  auto c = Config::parse_string("kind = paraproduct\nn = 256\nk0 = 5\nband = 32\ntrials = 6\n");
  const auto r1 = run(c), r2 = run(c);
  CHECK(r1.pass());
  REQUIRE(r1.metrics.size() == r2.metrics.size());
  for (std::size_t k = 0; k < r1.metrics.size(); ++k) {
    CHECK(r1.metrics[k].name == r2.metrics[k].name);
    CHECK(r1.metrics[k].value == r2.metrics[k].value);  // bit-identical
  }
  std::istringstream is(records(r1));
  const auto back = read_records(is);
  REQUIRE(back.size() == 1);
  CHECK(back[0].hash == r1.hash);
  CHECK(back[0].seed == r1.seed);
  CHECK(back[0].kind == "paraproduct");
  REQUIRE(back[0].metrics.size() == r1.metrics.size());
  for (std::size_t k = 0; k < r1.metrics.size(); ++k) {
    CHECK(back[0].metrics[k].value == r1.metrics[k].value);
    CHECK(back[0].metrics[k].n == r1.metrics[k].n);
  }
  CHECK(records(r1).rfind("hash,seed,kind,metric,value,N,seconds\n", 0) == 0);

  std::ostringstream sum;
  write_summary(sum, c, r1);
  CHECK(sum.str().find("run.kind = paraproduct") != std::string::npos);
  CHECK(sum.str().find("config.band = 32") != std::string::npos);
  CHECK(sum.str().find("checks.residual = pass") != std::string::npos);
}

TEST_CASE("compare") {
  auto c = Config::parse_string("kind = polygon-scan\nn = 128\ntrials = 8\n");
  const auto base = run(c);
  SUBCASE("identical runs drift by zero") {
    const auto d = compare(base, run(c));
    CHECK(!d.new_baseline);
    CHECK(d.breaches == 0);
    CHECK(d.rows.size() == base.metrics.size());
    for (const auto& r : d.rows) CHECK(r.relative == 0.0);
  }
  SUBCASE("doubled N stays within the stability budget") {
    auto c2 = c;
    c2.set("n", "256");
    const auto fine = run(c2);
    const auto d = compare(base, fine);
    bool seen = false;
    for (const auto& r : d.rows)
      if (r.metric == "ratio_max@coarse" || r.metric == "ratio_max@fine") {
        seen = true;
        CHECK_MESSAGE(r.relative <= 0.2, r.metric);
      }
    CHECK(seen);
    // the coarse value of the refined run is the fine value of the baseline
    CHECK(fine.metric("ratio_max@coarse") == base.metric("ratio_max@fine"));
  }
  SUBCASE("changed seed asks for a new baseline") {
    auto c2 = c;
    c2.set("seed", "2");
    const auto d = compare(base, run(c2));
    CHECK(d.new_baseline);
    CHECK(d.rows.empty());
    std::ostringstream os;
    write_drift(os, d);
    CHECK(os.str().find("new baseline") != std::string::npos);
  }
  SUBCASE("hash mismatch is an error") {
    auto c2 = c;
    c2.set("trials", "9");
    CHECK_THROWS_AS(compare(base, run(c2)), ConfigError);
  }
  SUBCASE("breaches are listed") {
    auto moved = base;
    moved.metrics[0].value *= 1.5;
    const auto d = compare(base, moved);
    CHECK(d.breaches == 1);
    CHECK(d.rows[0].breach);
    CHECK(d.rows[0].relative == doctest::Approx(0.5));
  }
}

TEST_CASE("experiment checks decide the verdict") {
  SUBCASE("hs-oracle") {
    const auto r = run(Config::parse_string("kind = hs-oracle\ntrials = 2\ns_values = 1\n"));
    CHECK(r.pass());
    CHECK(r.metric("oracle_error") <= 1e-3);
    CHECK(r.metric("product_residual") <= 1e-12);
  }
  SUBCASE("tiles") {
    const auto r = run(Config::parse_string("kind = tiles\ntrials = 5\n"));
    CHECK(r.pass());
    CHECK(r.metric("union_violations") == 0);
    CHECK(r.metric("tiles_max") <= 200);
  }
  SUBCASE("an impossible threshold fails") {
    const auto r = run(Config::parse_string("kind = paraproduct\nn = 256\nk0 = 5\nband = 32\ntrials = 2\n"
                                            "telescoping_tol = 1e-30\n"));
    CHECK_FALSE(r.pass());
  }
  SUBCASE("size-decay refuses multipliers beyond the grid band") {
    CHECK_THROWS_AS(run(Config::parse_string("kind = size-decay\nn = 256\ntrials = 1\n")), BandOverflow);
  }
}

TEST_CASE("stream geometry") {
  const auto ld = stream_line(2, 16);
  CHECK(ld.s == 1.5);
  CHECK(ld.I[0].center() == 72);
  CHECK(ld.I[0].length() == 32);
  CHECK(ld.I[1].length() == 48);
  CHECK(ld.meets_rectangle());
  CHECK_THROWS_AS(stream_line(0, 16), ContractError);

  StreamSpec sp;
  sp.j_lo = sp.j_hi = 3;
  sp.streams = 2;
  const auto S = desk_streams(sp);
  REQUIRE(S.size() == 2);
  for (const auto& st : S) {
    CHECK(!st.members.empty());
    CHECK(st.members.size() <= st.tiles.tiles.size());
    for (auto k : st.members) CHECK(st.tiles.tiles[k].j == 3);
  }
}
