// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "bfr/experiments.hpp"
#include "bfr/oracles.hpp"
#include "bfr/paraproduct.hpp"
#include "bfr/partition.hpp"

namespace bfr::xp {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double rel_l2(const GridFunction& a, const GridFunction& b) {
  const double den = lp_norm(b, 2);
  return lp_norm(a - b, 2) / (den > 0 ? den : 1.0);
}

// exceptions must not leave an OpenMP region; the first one is kept and rethrown
class TrialErrors {
 public:
  template <class F>
  void guard(int trial, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
#pragma omp critical(bfr_trial_errors)
      if (first_ < 0 || trial < first_) {
        first_ = trial;
        what_ = e.what();
      }
    }
  }
  void rethrow() const {
    if (first_ >= 0) throw std::runtime_error("trial " + std::to_string(first_) + ": " + what_);
  }

 private:
  int first_ = -1;
  std::string what_;
};

double drift(double coarse, double fine) {
  if (coarse == fine) return 0;
  return std::abs(fine - coarse) / std::abs(coarse);
}

tf::TileParams tile_params(const Config& c) {
  tf::TileParams p;
  p.C0 = static_cast<int>(c.integer("tile_C0"));
  p.lattice_bits = static_cast<int>(c.integer("lattice_bits"));
  p.J = static_cast<int>(c.integer("J"));
  p.dilation = c.num("dilation");
  p.nest = c.num("nest");
  p.slack = c.num("slack");
  p.enforce_nesting = c.integer("enforce_nesting") != 0;
  p.retry_budget = static_cast<int>(c.integer("retry_budget"));
  return p;
}

sizes::FamilyParams family_params(const Config& c) {
  sizes::FamilyParams f;
  f.members = static_cast<int>(c.integer("family_members"));
  f.order = static_cast<int>(c.integer("family_order"));
  f.smoothness = static_cast<int>(c.integer("family_smoothness"));
  f.half_width = c.num("family_half_width");
  f.plateau = c.num("family_plateau");
  return f;
}

sizes::ModelOptions model_options(const Config& c) {
  sizes::ModelOptions o;
  o.xi = XiParams{static_cast<int>(c.integer("xi_N")), c.num("xi_radius")};
  o.plateau = c.num("model_plateau");
  return o;
}

StreamSpec stream_spec(const Config& c) {
  StreamSpec s;
  s.streams = static_cast<int>(c.integer("streams"));
  s.half_width = c.num("half_width");
  s.j_lo = static_cast<int>(c.integer("j_lo"));
  s.j_hi = static_cast<int>(c.integer("j_hi"));
  s.margin = c.num("margin");
  s.filter_C = c.num("filter_C");
  s.params = tile_params(c);
  return s;
}

// restricted-type draw: E inside [0, L) and a step function with |f| = 1_E
struct Draw {
  std::vector<Interval> E;
  StepFunction f;
};
Draw draw(Rng& rng, const Config& c) {
  const double L = c.length();
  Draw d;
  d.E = random_interval_union(rng, L, 0, static_cast<int>(c.integer("intervals")), c.num("max_len") * L);
  d.f = restricted_step(rng, L, 0, d.E, c.num("phase_cell") * L);
  return d;
}

// value at N and 2N, their drift and a stability check within the budget
void stability(RunResult& r, const Config& c, const std::string& name, double coarse, double fine) {
  const std::size_t n = c.n();
  r.add(name + "@coarse", coarse, n);
  r.add(name + "@fine", fine, 2 * n);
  const double d = drift(coarse, fine);
  r.add(name + "_drift", d);
  r.check(name + "_finite", std::isfinite(coarse) && std::isfinite(fine),
          "N=" + std::to_string(n) + ": " + fmt(coarse) + ", N=" + std::to_string(2 * n) + ": " + fmt(fine));
  r.check(name + "_stable", d <= c.num("budget"), "drift " + fmt(d) + " vs budget " + fmt(c.num("budget")));
}

// ---- partition ----

void run_partition(const Config& c, RunResult& r) {
  geometry::PolygonCollectionOptions opt;
  opt.mu_max = static_cast<int>(c.integer("mu_max"));
  opt.C0 = static_cast<int>(c.integer("C0"));
  opt.alpha = c.num("alpha");
  opt.whitney.lattice_shift = static_cast<int>(c.integer("whitney_shift"));
  opt.whitney.depth = static_cast<int>(c.integer("whitney_depth"));
  opt.whitney.depth_shift = static_cast<int>(c.integer("depth_shift"));
  const auto C = geometry::polygon_collection(opt);
  r.add("rectangles", static_cast<double>(C.rects.size()));

  Rng rng(c.seed());
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<Point2> S;
  while (S.size() < static_cast<std::size_t>(c.integer("samples"))) {
    Point2 p{U(rng), U(rng)};
    if (C.polygon.gauge(p) < 1) S.push_back(p);
  }
  geometry::PartitionOfUnity pu(C.rects, opt.alpha);
  double residual = 0;
  std::size_t resolved = 0;
  Point2 worst{};
  for (const auto& p : S) {
    if (!C.resolved(p)) continue;
    ++resolved;
    const double e = std::abs(pu.total(p) - 1);
    if (e > residual || !(e == e)) {
      residual = e;
      worst = p;
    }
  }
  r.add("samples_resolved", static_cast<double>(resolved));
  r.add("residual", residual);
  r.check("residual", residual <= c.num("residual_tol") && resolved > 0,
          fmt(residual) + " at (" + fmt(worst.x) + ", " + fmt(worst.y) + "), " + std::to_string(resolved) +
              " resolved samples");

  geometry::HypothesisOptions ho;
  ho.M1_bound = static_cast<int>(c.integer("M1_bound"));
  ho.M2_bound = c.num("M2_bound");
  const auto rep = geometry::check_hypotheses(
      C.rects, opt.alpha, [&](Point2 p) { return C.polygon.gauge(p); }, S,
      [&](Point2 p) { return C.resolved(p); }, ho);
  r.add("protruding", static_cast<double>(rep.protruding));
  r.add("touching", static_cast<double>(rep.touching));
  r.add("max_gauge", rep.max_gauge);
  r.add("uncovered", static_cast<double>(rep.uncovered));
  r.add("excluded", static_cast<double>(rep.excluded));
  r.add("M1", rep.M1);
  r.add("M2", rep.M2);
  r.add("hypotheses_ok", rep.ok() ? 1 : 0);
  if (!rep.ok()) r.notes.push_back("hypotheses: " + rep.violations());

  // interval overlap at two truncations of the polygon
  std::map<long, std::array<int, 3>> overlap;
  for (long mm : {c.integer("overlap_mu_lo"), c.integer("overlap_mu_hi")}) {
    geometry::LacPolygon P(static_cast<int>(mm));
    std::vector<geometry::WhitneyFamily> fams;
    for (int mu = 1; mu <= mm; ++mu) fams.push_back(geometry::whitney_rectangles(P, mu, opt.C0, opt.alpha, opt.whitney));
    overlap[mm] = geometry::interval_families(fams, opt.alpha).overlap;
    for (int i = 0; i < 3; ++i)
      r.add("overlap" + std::to_string(i + 1) + "@mu" + std::to_string(mm), overlap[mm][static_cast<std::size_t>(i)]);
  }
  const auto& lo = overlap[c.integer("overlap_mu_lo")];
  const auto& hi = overlap[c.integer("overlap_mu_hi")];
  r.check("overlap_stable", lo == hi,
          "(" + std::to_string(lo[0]) + ", " + std::to_string(lo[1]) + ", " + std::to_string(lo[2]) + ") vs (" +
              std::to_string(hi[0]) + ", " + std::to_string(hi[1]) + ", " + std::to_string(hi[2]) + ")");
}

// ---- paraproduct ----

void run_paraproduct(const Config& c, RunResult& r) {
  const std::size_t n = c.n();
  const double L = c.length(), q = c.num("p3") / (c.num("p3") - 1);
  const long band = c.integer("band");
  const int trials = static_cast<int>(c.integer("trials"));
  std::vector<paraproduct::Telescoping> tel(static_cast<std::size_t>(trials));
  std::vector<double> ratio(tel.size());
  const double p1 = c.num("p1"), p2 = c.num("p2");
  TrialErrors errors;
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    errors.guard(t, [&] {
      Rng rng(trial_seed(c.seed(), static_cast<std::uint64_t>(t)));
      auto f = band_limited(rng, n, band, L), g = band_limited(rng, n, band, L), h = band_limited(rng, n, band, L);
      tel[static_cast<std::size_t>(t)] = paraproduct::telescoping_decompose(f, g, h);
      ratio[static_cast<std::size_t>(t)] = lp_norm(paraproduct::pp_apply(f, g), q) / (lp_norm(f, p1) * lp_norm(g, p2));
    });
  }
  errors.rethrow();
  double worst = 0, first = 0, diag = 0, loose = INFINITY, pp = 0;
  std::size_t admissible = 0, at = 0;
  for (std::size_t t = 0; t < tel.size(); ++t) {
    if (tel[t].residual > worst) at = t;
    worst = std::max(worst, tel[t].residual);
    first = std::max(first, tel[t].first_step_residual);
    diag = std::max(diag, tel[t].diagonal_residual);
    loose = std::min(loose, tel[t].residual_loose);
    admissible += tel[t].admissible;
    pp = std::max(pp, ratio[t]);
  }
  r.add("residual", worst, n);
  r.add("first_step_residual", first, n);
  r.add("diagonal_residual", diag, n);
  r.add("residual_loose_min", loose, n);
  r.add("admissible", static_cast<double>(admissible));
  r.add("pp_ratio_max", pp, n);
  r.check("residual", worst <= c.num("telescoping_tol"), fmt(worst) + " at trial " + std::to_string(at));
  r.check("admissible", admissible == tel.size(),
          std::to_string(tel.size() - admissible) + " triples with spectrum above |xi| = 1");
}

// ---- hs-oracle ----

void run_hs_oracle(const Config& c, RunResult& r) {
  const std::size_t n = c.n();
  const double L = c.length();
  const long band = c.integer("band");
  const int trials = static_cast<int>(c.integer("trials"));
  const auto slopes = c.list("s_values");
  double worst = 0;
  for (std::size_t si = 0; si < slopes.size(); ++si) {
    const double s = slopes[si];
    std::vector<double> err(static_cast<std::size_t>(trials));
    TrialErrors errors;
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
      errors.guard(t, [&] {
        Rng rng(trial_seed(c.seed() + si, static_cast<std::uint64_t>(t)));
        auto f = band_limited(rng, n, band, L), g = band_limited(rng, n, band, L);
        err[static_cast<std::size_t>(t)] = rel_l2(hs_apply(s, f, g), oracle::hs_quadrature(s, f, g));
      });
    }
    errors.rethrow();
    const double m = *std::max_element(err.begin(), err.end());
    r.add("oracle_error_s" + fmt(s), m, n);
    worst = std::max(worst, m);
  }
  r.add("oracle_error", worst, n);
  r.check("oracle_error", worst <= c.num("oracle_tol"), fmt(worst) + " (max over slopes)");

  // m = 1 reproduces the grid product, for band-limited and for full-spectrum inputs
  double prod = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(trial_seed(c.seed() ^ 0x5eedULL, static_cast<std::uint64_t>(t)));
    auto f = band_limited(rng, n, band, L), g = band_limited(rng, n, band, L);
    prod = std::max(prod, rel_l2(bilinear_apply(Symbol2D::one(), f, g), f * g));
    auto d1 = draw(rng, c), d2 = draw(rng, c);
    auto F = d1.f.sampled(n), G = d2.f.sampled(n);
    if (lp_norm(F * G, 2) > 0) prod = std::max(prod, rel_l2(bilinear_apply(Symbol2D::one(), F, G), F * G));
  }
  r.add("product_residual", prod, n);
  r.check("product_identity", prod <= c.num("product_tol"), fmt(prod));
}

// ---- tiles ----

void run_tiles(const Config& c, RunResult& r) {
  tf::RegularCollectionOptions o;
  o.mu = static_cast<int>(c.integer("rc_mu"));
  o.s = c.num("rc_s");
  o.scales = static_cast<int>(c.integer("rc_scales"));
  o.boxes_per_scale = static_cast<int>(c.integer("rc_boxes"));
  o.intervals_per_box = static_cast<int>(c.integer("rc_intervals"));
  o.max_tiles = static_cast<std::size_t>(c.integer("max_tiles"));
  o.params = tile_params(c);
  const int trials = static_cast<int>(c.integer("trials"));

  struct Row {
    std::size_t tiles = 0, trees = 0, irregular = 0, triples = 0, violations = 0, misowned = 0;
    bool regular = true;
    std::string witness;
  };
  std::vector<Row> rows(static_cast<std::size_t>(trials));
  TrialErrors errors;
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    errors.guard(t, [&] {
      Rng rng(trial_seed(c.seed(), static_cast<std::uint64_t>(t)));
      const auto P = tf::random_regular_collection(rng, o);
      const auto m = tf::all_members(P);
      auto& row = rows[static_cast<std::size_t>(t)];
      row.tiles = P.tiles.size();
      row.regular = tf::is_regular(P, m).regular;
      const auto trees = tf::greedy_select(P, m);
      row.trees = trees.size();
      std::vector<int> owner(P.tiles.size(), 0);
      for (const auto& T : trees) {
        const auto rep = tf::is_regular(P, T.members);
        if (!rep.regular) {
          ++row.irregular;
          row.witness = "tree at I = [" + fmt(T.I.lo) + ", " + fmt(T.I.hi) + "]: tiles " + std::to_string(rep.a) +
                        ", " + std::to_string(rep.b);
        }
        for (auto k : T.members) ++owner[k];
      }
      for (int w : owner) row.misowned += w != 1;
      const auto u = tf::consecutive_union_check(P, m, trees);
      row.triples = u.triples;
      row.violations = u.violations;
      if (u.violations) row.witness = u.witness;
    });
  }
  errors.rethrow();
  Row tot;
  std::size_t tiles_max = 0, irregular_collections = 0;
  std::string witness;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& w = rows[t];
    tot.tiles += w.tiles;
    tot.trees += w.trees;
    tot.irregular += w.irregular;
    tot.triples += w.triples;
    tot.violations += w.violations;
    tot.misowned += w.misowned;
    tiles_max = std::max(tiles_max, w.tiles);
    irregular_collections += !w.regular;
    if (witness.empty() && !w.witness.empty()) witness = "trial " + std::to_string(t) + ": " + w.witness;
  }
  r.add("collections", static_cast<double>(rows.size()));
  r.add("tiles_total", static_cast<double>(tot.tiles));
  r.add("tiles_max", static_cast<double>(tiles_max));
  r.add("trees_total", static_cast<double>(tot.trees));
  r.add("irregular_collections", static_cast<double>(irregular_collections));
  r.add("irregular_trees", static_cast<double>(tot.irregular));
  r.add("union_triples", static_cast<double>(tot.triples));
  r.add("union_violations", static_cast<double>(tot.violations));
  r.add("misowned_tiles", static_cast<double>(tot.misowned));
  r.check("collection_size", tiles_max <= o.max_tiles && irregular_collections == 0,
          "largest " + std::to_string(tiles_max) + ", irregular " + std::to_string(irregular_collections));
  r.check("regular_trees", tot.irregular == 0 && tot.misowned == 0,
          std::to_string(tot.irregular) + " irregular trees in " + std::to_string(tot.trees) +
              (witness.empty() ? "" : "; " + witness));
  r.check("consecutive_union", tot.violations == 0 && tot.triples > 0,
          std::to_string(tot.violations) + " violations in " + std::to_string(tot.triples) + " triples");
}

// ---- forest-bessel ----

void run_forest_bessel(const Config& c, RunResult& r) {
  const auto streams = desk_streams(stream_spec(c), c.length());
  const sizes::CanonicalFamily fam(family_params(c));
  const int trials = static_cast<int>(c.integer("trials")), levels = static_cast<int>(c.integer("levels"));
  std::size_t kept = 0;
  for (const auto& st : streams) kept += st.members.size();
  r.add("tiles", static_cast<double>(kept));

  double local[2] = {0, 0}, global[2] = {0, 0};
  std::size_t residual = 0, forests = 0;
  for (int level = 0; level < 2; ++level) {
    const std::size_t n = c.n() << level;
    for (int t = 0; t < trials; ++t) {
      Rng rng(trial_seed(c.seed(), static_cast<std::uint64_t>(t)));
      const auto d = draw(rng, c);
      const auto f = d.f.band_limited(n);
      std::map<int, double> per_level;  // union over mu
      for (const auto& st : streams) {
        const auto g = sizes::stream_inputs(st.line, f, f, f)[0];
        sizes::SizeContext ctx(g, fam);
        const auto dec = tf::forest_decompose(
            st.tiles, st.members,
            [&](const tf::Tree& T) { return sizes::tree_size(ctx, st.tiles, T, 0).value(); }, levels);
        const double norm = std::pow(lp_norm(g, 2), 2);
        for (const auto& b : sizes::bessel_levels(dec, norm)) {
          local[level] = std::max(local[level], b.ratio);
          per_level[b.n] += b.bessel;
        }
        if (level == 0) {
          residual += dec.residual;
          forests += dec.forests.size();
        }
      }
      for (const auto& [k, v] : per_level)
        global[level] = std::max(global[level], v / (std::ldexp(1.0, 2 * k) * union_measure(d.E)));
    }
  }
  r.add("forests", static_cast<double>(forests));
  r.add("residual_tiles", static_cast<double>(residual));
  stability(r, c, "local_ratio", local[0], local[1]);
  stability(r, c, "global_ratio", global[0], global[1]);
}

// ---- size-decay ----

double fitted_rate(const std::vector<double>& sz, double floor) {
  // least-squares slope of -log2 size over layers l >= 1 above the floor
  std::vector<std::pair<double, double>> pts;
  for (std::size_t l = 1; l < sz.size(); ++l)
    if (sz[l] > floor * sz[0] && sz[l] > 0) pts.emplace_back(static_cast<double>(l), std::log2(sz[l]));
  if (pts.size() < 2) return NAN;
  double mx = 0, my = 0;
  for (auto [x, y] : pts) mx += x, my += y;
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (auto [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
  return -sxy / sxx;
}

void run_size_decay(const Config& c, RunResult& r) {
  const std::size_t n = c.n();
  const double L = c.length();
  const auto p = tile_params(c);
  std::vector<tf::WhitneyCube3> cubes;
  for (long j = c.integer("decay_j_lo"); j <= c.integer("decay_j_hi"); ++j) {
    const double side = std::ldexp(1.0, static_cast<int>(j));
    auto q = tf::whitney_cubes3(p.C0, static_cast<int>(j), static_cast<int>(j), -3 * side, 3 * side, p.lattice_bits);
    auto reach = [](const tf::WhitneyCube3& a) {
      double m = 0;
      for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(a.center(i)));
      return m;
    };
    std::sort(q.begin(), q.end(), [&](const auto& a, const auto& b) {
      return reach(a) != reach(b) ? reach(a) < reach(b) : a.n < b.n;
    });
    q.resize(std::min(q.size(), static_cast<std::size_t>(c.integer("cubes_per_scale"))));
    cubes.insert(cubes.end(), q.begin(), q.end());
  }
  const auto line = stream_line(1, c.num("half_width"));
  const auto P = tf::build_multitiles(1, line.s, cubes, tf::enlarge_omegas(cubes, p), {0, L}, p);

  // the multipliers live in 10 omega; they must fit inside the grid band
  double reach = 0;
  for (const auto& b : P.boxes)
    for (const auto& w : b.omega) reach = std::max(reach, std::abs(w.center()) + 5 * w.length());
  if (reach * L >= static_cast<double>(n / 2))
    throw BandOverflow("size-decay: multiplier support reaches frequency " + fmt(reach) + ", grid band " +
                       fmt(static_cast<double>(n / 2) / L) + "; raise n or lower decay_j_hi");

  const std::vector<Interval> omega{{c.num("omega_lo") * L, c.num("omega_hi") * L}};
  const auto layers = sizes::exceptional_layers(P, tf::all_members(P), omega);
  r.add("tiles", static_cast<double>(P.tiles.size()));
  r.add("max_layer", layers.max_layer());

  const auto nd = c.list("N_decay");
  const int trials = static_cast<int>(c.integer("trials"));
  std::vector<double> lo(nd.size(), INFINITY), hi(nd.size(), -INFINITY);
  bool ok = true;
  std::string detail;
  for (int t = 0; t < trials; ++t) {
    Rng rng(trial_seed(c.seed(), static_cast<std::uint64_t>(t)));
    // sampled, so f vanishes at every grid point of Omega
    const auto f = restricted_step(rng, L, 0, complement(omega, {0, L}), c.num("phase_cell") * L).sampled(n);
    std::vector<double> rates;
    for (std::size_t k = 0; k < nd.size(); ++k) {
      auto fp = family_params(c);
      const int N2 = static_cast<int>(nd[k] * nd[k]);
      fp.smoothness = N2;
      fp.order = std::min(N2, 15);
      sizes::SizeContext ctx(f, sizes::CanonicalFamily(fp));
      std::vector<double> sz;
      for (int l = 0; l <= layers.max_layer(); ++l) {
        sz.push_back(sizes::max_size(ctx, P, layers.members[static_cast<std::size_t>(l)], 2).value);
        if (t == 0) r.add("size3_l" + std::to_string(l) + "_N" + fmt(nd[k]), sz.back(), n);
      }
      rates.push_back(fitted_rate(sz, c.num("noise_floor")));
      lo[k] = std::min(lo[k], rates.back());
      hi[k] = std::max(hi[k], rates.back());
    }
    for (std::size_t k = 0; k < rates.size(); ++k) {
      const bool pos = rates[k] > 0, mono = k == 0 || rates[k] >= rates[k - 1];
      if (!(pos && mono) && ok) {
        ok = false;
        detail = "trial " + std::to_string(t) + ": rate " + fmt(rates[k]) + " at N_decay " + fmt(nd[k]);
      }
    }
  }
  for (std::size_t k = 0; k < nd.size(); ++k) {
    r.add("rate_N" + fmt(nd[k]) + "_min", lo[k], n);
    r.add("rate_N" + fmt(nd[k]) + "_max", hi[k], n);
  }
  if (ok) detail = "bits per layer, every trial positive and non-decreasing in N_decay";
  r.check("decay_monotone", ok, detail);
}

// ---- model-sum ----

void run_model_sum(const Config& c, RunResult& r) {
  const double L = c.length();
  const auto streams = desk_streams(stream_spec(c), L);
  const auto mo = model_options(c);
  const double p[3] = {c.num("p1"), c.num("p2"), c.num("p3")};
  const int trials = static_cast<int>(c.integer("trials"));
  std::size_t kept = 0;
  for (const auto& st : streams) kept += st.members.size();
  r.add("tiles", static_cast<double>(kept));

  double mx[2] = {0, 0}, kept_frac = 1;
  for (int level = 0; level < 2; ++level) {
    const std::size_t n = c.n() << level;
    for (int t = 0; t < trials; ++t) {
      Rng rng(trial_seed(c.seed(), static_cast<std::uint64_t>(t)));
      auto d1 = draw(rng, c), d2 = draw(rng, c), d3 = draw(rng, c);
      // f3 is supported off the exceptional set of E1
      const auto omega = sizes::exceptional_set(d1.E, static_cast<std::size_t>(c.integer("omega_grid")), L, 0,
                                                c.num("lambda"));
      const auto f3 = d3.f.restricted(complement(omega, {0, L}));
      kept_frac = std::min(kept_frac, f3.support_measure() / union_measure(d3.E));
      const double m = sizes::model_sum(streams, d1.f.band_limited(n), d2.f.band_limited(n), f3.band_limited(n), mo);
      const double norm = std::pow(union_measure(d1.E) / L, 1 / p[0]) * std::pow(union_measure(d2.E) / L, 1 / p[1]) *
                          std::pow(union_measure(d3.E) / L, 1 / p[2]);
      mx[level] = std::max(mx[level], m / norm);
    }
  }
  r.add("E3_kept_min", kept_frac);
  stability(r, c, "ratio_max", mx[0], mx[1]);

  const long want = c.integer("audit_trees");
  if (want == 0) return;
  // first greedy trees of each stream, round robin over mu
  std::vector<std::vector<tf::Tree>> trees;
  for (const auto& st : streams) trees.push_back(tf::greedy_select(st.tiles, st.members));
  std::vector<std::pair<std::size_t, std::size_t>> picked;
  for (std::size_t k = 0; static_cast<long>(picked.size()) < want; ++k) {
    bool any = false;
    for (std::size_t m = 0; m < trees.size() && static_cast<long>(picked.size()) < want; ++m)
      if (k < trees[m].size()) picked.emplace_back(m, k), any = true;
    if (!any) break;
  }
  std::size_t irregular = 0;
  for (auto [m, k] : picked) irregular += !tf::is_regular(streams[m].tiles, trees[m][k].members).regular;
  r.add("audit_trees", static_cast<double>(picked.size()));
  r.add("audit_irregular", static_cast<double>(irregular));
  r.check("audit_regular", irregular == 0 && static_cast<long>(picked.size()) == want,
          std::to_string(picked.size()) + " trees, " + std::to_string(irregular) + " irregular");

  const std::array<double, 3> theta{1, c.num("theta2"), c.num("theta3")};
  const auto fam = family_params(c);
  double audit[2] = {0, 0};
  for (int level = 0; level < 2; ++level) {
    const std::size_t n = c.n() << level;
    Rng rng(trial_seed(c.seed(), 0));
    auto d1 = draw(rng, c), d2 = draw(rng, c), d3 = draw(rng, c);
    const auto f1 = d1.f.band_limited(n), f2 = d2.f.band_limited(n), f3 = d3.f.band_limited(n);
    for (std::size_t m = 0; m < streams.size(); ++m) {
      auto g = sizes::stream_inputs(streams[m].line, f1, f2, f3);
      for (auto& x : g) x = x.scaled(1.0 / lp_norm(x, INFINITY));  // ||g||_inf = 1
      for (auto [mm, k] : picked) {
        if (mm != m) continue;
        const auto a = sizes::single_tree_audit(streams[m].tiles, trees[m][k], g, theta, fam, mo);
        audit[level] = std::max(audit[level], a.ratio);
      }
    }
  }
  stability(r, c, "audit_max", audit[0], audit[1]);
}

// ---- polygon-scan ----

void run_polygon_scan(const Config& c, RunResult& r) {
  const geometry::LacPolygon P(static_cast<int>(c.integer("mu_max")));
  const LacLattice lat{c.num("lac_scale")};
  const auto op = [&](const GridFunction& f, const GridFunction& g) { return lac_apply(P, lat, f, g); };
  double mx[2] = {0, 0};
  for (int level = 0; level < 2; ++level) {
    ScanOptions o;
    o.p1 = c.num("p1");
    o.p2 = c.num("p2");
    o.p3 = c.num("p3");
    o.trials = static_cast<int>(c.integer("trials"));
    o.seed = c.seed();
    o.n = c.n() << level;
    o.length = c.length();
    o.intervals = static_cast<int>(c.integer("intervals"));
    o.max_len = c.num("max_len");
    o.phase_cell = c.num("phase_cell");
    o.band = c.integer("band");
    const auto st = norm_scan(op, o);
    mx[level] = st.max;
    if (level == 0) {
      r.add("ratio_q50", st.q50, o.n);
      r.add("ratio_q90", st.q90, o.n);
      r.add("skipped", st.skipped);
    }
  }
  stability(r, c, "ratio_max", mx[0], mx[1]);
}

}  // namespace

RunResult run(const Config& c) {
  c.validate();
  RunResult r;
  r.kind = c.kind();
  r.hash = c.hash();
  r.seed = c.seed();
  r.n = c.n();
  const auto t0 = std::chrono::steady_clock::now();
  const std::string& k = r.kind;
  if (k == "partition") run_partition(c, r);
  else if (k == "paraproduct") run_paraproduct(c, r);
  else if (k == "hs-oracle") run_hs_oracle(c, r);
  else if (k == "tiles") run_tiles(c, r);
  else if (k == "forest-bessel") run_forest_bessel(c, r);
  else if (k == "size-decay") run_size_decay(c, r);
  else if (k == "model-sum") run_model_sum(c, r);
  else if (k == "polygon-scan") run_polygon_scan(c, r);
  else throw ConfigError("kind: unknown experiment '" + k + "'");
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace bfr::xp
