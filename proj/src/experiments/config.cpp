// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>

#include "bfr/experiments.hpp"

namespace bfr::xp {

namespace {

const std::vector<std::string> kKinds = {"partition",     "paraproduct", "hs-oracle", "tiles",
                                         "forest-bessel", "size-decay",  "model-sum", "polygon-scan"};

// clang-format off
const std::vector<KeyInfo> kSchema = {
  {"kind", "", "experiment kind"},
  {"seed", "1", "master seed; trial t uses trial_seed(seed, t)"},
  {"n", "512", "grid size N (power of two); 0 for grid-free kinds; env BFR_N overrides"},
  {"k0", "0", "domain length L = 2^k0"},
  {"trials", "50", "seeded trials"},
  {"budget", "0.2", "relative drift allowed when N doubles"},
  // exponents
  {"p1", "3/2", "exponent of f1"},
  {"p2", "4", "exponent of f2"},
  {"p3", "12", "exponent of f3; 1/p1 + 1/p2 + 1/p3 = 1"},
  {"theta1", "1", "size exponent of the first function (must be 1)"},
  {"theta2", "0.7", "size exponent, 2 gamma2 < theta2 < 1"},
  {"theta3", "0.7", "size exponent, 2 gamma3 < theta3 < 1"},
  {"gamma2", "0.34", "0 < gamma2 < 1/2, gamma2 > 1/p2"},
  {"gamma3", "auto", "0 < gamma3 < 1/2; auto = 1/p1 - gamma2"},
  // polygon geometry
  {"mu_max", "8", "polygon truncation depth"},
  {"alpha", "0.99", "plateau fraction of the partition rectangles"},
  {"C0", "4", "Whitney constant of the polygon squares"},
  {"whitney_shift", "1", "square centers on 2^{j - shift} Z^2"},
  {"whitney_depth", "6", "dyadic scales kept below the coarsest admissible one"},
  {"depth_shift", "0", "trapezoid depth 1 - 4^{k - mu}; 0 is the displayed convention"},
  {"samples", "10000", "random interior sample points"},
  {"residual_tol", "1e-9", "partition-of-unity residual threshold"},
  {"M1_bound", "64", "overlap bound of hypothesis (3)"},
  {"M2_bound", "64", "side-ratio bound of hypothesis (4)"},
  {"overlap_mu_lo", "10", "reference truncation for the interval overlap"},
  {"overlap_mu_hi", "20", "extended truncation for the interval overlap"},
  // spectra
  {"band", "128", "largest |frequency| of band-limited inputs"},
  {"telescoping_tol", "1e-10", "relative residual threshold of the telescoping chain"},
  {"s_values", "1,2,5", "slopes of the half-plane symbol"},
  {"oracle_tol", "1e-3", "relative L2 threshold against the quadrature"},
  {"product_tol", "1e-12", "relative threshold of the m = 1 identity"},
  {"lac_scale", "0.0078125", "polygon coordinates per lattice step (fixed across N)"},
  // tiles
  {"tile_C0", "4", "Whitney constant of the frequency cubes"},
  {"lattice_bits", "10", "cube centers on 2^{j - bits} Z^3"},
  {"J", "14", "scale separation of a sparse class"},
  {"dilation", "1000", "omega-bar contains dilation * omega"},
  {"nest", "10", "nesting factor of the omega-bar property"},
  {"slack", "0.01", "omega-bar enlargement per side"},
  {"enforce_nesting", "1", "fail when the nesting property cannot be met"},
  {"retry_budget", "64", "enlargement passes per interval"},
  {"rc_mu", "1", "random collections: polygon index mu"},
  {"rc_s", "2", "random collections: slope s"},
  {"rc_scales", "3", "random collections: cube scales"},
  {"rc_boxes", "6", "random collections: boxes per scale"},
  {"rc_intervals", "16", "random collections: support anchors per box"},
  {"max_tiles", "200", "random collections: tile budget"},
  // streams
  {"streams", "3", "polygon pieces mu = 1..streams"},
  {"half_width", "16", "|I^1_mu| / 2"},
  {"j_lo", "2", "finest cube scale"},
  {"j_hi", "4", "coarsest cube scale"},
  {"margin", "4", "Whitney range beyond the stream intervals"},
  {"filter_C", "8", "frequency filter constant"},
  // sizes
  {"family_members", "3", "canonical multipliers per tile"},
  {"family_order", "3", "derivative order checked"},
  {"family_smoothness", "-1", "plateau step smoothness; -1 = C^inf"},
  {"family_half_width", "4.5", "multiplier support half-width in units of |omega|"},
  {"family_plateau", "0.5", "multiplier plateau fraction"},
  {"lambda", "100", "exceptional set threshold M(1_E) > lambda |E|"},
  {"omega_grid", "4096", "grid the exceptional set is computed on"},
  {"levels", "40", "forest level budget"},
  {"audit_trees", "50", "trees in the single-tree audit (0 disables)"},
  // model sum
  {"xi_N", "4", "decay parameter of the cutoff kernel"},
  {"xi_radius", "1", "spectral radius of the unit cutoff kernel"},
  {"model_plateau", "0.5", "plateau fraction of the model projections"},
  // restricted-type ensemble
  {"intervals", "6", "pieces of each E_i"},
  {"max_len", "0.15", "largest piece, fraction of L"},
  {"phase_cell", "0.015625", "phase cells, fraction of L"},
  // size decay
  {"N_decay", "2,4,6", "spatial parameters; multipliers are C^{N^2}"},
  {"omega_lo", "0.25", "exceptional interval, left end"},
  {"omega_hi", "0.75", "exceptional interval, right end"},
  {"decay_j_lo", "3", "first cube scale"},
  {"decay_j_hi", "6", "last cube scale"},
  {"cubes_per_scale", "4", "cubes nearest the origin per scale"},
  {"noise_floor", "1e-12", "sizes below floor * size of layer 0 are not fitted"},
};

const std::map<std::string, std::map<std::string, std::string>> kOverrides = {
  {"partition", {{"n", "0"}}},
  {"paraproduct", {{"n", "1024"}, {"k0", "7"}, {"trials", "100"}, {"band", "128"}}},
  {"hs-oracle", {{"n", "64"}, {"k0", "1"}, {"trials", "20"}, {"band", "6"}}},
  {"tiles", {{"n", "0"}, {"trials", "100"}}},
  {"forest-bessel", {{"trials", "3"}, {"tile_C0", "1"}, {"lattice_bits", "0"}, {"J", "1"},
                     {"dilation", "3"}, {"nest", "2"}, {"slack", "0.25"}, {"enforce_nesting", "0"}}},
  {"size-decay", {{"n", "2048"}, {"trials", "2"}, {"tile_C0", "1"}, {"lattice_bits", "0"}, {"J", "1"},
                  {"dilation", "3"}, {"nest", "2"}, {"slack", "0.25"}, {"enforce_nesting", "0"}}},
  {"model-sum", {{"tile_C0", "1"}, {"lattice_bits", "0"}, {"J", "1"}, {"dilation", "3"},
                 {"nest", "2"}, {"slack", "0.25"}, {"enforce_nesting", "0"}}},
  {"polygon-scan", {}},
};
// clang-format on

const std::map<std::string, std::string> kDescriptions = {
    {"partition", "partition of unity over the polygon collection, its four hypotheses, interval overlap"},
    {"paraproduct", "telescoping identity of the paraproduct on band-limited triples"},
    {"hs-oracle", "half-plane symbol against principal-value quadrature; the m = 1 product identity"},
    {"tiles", "greedy trees on random regular collections: regularity and consecutive unions"},
    {"forest-bessel", "forest decomposition Bessel ratios on restricted-type inputs, N and 2N"},
    {"size-decay", "decay of size*_3 across exceptional layers for each N_decay"},
    {"model-sum", "model-sum norm scan at N and 2N; single-tree audit"},
    {"polygon-scan", "lacunary polygon multiplier norm scan at N and 2N"},
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

double parse_number(const std::string& key, const std::string& v) {
  // "a/b" fractions are accepted for exponents
  const auto slash = v.find('/');
  try {
    if (slash != std::string::npos) {
      return parse_number(key, trim(v.substr(0, slash))) / parse_number(key, trim(v.substr(slash + 1)));
    }
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

const KeyInfo* find_key(const std::string& key) {
  for (const auto& k : kSchema)
    if (k.key == key) return &k;
  return nullptr;
}

bool grid_kind(const std::string& kind) { return kind != "partition" && kind != "tiles"; }
bool stream_kind(const std::string& kind) {
  return kind == "forest-bessel" || kind == "size-decay" || kind == "model-sum";
}

}  // namespace

const std::vector<KeyInfo>& schema() { return kSchema; }
const std::vector<std::string>& kinds() { return kKinds; }

std::string describe_kind(const std::string& kind) {
  auto it = kDescriptions.find(kind);
  if (it == kDescriptions.end()) throw ConfigError("kind: unknown experiment '" + kind + "'");
  return it->second;
}

Config Config::defaults(const std::string& kind) {
  if (!kOverrides.count(kind)) throw ConfigError("kind: unknown experiment '" + kind + "'");
  Config c;
  for (const auto& k : kSchema) c.values_[k.key] = k.fallback;
  for (const auto& [k, v] : kOverrides.at(kind)) c.values_[k] = v;
  c.values_["kind"] = kind;
  return c;
}

Config Config::parse(std::istream& is) {
  std::map<std::string, std::string> given;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!find_key(key)) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (given.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    given[key] = value;
  }
  if (!given.count("kind")) throw ConfigError("kind: missing");
  Config c = defaults(given.at("kind"));
  for (const auto& [k, v] : given) c.values_[k] = v;
  return c;
}

Config Config::parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

std::string Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key + ": not in the schema");
  return it->second;
}

double Config::num(const std::string& key) const {
  if (key == "gamma3" && str(key) == "auto") return 1.0 / num("p1") - num("gamma2");
  return parse_number(key, str(key));
}

long Config::integer(const std::string& key) const {
  const double x = num(key);
  if (x != std::floor(x) || std::abs(x) > 9.0e15) throw ConfigError(key + ": not an integer");
  return static_cast<long>(x);
}

std::uint64_t Config::seed() const {
  const std::string v = str("seed");
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != v.size() || v.front() == '-') throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError("seed: not an unsigned 64-bit integer: '" + v + "'");
  }
}

std::size_t Config::n() const {
  const long v = integer("n");
  if (v < 0) throw ConfigError("n: negative");
  return static_cast<std::size_t>(v);
}

double Config::length() const { return std::ldexp(1.0, static_cast<int>(integer("k0"))); }

std::vector<double> Config::list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) throw ConfigError("unknown key '" + key + "'");
  if (key == "kind") *this = defaults(value);  // kind switch resets to that kind's defaults
  else values_[key] = value;
}

void Config::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  const std::string& k = kind();
  if (!kOverrides.count(k)) fail("kind: unknown experiment '" + k + "'");
  for (const auto& [key, v] : values_) {
    if (key == "kind" || key == "s_values" || key == "N_decay" || key == "seed") continue;
    if (key == "gamma3" && v == "auto") continue;
    (void)num(key);  // every other value is numeric
  }
  (void)seed();
  list("s_values");

  // exponents
  const double p1 = num("p1"), p2 = num("p2"), p3 = num("p3");
  for (double p : {p1, p2, p3})
    if (!(p > 1) || !std::isfinite(p)) fail("triple: every exponent must lie in (1, inf)");
  const double holder = 1 / p1 + 1 / p2 + 1 / p3;
  if (std::abs(holder - 1) > 1e-12) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "triple: 1/p1 + 1/p2 + 1/p3 = %.6g, must equal 1 (Hoelder)", holder);
    fail(buf);
  }
  if ((k == "model-sum" || k == "polygon-scan") && !(p1 < 2 && p2 > 2 && p3 > 2))
    fail("triple: the scans need 1 < p1 < 2 < p2, p3");
  if (num("theta1") != 1) fail("theta1: must be 1");
  const double g2 = num("gamma2"), g3 = num("gamma3");
  for (auto [name, g] : {std::pair{"gamma2", g2}, std::pair{"gamma3", g3}})
    if (!(g > 0 && g < 0.5)) fail(std::string(name) + ": must lie in (0, 1/2)");
  if (std::abs(g2 + g3 - 1 / p1) > 1e-12) fail("gamma: gamma2 + gamma3 must equal 1/p1");
  if (!(g2 > 1 / p2)) fail("gamma2: must exceed 1/p2");
  const double t2 = num("theta2"), t3 = num("theta3");
  if (!(t2 > 2 * g2 && t2 < 1)) fail("theta2: must lie in (2 gamma2, 1)");
  if (!(t3 > 2 * g3 && t3 < 1)) fail("theta3: must lie in (2 gamma3, 1)");

  // grid and domain
  const std::size_t n = this->n();
  if (grid_kind(k)) {
    if (n < 8 || (n & (n - 1)) != 0) fail("n: must be a power of two >= 8");
  }
  if (integer("k0") < 0 || integer("k0") > 20) fail("k0: must lie in [0, 20]");
  if (stream_kind(k) && integer("k0") != 0) fail("k0: the tile streams live on [0, 1); k0 must be 0");
  if (integer("trials") < 1) fail("trials: must be positive");
  if (!(num("budget") > 0)) fail("budget: must be positive");

  // geometry
  if (integer("mu_max") < 1 || integer("mu_max") > 30) fail("mu_max: must lie in [1, 30]");
  if (!(num("alpha") > 0 && num("alpha") < 1)) fail("alpha: must lie in (0, 1)");
  if (integer("C0") < 1) fail("C0: must be positive");
  if (integer("whitney_depth") < 1) fail("whitney_depth: must be positive");
  if (integer("samples") < 1) fail("samples: must be positive");
  if (!(integer("overlap_mu_lo") >= 1 && integer("overlap_mu_lo") <= integer("overlap_mu_hi")))
    fail("overlap_mu_lo: must lie in [1, overlap_mu_hi]");

  // spectra
  if (integer("band") < 1) fail("band: must be positive");
  if ((k == "paraproduct" || k == "hs-oracle") && integer("band") >= static_cast<long>(n / 2))
    fail("band: must stay below N/2");
  if (k == "paraproduct" && static_cast<double>(integer("band")) > length())
    fail("band: inputs need |xi| <= 1, i.e. band <= L");
  for (double s : list("s_values"))
    if (!(s > 0)) fail("s_values: slopes must be positive");
  if (!(num("lac_scale") > 0)) fail("lac_scale: must be positive");

  // tiles
  if (integer("tile_C0") < 1) fail("tile_C0: must be positive");
  if (integer("J") < 1) fail("J: must be positive");
  if (!(num("dilation") >= 1)) fail("dilation: must be >= 1");
  if (integer("rc_scales") < 1 || integer("rc_boxes") < 1 || integer("rc_intervals") < 1)
    fail("rc_scales, rc_boxes, rc_intervals: must be positive");
  if (!(num("rc_s") > 0)) fail("rc_s: must be positive");
  if (integer("max_tiles") < 1) fail("max_tiles: must be positive");
  if (integer("streams") < 1) fail("streams: must be positive");
  if (integer("j_lo") > integer("j_hi")) fail("j_lo: must not exceed j_hi");
  if (!(num("half_width") > 0) || !(num("filter_C") > 0)) fail("half_width, filter_C: must be positive");

  // sizes
  if (integer("family_members") < 1) fail("family_members: must be positive");
  if (integer("family_order") < 1 || integer("family_order") > 15) fail("family_order: must lie in [1, 15]");
  if (integer("family_smoothness") < -1 || integer("family_smoothness") == 0)
    fail("family_smoothness: -1 or positive");
  if (!(num("family_plateau") > 0 && num("family_plateau") < 1)) fail("family_plateau: must lie in (0, 1)");
  if (!(num("family_half_width") > 0 && num("family_half_width") <= 4.5))
    fail("family_half_width: support must stay inside 10 omega (half-width <= 4.5)");
  if (!(num("lambda") > 1)) fail("lambda: must exceed 1");
  if (integer("omega_grid") < 8) fail("omega_grid: must be >= 8");
  if (integer("levels") < 1) fail("levels: must be positive");
  if (integer("audit_trees") < 0) fail("audit_trees: must be >= 0");
  if (integer("xi_N") < 1 || !(num("xi_radius") > 0)) fail("xi_N, xi_radius: must be positive");
  if (!(num("model_plateau") > 0 && num("model_plateau") < 1)) fail("model_plateau: must lie in (0, 1)");
  if (integer("intervals") < 1) fail("intervals: must be positive");
  if (!(num("max_len") > 0 && num("max_len") <= 1)) fail("max_len: must lie in (0, 1]");
  if (!(num("phase_cell") > 0)) fail("phase_cell: must be positive");
  for (double d : list("N_decay"))
    if (d < 1 || d != std::floor(d)) fail("N_decay: positive integers");
  if (!(num("omega_lo") > 0 && num("omega_lo") < num("omega_hi") && num("omega_hi") < 1))
    fail("omega_lo, omega_hi: need 0 < omega_lo < omega_hi < 1");
  if (integer("decay_j_lo") > integer("decay_j_hi")) fail("decay_j_lo: must not exceed decay_j_hi");
  if (integer("cubes_per_scale") < 1) fail("cubes_per_scale: must be positive");
  if (!(num("noise_floor") > 0)) fail("noise_floor: must be positive");
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 14695981039346656037ULL;  // FNV-1a
  for (const auto& [k, v] : values_) {
    if (k == "n" || k == "seed") continue;
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string Config::text() const {
  std::ostringstream os;
  os << "kind = " << kind() << "\n";
  for (const auto& k : kSchema)
    if (k.key != "kind") os << k.key << " = " << values_.at(k.key) << "\n";
  return os.str();
}

}  // namespace bfr::xp
