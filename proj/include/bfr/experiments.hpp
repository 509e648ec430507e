// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfr/bilinear.hpp"
#include "bfr/sizes.hpp"
#include "bfr/timefreq.hpp"

// Declarative experiments shared by the command line tool and the acceptance
// run. A config is flat key = value text; every tunable of the library has
// exactly one key in the schema.
namespace bfr::xp {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct KeyInfo {
  std::string key;
  std::string fallback;  // default for every kind unless overridden
  std::string help;
};
const std::vector<KeyInfo>& schema();
const std::vector<std::string>& kinds();
std::string describe_kind(const std::string& kind);

class Config {
 public:
  // schema defaults with the kind's overrides
  static Config defaults(const std::string& kind);
  // "key = value" lines, '#' comments; unknown keys are errors. The kind
  // must be given; its defaults fill the remaining keys.
  static Config parse(std::istream& is);
  static Config parse_string(const std::string& text);

  const std::string& kind() const { return values_.at("kind"); }
  std::string str(const std::string& key) const;
  double num(const std::string& key) const;
  long integer(const std::string& key) const;
  std::uint64_t seed() const;
  std::size_t n() const;
  double length() const;  // 2^k0
  std::vector<double> list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  // throws ConfigError naming the violated constraint
  void validate() const;
  // over every key except n and seed: refining the grid or reseeding keeps it
  std::uint64_t hash() const;
  std::string text() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct Metric {
  std::string name;
  double value = 0;
  std::size_t n = 0;  // grid size the value was measured on (0: grid free)
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  std::string kind;
  std::uint64_t hash = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::vector<Metric> metrics;
  std::vector<Check> checks;  // thresholds deciding the exit status
  std::vector<std::string> notes;
  double seconds = 0;

  bool pass() const;
  double metric(const std::string& name) const;  // throws when absent
  bool has(const std::string& name) const;
  void add(const std::string& name, double v, std::size_t grid = 0) { metrics.push_back({name, v, grid}); }
  void check(const std::string& name, bool ok, const std::string& detail = "") {
    checks.push_back({name, ok, detail});
  }
};

RunResult run(const Config& c);

// table: "hash,seed,kind,metric,value,N,seconds" then one row per metric
void write_records(std::ostream& os, const RunResult& r, bool header = true);
// nested key-value text
void write_summary(std::ostream& os, const Config& c, const RunResult& r);
std::vector<RunResult> read_records(std::istream& is);

struct Drift {
  std::string metric;
  double baseline = 0, current = 0, relative = 0;
  bool breach = false;
};
struct DriftReport {
  bool comparable = true;   // same hash
  bool new_baseline = false;  // seeds differ: values are not compared
  std::string message;
  std::vector<Drift> rows;
  std::size_t breaches = 0;
};
// metrics present in both runs; N is ignored so a refined run compares against
// its coarse baseline. Throws ConfigError on hash mismatch.
DriftReport compare(const RunResult& baseline, const RunResult& current, double budget = 0.2);
void write_drift(std::ostream& os, const DriftReport& d);

// ---- desk tile streams ----

struct StreamSpec {
  int streams = 3;
  double half_width = 16;  // |I^1_mu| / 2
  int j_lo = 0, j_hi = 3;
  double margin = 4;       // Whitney range beyond [-h, h]
  double filter_C = 8;
  tf::TileParams params = tf::TileParams::desk();
  bool sparse = false;     // keep only the largest sparse class of cubes
};

// I^1 = a + [-h, h], I^2 = -a + s [-h, h], a = 1.5 h + 3 h (mu - 1),
// s = 1 + (mu - 1) / 2; base point at the centers, theta = 0
LineData stream_line(int mu, double half_width);

// Whitney cubes of the shared coordinates, L_mu-boxes with all dyadic
// tiles in [0, L), then the frequency filter against J^i_mu
std::vector<sizes::ModelStream> desk_streams(const StreamSpec& spec, double length = 1.0);

}  // namespace bfr::xp
