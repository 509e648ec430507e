// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "bfr/experiments.hpp"

namespace bfr::xp {

namespace {

std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// shortest text that reads back to the same double
std::string exact(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

bool RunResult::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

double RunResult::metric(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return m.value;
  throw std::out_of_range("metric '" + name + "' not recorded");
}

bool RunResult::has(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return true;
  return false;
}

void write_records(std::ostream& os, const RunResult& r, bool header) {
  if (header) os << "hash,seed,kind,metric,value,N,seconds\n";
  for (const auto& m : r.metrics)
    os << hex(r.hash) << ',' << r.seed << ',' << r.kind << ',' << m.name << ',' << exact(m.value) << ','
       << m.n << ',' << exact(r.seconds) << '\n';
}

void write_summary(std::ostream& os, const Config& c, const RunResult& r) {
  os << "run.kind = " << r.kind << "\n"
     << "run.hash = " << hex(r.hash) << "\n"
     << "run.seed = " << r.seed << "\n"
     << "run.N = " << r.n << "\n"
     << "run.seconds = " << exact(r.seconds) << "\n"
     << "run.pass = " << (r.pass() ? "true" : "false") << "\n";
  for (const auto& k : schema()) os << "config." << k.key << " = " << c.str(k.key) << "\n";
  for (const auto& m : r.metrics) os << "metrics." << m.name << " = " << exact(m.value) << "\n";
  for (const auto& ch : r.checks) {
    os << "checks." << ch.name << " = " << (ch.pass ? "pass" : "fail") << "\n";
    if (!ch.detail.empty()) os << "checks." << ch.name << ".detail = " << ch.detail << "\n";
  }
  for (std::size_t k = 0; k < r.notes.size(); ++k) os << "notes." << k << " = " << r.notes[k] << "\n";
}

std::vector<RunResult> read_records(std::istream& is) {
  std::vector<RunResult> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line.rfind("hash,", 0) == 0) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 7) throw ConfigError("records line " + std::to_string(lineno) + ": expected 7 fields");
    try {
      const std::uint64_t hash = std::stoull(f[0], nullptr, 16), seed = std::stoull(f[1]);
      if (out.empty() || out.back().hash != hash || out.back().seed != seed || out.back().kind != f[2]) {
        out.emplace_back();
        out.back().hash = hash;
        out.back().seed = seed;
        out.back().kind = f[2];
      }
      auto& r = out.back();
      r.seconds = std::stod(f[6]);
      r.metrics.push_back({f[3], std::stod(f[4]), static_cast<std::size_t>(std::stoull(f[5]))});
      r.n = std::max(r.n, r.metrics.back().n);
    } catch (const std::logic_error&) {
      throw ConfigError("records line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return out;
}

DriftReport compare(const RunResult& baseline, const RunResult& current, double budget) {
  if (baseline.hash != current.hash)
    throw ConfigError("compare: config hash mismatch (" + hex(baseline.hash) + " vs " + hex(current.hash) + ")");
  DriftReport d;
  if (baseline.seed != current.seed) {
    d.new_baseline = true;
    d.message = "seed changed (" + std::to_string(baseline.seed) + " -> " + std::to_string(current.seed) +
                "): new baseline required, values not compared";
    return d;
  }
  for (const auto& b : baseline.metrics) {
    if (!current.has(b.name)) continue;
    Drift row{b.name, b.value, current.metric(b.name), 0, false};
    const double diff = std::abs(row.current - row.baseline);
    row.relative = diff == 0 ? 0 : diff / std::abs(row.baseline);  // inf from a zero baseline
    row.breach = !(row.relative <= budget);
    d.breaches += row.breach;
    d.rows.push_back(row);
  }
  d.message = std::to_string(d.rows.size()) + " metrics compared, " + std::to_string(d.breaches) +
              " beyond the " + exact(budget) + " budget";
  return d;
}

void write_drift(std::ostream& os, const DriftReport& d) {
  os << "# " << d.message << "\n";
  if (d.new_baseline) return;
  os << "metric,baseline,current,relative,breach\n";
  for (const auto& r : d.rows)
    os << r.metric << ',' << exact(r.baseline) << ',' << exact(r.current) << ',' << exact(r.relative) << ','
       << (r.breach ? "yes" : "no") << '\n';
}

}  // namespace bfr::xp
