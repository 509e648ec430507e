// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
//
// bfr run --config exp.cfg [--seed S] [--out DIR]
// bfr compare BASELINE.csv CURRENT.csv [--budget 0.2]
// bfr list-experiments [--defaults KIND]
//
// BFR_N in the environment overrides the grid size of a run.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "bfr/experiments.hpp"

namespace fs = std::filesystem;
using namespace bfr;

namespace {

constexpr int kFail = 1;   // a threshold was missed
constexpr int kUsage = 2;  // invalid config or arguments

int cmd_run(const std::string& config, const std::string& kind, const std::string& seed, const std::string& out) {
  xp::Config c;
  if (!config.empty()) {
    std::ifstream is(config);
    if (!is) throw xp::ConfigError("cannot open " + config);
    c = xp::Config::parse(is);
  } else if (!kind.empty()) {
    c = xp::Config::defaults(kind);
  } else {
    throw xp::ConfigError("run: --config or --kind is required");
  }
  if (!seed.empty()) c.set("seed", seed);
  if (const char* n = std::getenv("BFR_N")) c.set("n", n);
  c.validate();

  const auto r = xp::run(c);
  xp::write_records(std::cout, r);
  for (const auto& ch : r.checks)
    std::cerr << (ch.pass ? "pass " : "FAIL ") << ch.name << (ch.detail.empty() ? "" : ": " + ch.detail) << "\n";
  for (const auto& note : r.notes) std::cerr << "note " << note << "\n";

  if (!out.empty()) {
    fs::create_directories(out);
    const fs::path table = fs::path(out) / "records.csv";
    const bool fresh = !fs::exists(table) || fs::file_size(table) == 0;
    std::ofstream os(table, std::ios::app);  // append-only
    xp::write_records(os, r, fresh);
    char name[96];
    std::snprintf(name, sizeof name, "summary-%s-%016llx-%llu.txt", r.kind.c_str(),
                  static_cast<unsigned long long>(r.hash), static_cast<unsigned long long>(r.seed));
    std::ofstream ss(fs::path(out) / name);
    xp::write_summary(ss, c, r);
  }
  return r.pass() ? 0 : kFail;
}

std::vector<xp::RunResult> load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw xp::ConfigError("cannot open " + path);
  auto v = xp::read_records(is);
  if (v.empty()) throw xp::ConfigError(path + ": no records");
  return v;
}

int cmd_compare(const std::string& base, const std::string& cur, double budget) {
  // the last run of each table
  const auto b = load(base).back(), c = load(cur).back();
  const auto d = xp::compare(b, c, budget);
  xp::write_drift(std::cout, d);
  return d.breaches == 0 ? 0 : kFail;
}

int cmd_list(const std::string& kind) {
  if (!kind.empty()) {
    std::cout << xp::Config::defaults(kind).text();
    return 0;
  }
  for (const auto& k : xp::kinds()) std::cout << k << "\t" << xp::describe_kind(k) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bfr: experiments on lacunary-polygon bilinear multipliers"};
  app.require_subcommand(1);

  std::string config, kind, seed, out;
  auto* run = app.add_subcommand("run", "run one experiment and write its records");
  run->add_option("--config", config, "key = value experiment file");
  run->add_option("--kind", kind, "run a kind with its default config");
  run->add_option("--seed", seed, "override the seed (u64)");
  run->add_option("--out", out, "directory for records.csv and the run summary");

  std::string base, cur;
  double budget = 0.2;
  auto* cmp = app.add_subcommand("compare", "drift between two record tables");
  cmp->add_option("baseline", base, "baseline records")->required();
  cmp->add_option("current", cur, "current records")->required();
  cmp->add_option("--budget", budget, "allowed relative drift");

  std::string defaults_kind;
  auto* list = app.add_subcommand("list-experiments", "experiment kinds");
  list->add_option("--defaults", defaults_kind, "print the default config of a kind");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, kind, seed, out);
    if (*cmp) return cmd_compare(base, cur, budget);
    if (*list) return cmd_list(defaults_kind);
  } catch (const xp::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
