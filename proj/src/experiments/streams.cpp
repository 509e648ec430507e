// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include <algorithm>
#include <cmath>

#include "bfr/experiments.hpp"

namespace bfr::xp {

LineData stream_line(int mu, double half_width) {
  if (mu < 1) throw ContractError("stream_line: mu >= 1");
  const double h = half_width;
  const double a = 1.5 * h + 3 * h * (mu - 1), s = 1 + 0.5 * (mu - 1);
  return LineData::make(mu, {a - h, a + h}, {-a - s * h, -a + s * h}, std::lround(a), std::lround(-a));
}

std::vector<sizes::ModelStream> desk_streams(const StreamSpec& spec, double length) {
  const auto& p = spec.params;
  const double r = spec.half_width + spec.margin;
  auto cubes = tf::whitney_cubes3(p.C0, spec.j_lo, spec.j_hi, -r, r, p.lattice_bits);
  if (spec.sparse && !cubes.empty()) {
    auto cls = tf::sparsify(cubes, p.J);
    auto best = std::max_element(cls.members.begin(), cls.members.end(),
                                 [](const auto& a, const auto& b) { return a.size() < b.size(); });
    std::vector<tf::WhitneyCube3> keep;
    for (auto k : *best) keep.push_back(cubes[k]);
    cubes = std::move(keep);
  }
  const auto bars = tf::enlarge_omegas(cubes, p);

  std::vector<sizes::ModelStream> out;
  for (int mu = 1; mu <= spec.streams; ++mu) {
    sizes::ModelStream st;
    st.line = stream_line(mu, spec.half_width);
    st.tiles = tf::build_multitiles(mu, st.line.s, cubes, bars, {0, length}, p);
    st.members = sizes::frequency_filter(st.tiles, tf::all_members(st.tiles),
                                         sizes::shifted_intervals(st.line), spec.filter_C)
                     .kept;
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace bfr::xp
