// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfr {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool meets(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  // alpha-dilate about the center
  Interval dilate(double a) const {
    double c = center(), h = 0.5 * a * length();
    return {c - h, c + h};
  }
  bool operator==(const Interval&) const = default;
};

// -A - B for intervals
inline Interval neg_sum(const Interval& a, const Interval& b) {
  return {-a.hi - b.hi, -a.lo - b.lo};
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Precondition / contract violations.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Spectrum left the representable band.
class BandOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// splitmix64: per-trial seed derivation
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return mix_seed(seed ^ mix_seed(trial + 1));
}

}  // namespace bfr
