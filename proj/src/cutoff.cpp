// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/cutoff.hpp"

#include <cmath>
#include <sstream>

namespace bfr {

double bspline_centered(int m, double t) {
  const double x = t + 0.5 * m;  // N_m on [0, m]
  if (x <= 0.0 || x >= m) return 0.0;
  std::vector<double> a(static_cast<std::size_t>(m) + 1, 0.0);
  for (int i = 0; i < m; ++i) {
    double u = x - i;
    a[static_cast<std::size_t>(i)] = (u >= 0.0 && u < 1.0) ? 1.0 : 0.0;
  }
  for (int j = 2; j <= m; ++j)
    for (int i = 0; i + j <= m; ++i) {
      double u = x - i;
      a[static_cast<std::size_t>(i)] =
          (u * a[static_cast<std::size_t>(i)] + (j - u) * a[static_cast<std::size_t>(i) + 1]) / (j - 1);
    }
  return a[0];
}

XiKernel::XiKernel(XiParams p) : params_(p) {
  if (p.decay_n < 1) throw ContractError("XiKernel: decay_n must be >= 1");
  if (!(p.spectral_radius > 0)) throw ContractError("XiKernel: spectral radius must be positive");
  m_ = p.decay_n * p.decay_n;
  if (m_ % 2) ++m_;
  const int r = m_ / 2;
  kappa_ = std::sqrt(2.0) * r / p.spectral_radius;
  c_ = 1.0 / (kappa_ * bspline_centered(m_, 0.0) * (1.0 + 1.0 / std::sqrt(2.0)));
}

namespace {
double sinc(double u) {
  if (u == 0.0) return 1.0;
  return std::sin(kPi * u) / (kPi * u);
}
}  // namespace

double XiKernel::value(double x) const {
  return c_ * (std::pow(sinc(x / kappa_), m_) + std::pow(sinc(std::sqrt(2.0) * x / kappa_), m_));
}

double XiKernel::hat(double xi) const {
  const double r2 = std::sqrt(2.0);
  return c_ * (kappa_ * bspline_centered(m_, kappa_ * xi) +
               (kappa_ / r2) * bspline_centered(m_, kappa_ * xi / r2));
}

std::vector<cplx> indicator_spectrum(const std::vector<Interval>& E, std::size_t n, double length,
                                     double origin) {
  std::vector<cplx> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    long f = GridFunction::freq_of(k, n);
    cplx acc = 0;
    for (const auto& I : E) {
      if (f == 0) {
        acc += I.length() / length;
      } else {
        const double w = 2.0 * kPi * static_cast<double>(f) / length;
        acc += (std::polar(1.0, -w * (I.lo - origin)) - std::polar(1.0, -w * (I.hi - origin))) /
               cplx(0.0, 2.0 * kPi * static_cast<double>(f));
      }
    }
    c[k] = acc;
  }
  return c;
}

SmoothedCutoff smoothed_cutoff(const std::vector<Interval>& E, double scale, const XiParams& p,
                               std::size_t n, double length, double origin) {
  if (!(scale > 0)) throw ContractError("smoothed_cutoff: scale must be positive");
  XiKernel xi(p);
  const double fmax = p.spectral_radius * length / scale;  // integer-frequency radius
  if (fmax >= static_cast<double>(n / 2)) {
    std::ostringstream msg;
    msg << "smoothed_cutoff: kernel band " << fmax << " exceeds grid band " << n / 2;
    throw BandOverflow(msg.str());
  }
  auto c = indicator_spectrum(E, n, length, origin);
  for (std::size_t k = 0; k < n; ++k) {
    double f = static_cast<double>(GridFunction::freq_of(k, n)) / length;
    c[k] *= xi.hat(scale * f);
  }
  auto g = GridFunction::from_spectrum(std::move(c), length, origin);
  std::vector<cplx> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = g[k].real();
  return {E, scale, p, GridFunction::from_samples(std::move(s), length, origin)};
}

}  // namespace bfr
