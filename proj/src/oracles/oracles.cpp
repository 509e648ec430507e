// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace bfr::oracle {

std::vector<cplx> naive_dft(const std::vector<cplx>& f) {
  const std::size_t n = f.size();
  std::vector<cplx> c(n);
  for (std::size_t m = 0; m < n; ++m) {
    cplx acc = 0;
    for (std::size_t k = 0; k < n; ++k) {
      // reduce the phase index exactly before converting to an angle
      std::size_t r = (m * k) % n;
      acc += f[k] * std::polar(1.0, -2.0 * kPi * static_cast<double>(r) / static_cast<double>(n));
    }
    c[m] = acc / static_cast<double>(n);
  }
  return c;
}

std::vector<double> maximal_bruteforce(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      double s = 0;
      for (std::size_t k = a; k <= b; ++k) s += v[k];
      double m = s / static_cast<double>(b - a + 1);
      for (std::size_t x = a; x <= b; ++x) out[x] = std::max(out[x], m);
    }
  return out;
}

cplx eval_trig(const GridFunction& f, double x) {
  const std::size_t n = f.size();
  cplx acc = 0;
  for (std::size_t k = 0; k < n; ++k) {
    cplx c = f.spectrum()[k];
    if (c == 0.0) continue;
    long m = GridFunction::freq_of(k, n);
    acc += c * std::polar(1.0, 2.0 * kPi * static_cast<double>(m) * (x - f.origin()) / f.length());
  }
  return acc;
}

namespace {
struct Modes {
  std::vector<double> freq;  // physical frequency n/L
  std::vector<cplx> coef;    // with the origin phase folded in
};

Modes nonzero_modes(const GridFunction& f) {
  Modes m;
  const std::size_t n = f.size();
  for (std::size_t k = 0; k < n; ++k) {
    cplx c = f.spectrum()[k];
    if (std::abs(c) == 0.0) continue;
    double nu = static_cast<double>(GridFunction::freq_of(k, n)) / f.length();
    m.freq.push_back(nu);
    m.coef.push_back(c * std::polar(1.0, -2.0 * kPi * nu * f.origin()));
  }
  return m;
}

}  // namespace

GridFunction hs_quadrature(double s, const GridFunction& f, const GridFunction& g, PvQuadrature q) {
  const Modes mf = nonzero_modes(f), mg = nonzero_modes(g);
  double band = 1.0;
  for (double v : mf.freq) band = std::max(band, std::abs(v) * f.length());
  for (double v : mg.freq) band = std::max(band, std::abs(v) * g.length());
  const double L = f.length();
  const double R = q.taper_radius > 0 ? q.taper_radius : 2.0 * L;
  const double dt = q.step > 0 ? q.step : L / (8.0 * band * std::max(1.0, s));
  const double T = q.t_max > 0 ? q.t_max : 7.0 * R;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(T / dt));
  const std::size_t nf = mf.freq.size(), ng = mg.freq.size();

  // phasors advanced multiplicatively along t = j dt
  std::vector<cplx> sf(nf), sg(ng);
  for (std::size_t i = 0; i < nf; ++i) sf[i] = std::polar(1.0, 2 * kPi * mf.freq[i] * s * dt);
  for (std::size_t i = 0; i < ng; ++i) sg[i] = std::polar(1.0, 2 * kPi * mg.freq[i] * dt);

  std::vector<cplx> out(f.size());
  std::vector<cplx> fp(nf), fm(nf), gp(ng), gm(ng);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double x = f.x(k);
    cplx fx = 0, gx = 0, dfx = 0, dgx = 0;
    for (std::size_t i = 0; i < nf; ++i) {
      fp[i] = fm[i] = mf.coef[i] * std::polar(1.0, 2 * kPi * mf.freq[i] * x);
      fx += fp[i];
      dfx += fp[i] * cplx(0, 2 * kPi * mf.freq[i]);
    }
    for (std::size_t i = 0; i < ng; ++i) {
      gp[i] = gm[i] = mg.coef[i] * std::polar(1.0, 2 * kPi * mg.freq[i] * x);
      gx += gp[i];
      dgx += gp[i] * cplx(0, 2 * kPi * mg.freq[i]);
    }
    // t -> 0 limit of [f(x+st)g(x-t) - f(x-st)g(x+t)]/t is 2(s f' g - f g'),
    // weighted by 1/2 at the trapezoid endpoint
    cplx acc = s * dfx * gx - fx * dgx;
    for (std::size_t j = 1; j <= steps; ++j) {
      cplx a = 0, b = 0, c = 0, d = 0;
      for (std::size_t i = 0; i < nf; ++i) {
        fp[i] *= sf[i];
        fm[i] *= std::conj(sf[i]);
        a += fp[i];
        b += fm[i];
      }
      for (std::size_t i = 0; i < ng; ++i) {
        gp[i] *= sg[i];
        gm[i] *= std::conj(sg[i]);
        c += gp[i];
        d += gm[i];
      }
      const double t = static_cast<double>(j) * dt;
      const double w = std::exp(-(t / R) * (t / R)) / t * (j == steps ? 0.5 : 1.0);
      acc += w * (a * d - b * c);
    }
    out[k] = acc * dt;
  }
  return GridFunction::from_samples(std::move(out), f.length(), f.origin());
}

GridFunction bilinear_direct(const std::function<cplx(long, long)>& m, const GridFunction& f,
                             const GridFunction& g, double tol) {
  const std::size_t n = f.size();
  std::vector<cplx> h(n);
  for (std::size_t a = 0; a < n; ++a) {
    cplx fa = f.spectrum()[a];
    if (std::abs(fa) <= tol) continue;
    for (std::size_t b = 0; b < n; ++b) {
      cplx gb = g.spectrum()[b];
      if (std::abs(gb) <= tol) continue;
      long n1 = GridFunction::freq_of(a, n), n2 = GridFunction::freq_of(b, n);
      h[GridFunction::index_of(n1 + n2, n)] += fa * gb * m(n1, n2);
    }
  }
  return GridFunction::from_spectrum(std::move(h), f.length(), f.origin());
}

}  // namespace bfr::oracle
