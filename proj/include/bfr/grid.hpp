// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bfr/core.hpp"

namespace bfr {

// Samples of a function on the periodic grid x_k = origin + k*L/N together
// with its discrete spectrum. Both are computed at construction, so a
// GridFunction is an immutable value.
//
// Spectral convention: f(x_k) = sum_n c_n e^{2 pi i n (x_k - origin)/L},
// c_n = (1/N) sum_k f(x_k) e^{-2 pi i n k/N}, n in [-N/2, N/2).
// Frequencies are integers (cycles per period); physical frequency is n/L.
// Parseval: ||f||_2^2 = L * sum |c_n|^2.
class GridFunction {
 public:
  GridFunction() = default;

  static GridFunction from_samples(std::vector<cplx> samples, double length = 1.0,
                                   double origin = 0.0);
  // coefficients in FFT order (index n mod N)
  static GridFunction from_spectrum(std::vector<cplx> coeffs, double length = 1.0,
                                    double origin = 0.0);
  static GridFunction sample(std::size_t n, double length, double origin,
                             const std::function<cplx(double)>& f);
  static GridFunction zeros(std::size_t n, double length = 1.0, double origin = 0.0);
  // amp * e^{2 pi i freq (x - origin)/L}
  static GridFunction mode(std::size_t n, long freq, cplx amp = 1.0, double length = 1.0,
                           double origin = 0.0);

  std::size_t size() const { return samples_.size(); }
  double length() const { return length_; }
  double origin() const { return origin_; }
  double step() const { return length_ / static_cast<double>(samples_.size()); }
  double x(std::size_t k) const { return origin_ + static_cast<double>(k) * step(); }
  long nyquist() const { return static_cast<long>(size() / 2); }

  const std::vector<cplx>& samples() const { return samples_; }
  const std::vector<cplx>& spectrum() const { return spectrum_; }
  cplx operator[](std::size_t k) const { return samples_[k]; }

  // coefficient at integer frequency (taken mod N)
  cplx coeff(long freq) const { return spectrum_[index_of(freq, size())]; }

  static std::size_t index_of(long freq, std::size_t n);
  static long freq_of(std::size_t index, std::size_t n);

  bool same_grid(const GridFunction& o) const;

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  GridFunction operator*(const GridFunction& o) const;  // pointwise
  GridFunction scaled(cplx a) const;
  GridFunction conj() const;
  GridFunction abs() const;

  // structured text: header "N,L,origin", then "index,real,imag" records
  void write(std::ostream& os) const;
  static GridFunction read(std::istream& is);

 private:
  std::vector<cplx> samples_;
  std::vector<cplx> spectrum_;
  double length_ = 1.0;
  double origin_ = 0.0;
};

// (sum |f_k|^p L/N)^{1/p}; p = infinity gives max |f_k|.
double lp_norm(const GridFunction& f, double p);
// integral of f over the period
cplx integral(const GridFunction& f);
// <f, g> = integral of f * conj(g)
cplx inner(const GridFunction& f, const GridFunction& g);

// (M_a f)^(n) = f^(n + a). Coefficients pushed out of the band with
// magnitude above tol * max|c| raise BandOverflow.
GridFunction modulate(const GridFunction& f, long a, double tol = 1e-13);

// multiply the spectrum by m(n) for integer frequency n
GridFunction fourier_multiply(const GridFunction& f, const std::function<double(double)>& m);
GridFunction fourier_multiply_c(const GridFunction& f, const std::function<cplx(double)>& m);

// smooth Fourier restriction: spectrum times a frequency bump
inline GridFunction smooth_restrict(const GridFunction& f, const std::function<double(double)>& bump) {
  return fourier_multiply(f, bump);
}

}  // namespace bfr
