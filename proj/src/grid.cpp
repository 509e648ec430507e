// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#include "bfr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bfr/fft.hpp"

namespace bfr {

std::size_t GridFunction::index_of(long freq, std::size_t n) {
  long m = static_cast<long>(n);
  long r = freq % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

long GridFunction::freq_of(std::size_t index, std::size_t n) {
  long i = static_cast<long>(index), m = static_cast<long>(n);
  // even N: index N/2 maps to -N/2
  return i < (m + 1) / 2 ? i : i - m;
}

GridFunction GridFunction::from_samples(std::vector<cplx> samples, double length,
                                        double origin) {
  if (samples.empty()) throw ContractError("GridFunction: empty grid");
  if (!(length > 0)) throw ContractError("GridFunction: length must be positive");
  GridFunction g;
  g.length_ = length;
  g.origin_ = origin;
  g.spectrum_.resize(samples.size());
  fft::forward(samples, g.spectrum_);
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (auto& c : g.spectrum_) c *= inv;
  g.samples_ = std::move(samples);
  return g;
}

GridFunction GridFunction::from_spectrum(std::vector<cplx> coeffs, double length,
                                         double origin) {
  if (coeffs.empty()) throw ContractError("GridFunction: empty grid");
  if (!(length > 0)) throw ContractError("GridFunction: length must be positive");
  GridFunction g;
  g.length_ = length;
  g.origin_ = origin;
  g.samples_.resize(coeffs.size());
  fft::backward(coeffs, g.samples_);
  g.spectrum_ = std::move(coeffs);
  return g;
}

GridFunction GridFunction::sample(std::size_t n, double length, double origin,
                                  const std::function<cplx(double)>& f) {
  std::vector<cplx> s(n);
  const double h = length / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = f(origin + static_cast<double>(k) * h);
  return from_samples(std::move(s), length, origin);
}

GridFunction GridFunction::zeros(std::size_t n, double length, double origin) {
  return from_spectrum(std::vector<cplx>(n), length, origin);
}

GridFunction GridFunction::mode(std::size_t n, long freq, cplx amp, double length,
                                double origin) {
  std::vector<cplx> c(n);
  c[index_of(freq, n)] = amp;
  return from_spectrum(std::move(c), length, origin);
}

bool GridFunction::same_grid(const GridFunction& o) const {
  return size() == o.size() && length_ == o.length_ && origin_ == o.origin_;
}

namespace {
void require_same(const GridFunction& a, const GridFunction& b) {
  if (!a.same_grid(b)) throw ContractError("grid functions live on different grids");
}
}  // namespace

GridFunction GridFunction::operator+(const GridFunction& o) const {
  require_same(*this, o);
  std::vector<cplx> s(samples_);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] += o.samples_[k];
  return from_samples(std::move(s), length_, origin_);
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  require_same(*this, o);
  std::vector<cplx> s(samples_);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] -= o.samples_[k];
  return from_samples(std::move(s), length_, origin_);
}

GridFunction GridFunction::operator*(const GridFunction& o) const {
  require_same(*this, o);
  std::vector<cplx> s(samples_);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= o.samples_[k];
  return from_samples(std::move(s), length_, origin_);
}

GridFunction GridFunction::scaled(cplx a) const {
  GridFunction g = *this;
  for (auto& v : g.samples_) v *= a;
  for (auto& v : g.spectrum_) v *= a;
  return g;
}

GridFunction GridFunction::conj() const {
  std::vector<cplx> s(samples_);
  for (auto& v : s) v = std::conj(v);
  return from_samples(std::move(s), length_, origin_);
}

GridFunction GridFunction::abs() const {
  std::vector<cplx> s(samples_.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::abs(samples_[k]);
  return from_samples(std::move(s), length_, origin_);
}

void GridFunction::write(std::ostream& os) const {
  auto flags = os.flags();
  auto prec = os.precision();
  os << std::setprecision(17);
  os << "N,L,origin\n" << size() << ',' << length_ << ',' << origin_ << '\n';
  os << "index,real,imag\n";
  for (std::size_t k = 0; k < size(); ++k)
    os << k << ',' << samples_[k].real() << ',' << samples_[k].imag() << '\n';
  os.flags(flags);
  os.precision(prec);
}

GridFunction GridFunction::read(std::istream& is) {
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(is, line)) throw std::runtime_error(std::string("grid read: missing ") + what);
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
  };
  next("header");
  next("shape");
  std::size_t n = 0;
  double len = 0, org = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n >> len >> org)) throw std::runtime_error("grid read: bad shape line");
  }
  next("column header");
  std::vector<cplx> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    next("record");
    std::istringstream ss(line);
    std::size_t idx;
    double re, im;
    if (!(ss >> idx >> re >> im) || idx >= n) throw std::runtime_error("grid read: bad record");
    s[idx] = {re, im};
  }
  return from_samples(std::move(s), len, org);
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw ContractError("lp_norm: p must be >= 1");
  const auto& s = f.samples();
  if (std::isinf(p)) {
    double m = 0;
    for (auto v : s) m = std::max(m, std::abs(v));
    return m;
  }
  // scale by the max to stay clear of overflow for large p
  double m = 0;
  for (auto v : s) m = std::max(m, std::abs(v));
  if (m == 0) return 0;
  double acc = 0;
  for (auto v : s) acc += std::pow(std::abs(v) / m, p);
  return m * std::pow(acc * f.step(), 1.0 / p);
}

cplx integral(const GridFunction& f) {
  cplx acc = 0;
  for (auto v : f.samples()) acc += v;
  return acc * f.step();
}

cplx inner(const GridFunction& f, const GridFunction& g) {
  if (!f.same_grid(g)) throw ContractError("inner: grid mismatch");
  cplx acc = 0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * std::conj(g[k]);
  return acc * f.step();
}

GridFunction modulate(const GridFunction& f, long a, double tol) {
  const std::size_t n = f.size();
  const long lo = -static_cast<long>(n / 2), hi = lo + static_cast<long>(n) - 1;
  double cmax = 0;
  for (auto c : f.spectrum()) cmax = std::max(cmax, std::abs(c));
  std::vector<cplx> out(n);
  for (long m = lo; m <= hi; ++m) {
    long src = m + a;
    if (src < lo || src > hi) continue;
    out[GridFunction::index_of(m, n)] = f.coeff(src);
  }
  // coefficients that have no destination
  for (long src = lo; src <= hi; ++src) {
    long m = src - a;
    if (m >= lo && m <= hi) continue;
    if (std::abs(f.coeff(src)) > tol * cmax) {
      std::ostringstream msg;
      msg << "modulate: frequency " << src << " shifted by " << a << " leaves band [" << lo
          << ", " << hi << "]";
      throw BandOverflow(msg.str());
    }
  }
  return GridFunction::from_spectrum(std::move(out), f.length(), f.origin());
}

GridFunction fourier_multiply(const GridFunction& f, const std::function<double(double)>& m) {
  const std::size_t n = f.size();
  std::vector<cplx> c(f.spectrum());
  for (std::size_t k = 0; k < n; ++k) c[k] *= m(static_cast<double>(GridFunction::freq_of(k, n)));
  return GridFunction::from_spectrum(std::move(c), f.length(), f.origin());
}

GridFunction fourier_multiply_c(const GridFunction& f, const std::function<cplx(double)>& m) {
  const std::size_t n = f.size();
  std::vector<cplx> c(f.spectrum());
  for (std::size_t k = 0; k < n; ++k) c[k] *= m(static_cast<double>(GridFunction::freq_of(k, n)));
  return GridFunction::from_spectrum(std::move(c), f.length(), f.origin());
}

}  // namespace bfr
