// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <cmath>
#include <vector>

namespace bfr {

// Truncated Taylor series c[k] = f^{(k)}(x0)/k!; exact derivatives of closed
// forms without finite differences.
class Jet {
 public:
  explicit Jet(int order, double value = 0.0) : c_(static_cast<std::size_t>(order) + 1, 0.0) {
    c_[0] = value;
  }
  static Jet variable(int order, double x0) {
    Jet j(order, x0);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double value() const { return c_[0]; }
  double coef(int k) const { return c_[static_cast<std::size_t>(k)]; }
  double& coef(int k) { return c_[static_cast<std::size_t>(k)]; }
  double derivative(int k) const {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f * coef(k);
  }

  Jet operator+(const Jet& o) const {
    Jet r = *this;
    for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] += o.c_[k];
    return r;
  }
  Jet operator-(const Jet& o) const {
    Jet r = *this;
    for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] -= o.c_[k];
    return r;
  }
  Jet operator-() const { return scaled(-1.0); }
  Jet operator+(double a) const {
    Jet r = *this;
    r.c_[0] += a;
    return r;
  }
  Jet scaled(double a) const {
    Jet r = *this;
    for (auto& v : r.c_) v *= a;
    return r;
  }
  Jet operator*(const Jet& o) const {
    Jet r(order());
    const int n = order();
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) r.coef(i + j) += coef(i) * o.coef(j);
    return r;
  }
  Jet operator/(const Jet& o) const {
    Jet q(order());
    const int n = order();
    for (int k = 0; k <= n; ++k) {
      double s = coef(k);
      for (int j = 1; j <= k; ++j) s -= o.coef(j) * q.coef(k - j);
      q.coef(k) = s / o.coef(0);
    }
    return q;
  }

  friend Jet exp(const Jet& a) {
    Jet e(a.order());
    e.coef(0) = std::exp(a.coef(0));
    for (int k = 1; k <= a.order(); ++k) {
      double s = 0;
      for (int j = 1; j <= k; ++j) s += j * a.coef(j) * e.coef(k - j);
      e.coef(k) = s / k;
    }
    return e;
  }
  friend Jet pow(const Jet& a, int n) {
    Jet r(a.order(), 1.0), b = a;
    while (n > 0) {
      if (n & 1) r = r * b;
      b = b * b;
      n >>= 1;
    }
    return r;
  }

 private:
  std::vector<double> c_;
};

}  // namespace bfr
