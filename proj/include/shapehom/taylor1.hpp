#pragma once

#include <array>
#include <cassert>
#include <cmath>

#include "shapehom/errors.hpp"

namespace shapehom {

// Univariate truncated Taylor expansion in t; coefficient c[i] stores the
// i-th derivative divided by i!. Used to differentiate geometry quantities
// (edge lengths, averaged tangents) along a known polynomial vertex path.
class Taylor1 {
 public:
  static constexpr int kMaxOrder = 8;

  explicit Taylor1(int order = 0) : order_(order) { c_.fill(0.0); }

  static Taylor1 constant(int order, double v) {
    Taylor1 t(order);
    t.c_[0] = v;
    return t;
  }

  int order() const { return order_; }
  double coeff(int i) const {
    assert(i >= 0 && i <= order_);
    return c_[i];
  }
  double& coeff(int i) {
    assert(i >= 0 && i <= order_);
    return c_[i];
  }
  double value() const { return c_[0]; }
  double derivative(int m) const {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f * coeff(m);
  }

  Taylor1& operator+=(const Taylor1& o) {
    assert(order_ == o.order_);
    for (int i = 0; i <= order_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Taylor1& operator-=(const Taylor1& o) {
    assert(order_ == o.order_);
    for (int i = 0; i <= order_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  friend Taylor1 operator+(Taylor1 a, const Taylor1& b) { return a += b; }
  friend Taylor1 operator-(Taylor1 a, const Taylor1& b) { return a -= b; }
  friend Taylor1 operator*(double s, Taylor1 a) {
    for (int i = 0; i <= a.order_; ++i) a.c_[i] *= s;
    return a;
  }
  friend Taylor1 operator*(Taylor1 a, double s) { return s * a; }
  friend Taylor1 operator+(Taylor1 a, double s) {
    a.c_[0] += s;
    return a;
  }

  friend Taylor1 operator*(const Taylor1& a, const Taylor1& b) {
    assert(a.order_ == b.order_);
    Taylor1 r(a.order_);
    for (int i = 0; i <= a.order_; ++i)
      for (int j = 0; i + j <= a.order_; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    return r;
  }

  friend Taylor1 operator/(const Taylor1& a, const Taylor1& b) {
    assert(a.order_ == b.order_);
    if (b.c_[0] == 0.0) throw DomainError("taylor1: division by zero value");
    Taylor1 r(a.order_);
    for (int i = 0; i <= a.order_; ++i) {
      double acc = a.c_[i];
      for (int j = 0; j < i; ++j) acc -= r.c_[j] * b.c_[i - j];
      r.c_[i] = acc / b.c_[0];
    }
    return r;
  }

  friend Taylor1 sqrt(const Taylor1& a) {
    if (!(a.c_[0] > 0.0))
      throw DomainError("taylor1: sqrt of nonpositive value");
    Taylor1 r(a.order_);
    r.c_[0] = std::sqrt(a.c_[0]);
    for (int i = 1; i <= a.order_; ++i) {
      double acc = a.c_[i];
      for (int j = 1; j < i; ++j) acc -= r.c_[j] * r.c_[i - j];
      r.c_[i] = acc / (2.0 * r.c_[0]);
    }
    return r;
  }

 private:
  int order_;
  std::array<double, kMaxOrder + 1> c_;
};

// A 2D point moving along a polynomial path.
struct Taylor1Vec2 {
  Taylor1 x, y;
  friend Taylor1Vec2 operator+(const Taylor1Vec2& a, const Taylor1Vec2& b) {
    return {a.x + b.x, a.y + b.y};
  }
  friend Taylor1Vec2 operator-(const Taylor1Vec2& a, const Taylor1Vec2& b) {
    return {a.x - b.x, a.y - b.y};
  }
  friend Taylor1 dot(const Taylor1Vec2& a, const Taylor1Vec2& b) {
    return a.x * b.x + a.y * b.y;
  }
};

}  // namespace shapehom
