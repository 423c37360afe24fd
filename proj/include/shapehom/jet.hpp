#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <span>

#include "shapehom/errors.hpp"
#include "shapehom/vec2.hpp"

namespace shapehom {

// Truncated bivariate Taylor expansion about a point. The coefficient
// c(a,b) stores  d^{a+b} f / (dx^a dy^b) / (a! b!),  kept up to total
// degree `order`. Storage is dense graded-lex:
//   (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
// All arithmetic truncates at `order`. Orders above kMaxOrder are rejected;
// the algorithms here never need more.
class Jet2 {
 public:
  static constexpr int kMaxOrder = 8;
  static constexpr int kMaxSize = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

  explicit Jet2(int order) : order_(order) {
    assert(order >= 0 && order <= kMaxOrder);
    c_.fill(0.0);
  }

  static Jet2 constant(int order, double v) {
    Jet2 j(order);
    j.c_[0] = v;
    return j;
  }

  // Coordinate seeds: value x0 (resp. y0) with unit first partial.
  static Jet2 seed_x(int order, double x0) {
    Jet2 j(order);
    j.c_[0] = x0;
    if (order >= 1) j.c_[idx(1, 0)] = 1.0;
    return j;
  }
  static Jet2 seed_y(int order, double y0) {
    Jet2 j(order);
    j.c_[0] = y0;
    if (order >= 1) j.c_[idx(0, 1)] = 1.0;
    return j;
  }

  int order() const { return order_; }
  int size() const { return (order_ + 1) * (order_ + 2) / 2; }

  static int idx(int a, int b) {
    int d = a + b;
    return d * (d + 1) / 2 + b;
  }

  double coeff(int a, int b) const {
    assert(a >= 0 && b >= 0 && a + b <= order_);
    return c_[idx(a, b)];
  }
  double& coeff(int a, int b) {
    assert(a >= 0 && b >= 0 && a + b <= order_);
    return c_[idx(a, b)];
  }

  double value() const { return c_[0]; }

  // Mixed partial d^{a+b} f / dx^a dy^b  =  a! b! c(a,b).
  double partial(int a, int b) const {
    return factorial(a) * factorial(b) * coeff(a, b);
  }

  Jet2& operator+=(const Jet2& o) {
    assert(order_ == o.order_);
    for (int i = 0; i < size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    assert(order_ == o.order_);
    for (int i = 0; i < size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet2& operator*=(double s) {
    for (int i = 0; i < size(); ++i) c_[i] *= s;
    return *this;
  }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
  friend Jet2 operator*(double s, Jet2 a) { return a *= s; }
  friend Jet2 operator+(Jet2 a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet2 operator-(Jet2 a, double s) {
    a.c_[0] -= s;
    return a;
  }

  // Truncated Cauchy product.
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    assert(a.order_ == b.order_);
    const int K = a.order_;
    Jet2 r(K);
    for (int d1 = 0; d1 <= K; ++d1) {
      for (int a1 = d1; a1 >= 0; --a1) {
        int b1 = d1 - a1;
        double ca = a.c_[idx(a1, b1)];
        if (ca == 0.0) continue;
        for (int d2 = 0; d2 <= K - d1; ++d2) {
          for (int a2 = d2; a2 >= 0; --a2) {
            int b2 = d2 - a2;
            r.c_[idx(a1 + a2, b1 + b2)] += ca * b.c_[idx(a2, b2)];
          }
        }
      }
    }
    return r;
  }

  static double factorial(int n) {
    static const std::array<double, 13> table = {
        1., 1., 2., 6., 24., 120., 720., 5040., 40320., 362880., 3628800.,
        39916800., 479001600.};
    assert(n >= 0 && n < static_cast<int>(table.size()));
    return table[n];
  }

 private:
  int order_;
  std::array<double, kMaxSize> c_;
};

inline Jet2 jet_powi(const Jet2& a, int k) {
  assert(k >= 0);
  Jet2 r = Jet2::constant(a.order(), 1.0);
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

// Square root by the graded coefficient recurrence s*s = f. Requires a
// positive constant term.
inline Jet2 jet_sqrt(const Jet2& f) {
  if (!(f.value() > 0.0))
    throw DomainError("jet_sqrt: nonpositive constant term");
  const int K = f.order();
  Jet2 s(K);
  s.coeff(0, 0) = std::sqrt(f.value());
  for (int d = 1; d <= K; ++d) {
    for (int a = d; a >= 0; --a) {
      int b = d - a;
      // f_(a,b) = 2 s_00 s_(a,b) + sum over proper splits.
      double acc = 0.0;
      for (int a1 = 0; a1 <= a; ++a1) {
        for (int b1 = 0; b1 <= b; ++b1) {
          if (a1 == 0 && b1 == 0) continue;
          if (a1 == a && b1 == b) continue;
          acc += s.coeff(a1, b1) * s.coeff(a - a1, b - b1);
        }
      }
      s.coeff(a, b) = (f.coeff(a, b) - acc) / (2.0 * s.coeff(0, 0));
    }
  }
  return s;
}

// First directional derivative as a jet one order lower: g = grad f . v.
inline Jet2 jet_dir_reduce(const Jet2& f, Vec2 v) {
  assert(f.order() >= 1);
  const int K = f.order() - 1;
  Jet2 g(K);
  for (int d = 0; d <= K; ++d) {
    for (int a = d; a >= 0; --a) {
      int b = d - a;
      g.coeff(a, b) = (a + 1) * f.coeff(a + 1, b) * v.x +
                      (b + 1) * f.coeff(a, b + 1) * v.y;
    }
  }
  return g;
}

// Fully symmetric contraction  grad^m f [v_1, ..., v_m]  obtained by
// successive directional reductions; m = vectors.size() must not exceed
// the jet order. m = 0 returns the value.
inline double directional_derivative(const Jet2& f,
                                     std::span<const Vec2> vectors) {
  const int m = static_cast<int>(vectors.size());
  if (m > f.order())
    throw DomainError("directional_derivative: more vectors than jet order");
  if (m == 0) return f.value();
  Jet2 g = jet_dir_reduce(f, vectors[0]);
  for (int i = 1; i < m; ++i) g = jet_dir_reduce(g, vectors[i]);
  return g.value();
}

}  // namespace shapehom
