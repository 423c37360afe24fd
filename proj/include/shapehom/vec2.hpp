#pragma once

#include <cmath>

namespace shapehom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
};

inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Rotation by +90 degrees: (x,y) -> (-y,x).
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }
// Rotation by -90 degrees: (x,y) -> (y,-x).
inline Vec2 rot270(Vec2 a) { return {a.y, -a.x}; }

inline Vec2 normalized(Vec2 a) {
  double n = norm(a);
  return {a.x / n, a.y / n};
}

}  // namespace shapehom
