#pragma once

#include <algorithm>
#include <cmath>

namespace nngpso {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend Vec2 operator*(Vec2 v, double s) { return s * v; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Square domain [-bound, bound]^2 centered at the origin.
struct Box {
  double bound = 0.0;

  bool contains(Vec2 p) const {
    return p.x >= -bound && p.x <= bound && p.y >= -bound && p.y <= bound;
  }

  Vec2 clamp(Vec2 p) const {
    return {std::clamp(p.x, -bound, bound), std::clamp(p.y, -bound, bound)};
  }
};

}  // namespace nngpso
