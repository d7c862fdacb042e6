#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>

namespace geowave {

struct Vec2 {
  double x = 0.;
  double y = 0.;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  Vec2 normalized() const { return *this / norm(); }
  // Counter-clockwise perpendicular.
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

struct Vec3 {
  double x = 0.;
  double y = 0.;
  double z = 0.;

  Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(Vec3 o) { x += o.x; y += o.y; z += o.z; return *this; }
  bool operator==(const Vec3&) const = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double norm2() const { return x * x + y * y + z * z; }
  Vec3 normalized() const { return *this / norm(); }
};

inline Vec3 operator*(double s, Vec3 v) { return v * s; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline std::ostream& operator<<(std::ostream& os, Vec2 v) { return os << "(" << v.x << ", " << v.y << ")"; }
inline std::ostream& operator<<(std::ostream& os, Vec3 v) {
  return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

// Rotation by `angle` followed by translation. Used both for face placements in an unfolding and for the
// frame relation between sibling hulls.
struct Rigid2 {
  double angle = 0.;
  Vec2 offset;

  static Rigid2 identity() { return {}; }

  Vec2 rotate(Vec2 p) const {
    double c = std::cos(angle), s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
  }
  Vec2 apply(Vec2 p) const { return rotate(p) + offset; }

  // (this * other)(p) == this(other(p))
  Rigid2 operator*(const Rigid2& other) const { return {angle + other.angle, apply(other.offset)}; }

  Rigid2 inverse() const {
    Rigid2 inv{-angle, {}};
    inv.offset = -inv.rotate(offset);
    return inv;
  }
};

// Distance from p to the closed segment [a, b].
inline double pointSegmentDistance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = ab.norm2();
  if (len2 == 0.) return (p - a).norm();
  double t = std::clamp(dot(p - a, ab) / len2, 0., 1.);
  return (a + ab * t - p).norm();
}

inline bool segmentsProperlyIntersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps) {
  double o1 = orient(a, b, c), o2 = orient(a, b, d);
  double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > eps && o2 < -eps) || (o1 < -eps && o2 > eps)) && ((o3 > eps && o4 < -eps) || (o3 < -eps && o4 > eps));
}

inline double segmentSegmentDistance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (segmentsProperlyIntersect(a, b, c, d, 0.)) return 0.;
  return std::min(std::min(pointSegmentDistance(a, c, d), pointSegmentDistance(b, c, d)),
                  std::min(pointSegmentDistance(c, a, b), pointSegmentDistance(d, a, b)));
}

} // namespace geowave
