#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace cutmix {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Rotate by -90 degrees (clockwise): maps a tangent to its right-hand normal.
inline Vec2 rot_cw(const Vec2& v) { return {v.y, -v.x}; }

/// Signed area of triangle (a,b,c); positive for counterclockwise order.
inline double tri_signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * cross(b - a, c - a);
}

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometryError : Error { using Error::Error; };
struct MeshError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct SolverError : Error { using Error::Error; };
struct InternalError : Error { using Error::Error; };

} // namespace cutmix
