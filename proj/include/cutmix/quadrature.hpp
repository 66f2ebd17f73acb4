#pragma once

#include <array>
#include <vector>

#include "cutmix/core.hpp"

namespace cutmix {

/// Points and weights in physical coordinates. For line rules the weights carry
/// the arc length measure and `normals` holds one unit normal per point.
struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<Vec2> normals;
    int skipped = 0; // zero-length polyline segments dropped during construction

    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

/// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
}

/// Quadrature on triangle (a,b,c), exact for bivariate polynomials up to `degree`.
/// Uses the collapsed-square (Duffy) construction, so all weights are positive.
inline QuadratureRule triangle_quadrature(const Vec2& a, const Vec2& b, const Vec2& c, int degree) {
    if (degree < 1) degree = 1;
    const int n = (degree + 3) / 2; // 2n-1 >= degree+1 covers the Jacobian factor
    std::vector<double> gx, gw;
    gauss_legendre(n, gx, gw);

    const double area2 = cross(b - a, c - a); //) = 2*area, sign follows orientation
    QuadratureRule rule;
    rule.points.reserve(n * n);
    rule.weights.reserve(n * n);
    for (int i = 0; i < n; ++i) {
        const double u = 0.5 * (gx[i] + 1.0);
        for (int j = 0; j < n; ++j) {
            const double v = 0.5 * (gx[j] + 1.0) * (1.0 - u);
            rule.points.push_back(a + (b - a) * u + (c - a) * v);
            rule.weights.push_back(0.25 * gw[i] * gw[j] * (1.0 - u) * area2);
        }
    }
    return rule;
}

/// Quadrature over a list of triangles (each {a,b,c}).
inline QuadratureRule triangles_quadrature(const std::vector<std::array<Vec2, 3>>& tris, int degree) {
    QuadratureRule rule;
    for (const auto& t : tris) {
        QuadratureRule r = triangle_quadrature(t[0], t[1], t[2], degree);
        rule.points.insert(rule.points.end(), r.points.begin(), r.points.end());
        rule.weights.insert(rule.weights.end(), r.weights.begin(), r.weights.end());
    }
    return rule;
}

/// Shoelace area of a simple polygon (positive for counterclockwise order).
inline double polygon_area(const std::vector<Vec2>& poly) {
    double s = 0.0;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * s;
}

/// Ear-clipping triangulation of a simple polygon. Emitted triangles are
/// positively oriented and partition the polygon exactly.
inline std::vector<std::array<Vec2, 3>> triangulate_polygon(std::vector<Vec2> poly) {
    std::vector<std::array<Vec2, 3>> tris;
    // drop consecutive duplicates
    double scale = 0.0;
    for (const auto& p : poly) scale = std::max(scale, std::max(std::abs(p.x), std::abs(p.y)));
    const double tol = 1e-13 * std::max(scale, 1e-300);
    std::vector<Vec2> v;
    for (const auto& p : poly) {
        if (v.empty() || norm(p - v.back()) > tol) v.push_back(p);
    }
    while (v.size() >= 2 && norm(v.front() - v.back()) <= tol) v.pop_back();
    if (v.size() < 3) return tris;

    if (polygon_area(v) < 0) std::reverse(v.begin(), v.end());
    const double area_tol = tol * tol;

    int guard = 0;
    const int guard_max = 4 * static_cast<int>(v.size() * v.size()) + 64;
    while (v.size() > 3) {
        if (++guard > guard_max)
            throw GeometryError("triangulate_polygon: no ear found (self-intersecting polygon?)");
        bool clipped = false;
        const size_t n = v.size();
        for (size_t i = 0; i < n; ++i) {
            const Vec2& p = v[(i + n - 1) % n];
            const Vec2& q = v[i];
            const Vec2& r = v[(i + 1) % n];
            const double a2 = cross(q - p, r - p);
            if (a2 < -area_tol) continue; // reflex corner
            if (a2 <= area_tol) {         // collinear: remove without emitting
                v.erase(v.begin() + i);
                clipped = true;
                break;
            }
            bool contains_other = false;
            for (size_t j = 0; j < n; ++j) {
                if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
                const Vec2& t = v[j];
                const double d1 = cross(q - p, t - p);
                const double d2 = cross(r - q, t - q);
                const double d3 = cross(p - r, t - r);
                if (d1 > -area_tol && d2 > -area_tol && d3 > -area_tol) {
                    contains_other = true;
                    break;
                }
            }
            if (contains_other) continue;
            tris.push_back({p, q, r});
            v.erase(v.begin() + i);
            clipped = true;
            break;
        }
        if (!clipped)
            throw GeometryError("triangulate_polygon: stuck on degenerate polygon");
    }
    if (v.size() == 3 && tri_signed_area(v[0], v[1], v[2]) > area_tol)
        tris.push_back({v[0], v[1], v[2]});
    return tris;
}

/// Convexity test used by the public polygon rule: cross products of successive
/// edges may not switch strict sign.
inline bool polygon_is_convex(const std::vector<Vec2>& poly) {
    const size_t n = poly.size();
    if (n < 3) return false;
    double scale = 0.0;
    for (size_t i = 0; i < n; ++i) scale = std::max(scale, norm(poly[(i + 1) % n] - poly[i]));
    const double tol = 1e-12 * scale * scale;
    int sign = 0;
    for (size_t i = 0; i < n; ++i) {
        const double c = cross(poly[(i + 1) % n] - poly[i], poly[(i + 2) % n] - poly[(i + 1) % n]);
        if (std::abs(c) <= tol) continue;
        const int s = c > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        else if (s != sign) return false;
    }
    return true;
}

/// Volume rule on a convex polygon, exact to `degree` (fan triangulation).
inline QuadratureRule polygon_quadrature(const std::vector<Vec2>& poly, int degree) {
    if (degree < 1 || degree > 10)
        throw GeometryError("polygon_quadrature: degree must be in [1,10]");
    if (!polygon_is_convex(poly))
        throw GeometryError("polygon_quadrature: polygon is not convex");
    std::vector<std::array<Vec2, 3>> tris;
    for (size_t i = 1; i + 1 < poly.size(); ++i) tris.push_back({poly[0], poly[i], poly[i + 1]});
    // fan of a convex polygon: orientation uniform, flip all if clockwise
    if (polygon_area(poly) < 0)
        for (auto& t : tris) std::swap(t[1], t[2]);
    return triangles_quadrature(tris, degree);
}

/// Gauss rule along each segment of a polyline; exact for univariate
/// polynomials of degree <= 2*points_per_segment-1 per segment.
/// Zero-length segments are skipped and counted in `skipped`.
inline QuadratureRule segment_quadrature(const std::vector<Vec2>& polyline, int points_per_segment) {
    if (polyline.size() < 2)
        throw GeometryError("segment_quadrature: polyline needs at least one segment");
    std::vector<double> gx, gw;
    gauss_legendre(points_per_segment, gx, gw);

    double scale = 0.0;
    for (size_t i = 0; i + 1 < polyline.size(); ++i)
        scale = std::max(scale, norm(polyline[i + 1] - polyline[i]));

    QuadratureRule rule;
    for (size_t i = 0; i + 1 < polyline.size(); ++i) {
        const Vec2 a = polyline[i], b = polyline[i + 1];
        const double len = norm(b - a);
        if (len <= 1e-14 * std::max(scale, 1e-300)) {
            ++rule.skipped;
            continue;
        }
        for (int k = 0; k < points_per_segment; ++k) {
            const double t = 0.5 * (gx[k] + 1.0);
            rule.points.push_back(a + (b - a) * t);
            rule.weights.push_back(0.5 * gw[k] * len);
        }
    }
    return rule;
}

} // namespace cutmix
