#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "cutmix/quadrature.hpp"

namespace cutmix {

/// Implicit interface: phi < 0 on side 1, phi > 0 on side 2, Gamma = {phi = 0}.
struct LevelSet {
    enum class Kind { Circle, Ellipse, VerticalLine, Custom };

    Kind kind = Kind::Custom;
    Vec2 center{};
    double radius = 0.0;  // Circle
    double a = 0.0, b = 0.0; // Ellipse semi-axes
    double x0 = 0.0;         // VerticalLine
    std::function<double(Vec2)> fn;

    double operator()(const Vec2& p) const {
        switch (kind) {
            case Kind::Circle: {
                const Vec2 d = p - center;
                return d.x * d.x + d.y * d.y - radius * radius;
            }
            case Kind::Ellipse: {
                const Vec2 d = p - center;
                return (d.x * d.x) / (a * a) + (d.y * d.y) / (b * b) - 1.0;
            }
            case Kind::VerticalLine:
                return p.x - x0;
            case Kind::Custom:
                return fn(p);
        }
        return 0.0;
    }

    static LevelSet circle(Vec2 c, double r) {
        LevelSet ls;
        ls.kind = Kind::Circle;
        ls.center = c;
        ls.radius = r;
        return ls;
    }
    static LevelSet ellipse(Vec2 c, double a_, double b_) {
        LevelSet ls;
        ls.kind = Kind::Ellipse;
        ls.center = c;
        ls.a = a_;
        ls.b = b_;
        return ls;
    }
    static LevelSet vertical_line(double x0_) {
        LevelSet ls;
        ls.kind = Kind::VerticalLine;
        ls.x0 = x0_;
        return ls;
    }
    static LevelSet custom(std::function<double(Vec2)> f) {
        LevelSet ls;
        ls.kind = Kind::Custom;
        ls.fn = std::move(f);
        return ls;
    }
};

enum class CellClass { Inside1, Inside2, Cut };

/// A cut cell whose smaller area fraction falls below this is treated as uncut.
inline constexpr double kGeomEps = 1e-12;

/// Interface crossing on segment [a,b]; requires a strict sign change.
/// Exact for vertical lines, otherwise bisection to width 1e-14*|b-a| with a
/// final secant polish.
inline Vec2 intersect_edge(const LevelSet& phi, const Vec2& a, const Vec2& b) {
    double fa = phi(a), fb = phi(b);
    if (!(fa * fb < 0.0))
        throw GeometryError("intersect_edge: endpoints must have opposite signs");
    if (phi.kind == LevelSet::Kind::VerticalLine) {
        const double t = (phi.x0 - a.x) / (b.x - a.x);
        return {phi.x0, a.y + t * (b.y - a.y)};
    }
    double lo = 0.0, hi = 1.0;
    double flo = fa, fhi = fb;
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        const double fm = phi(a + (b - a) * mid);
        if (fm == 0.0) return a + (b - a) * mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    double t = 0.5 * (lo + hi);
    if (fhi != flo) { // one secant step
        const double ts = lo - flo * (hi - lo) / (fhi - flo);
        if (ts >= lo && ts <= hi) t = ts;
    }
    return a + (b - a) * t;
}

struct CutOptions {
    int polyline_depth = 2;   // recursive bisections of the chord against phi
    int volume_degree = 4;    // stored volume rules
    int gamma_points = 5;     // Gauss points per interface sub-segment
};

/// Per-cut-cell record: the two sub-regions, the interface polyline with
/// quadrature, areas and area fractions.
struct CutGeometry {
    int cell_id = -1;
    std::vector<Vec2> poly1, poly2;             // region boundaries, counterclockwise
    std::vector<std::array<Vec2, 3>> tris1, tris2; // positive triangulations
    std::array<Vec2, 2> segment{};              // chord endpoints on the cell boundary
    std::vector<Vec2> polyline;                 // refined interface, segment[0] -> segment[1]
    Vec2 normal{};                              // chord-level unit normal, side 1 -> side 2
    double area1 = 0.0, area2 = 0.0;
    double k1 = 0.0, k2 = 0.0;                  // area fractions
    QuadratureRule quad1, quad2;                // volume rules at CutOptions::volume_degree
    QuadratureRule quad_gamma;                  // interface rule with per-point normals

    double gamma_length() const { return quad_gamma.total_weight(); }
};

namespace detail {

struct ClipResult {
    bool two_points = false;
    std::vector<Vec2> chain1, chain2; // boundary chains including interface endpoints
    Vec2 i_first{}, i_second{};       // interface points in boundary order
    int sign_chain1 = 0;              // side of chain1's interior vertices (-1 or +1)
    double area1 = 0.0, area2 = 0.0;  // straight-chord clip areas
};

/// Walk cell boundary, insert edge crossings, split at the two interface points.
/// Throws when the boundary is crossed more than twice (mesh too coarse).
inline ClipResult clip_by_levelset(const LevelSet& phi, const std::array<Vec2, 3>& v, int cell_id) {
    std::array<double, 3> f{phi(v[0]), phi(v[1]), phi(v[2])};
    std::array<int, 3> s{};
    for (int i = 0; i < 3; ++i) s[i] = f[i] > 0 ? 1 : (f[i] < 0 ? -1 : 0);

    // boundary loop with crossings inserted
    struct Node {
        Vec2 p;
        int sign;      // 0 on the interface
        bool on_gamma;
    };
    std::vector<Node> loop;
    int crossings = 0;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        loop.push_back({v[i], s[i], s[i] == 0});
        if (s[i] * s[j] < 0) {
            loop.push_back({intersect_edge(phi, v[i], v[j]), 0, true});
            ++crossings;
        } else if (s[i] != 0 && s[i] == s[j]) {
            // a same-sign edge crossed twice would hide behind matching endpoint
            // signs; probe the midpoint
            const double fm = phi((v[i] + v[j]) * 0.5);
            if (fm != 0.0 && (fm > 0) != (s[i] > 0))
                throw MeshError("interface crosses an edge twice in cell " + std::to_string(cell_id) +
                                "; refine the mesh");
        }
    }

    std::vector<size_t> gamma_idx;
    for (size_t i = 0; i < loop.size(); ++i)
        if (loop[i].on_gamma) gamma_idx.push_back(i);

    ClipResult res;
    if (gamma_idx.size() != 2) {
        if (gamma_idx.size() > 2)
            throw MeshError("interface crosses the boundary of cell " + std::to_string(cell_id) +
                            " more than twice; refine the mesh");
        return res; // 0 or 1 touch point: no cut
    }

    res.two_points = true;
    const size_t ia = gamma_idx[0], ib = gamma_idx[1];
    res.i_first = loop[ia].p;
    res.i_second = loop[ib].p;

    auto collect = [&](size_t from, size_t to, std::vector<Vec2>& chain, int& sign) {
        sign = 0;
        for (size_t k = from;; k = (k + 1) % loop.size()) {
            chain.push_back(loop[k].p);
            if (!loop[k].on_gamma) {
                if (sign == 0) sign = loop[k].sign;
            }
            if (k == to) break;
        }
    };
    int sign2 = 0;
    collect(ia, ib, res.chain1, res.sign_chain1);
    collect(ib, ia, res.chain2, sign2);
    if (res.sign_chain1 == 0) res.sign_chain1 = -sign2;
    if (res.sign_chain1 == 0) res.sign_chain1 = -1; // fully degenerate; areas decide below

    const double a_chain1 = polygon_area(res.chain1);
    const double a_chain2 = polygon_area(res.chain2);
    res.area1 = res.sign_chain1 < 0 ? a_chain1 : a_chain2;
    res.area2 = res.sign_chain1 < 0 ? a_chain2 : a_chain1;
    return res;
}

/// Refine the chord against phi by recursive bisection: each midpoint is moved
/// onto Gamma along the segment normal.
inline void refine_polyline(const LevelSet& phi, const Vec2& a, const Vec2& b, int depth,
                            std::vector<Vec2>& out) {
    if (depth == 0) {
        out.push_back(b);
        return;
    }
    const Vec2 m = (a + b) * 0.5;
    const double len = norm(b - a);
    Vec2 n = rot_cw(b - a);
    const double nn = norm(n);
    Vec2 c = m;
    if (nn > 0) {
        n = n / nn;
        const double fm = phi(m);
        if (fm != 0.0) {
            // bracket the root along the normal through m
            double t_hit = 0.0;
            bool found = false;
            for (double step = 0.25 * len; step <= 2.0 * len && !found; step *= 2.0) {
                for (double dir : {1.0, -1.0}) {
                    const double ft = phi(m + n * (dir * step));
                    if (ft == 0.0 || (ft > 0) != (fm > 0)) {
                        t_hit = dir * step;
                        found = true;
                        break;
                    }
                }
            }
            if (found) {
                double lo = 0.0, hi = t_hit, flo = fm;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fmid = phi(m + n * mid);
                    if (fmid == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if ((fmid > 0) == (flo > 0)) {
                        lo = mid;
                        flo = fmid;
                    } else {
                        hi = mid;
                    }
                }
                c = m + n * (0.5 * (lo + hi));
            }
        }
    }
    refine_polyline(phi, a, c, depth - 1, out);
    refine_polyline(phi, c, b, depth - 1, out);
}

} // namespace detail

/// Cell classification. Cut iff phi changes sign across the closed triangle and
/// both cut fractions exceed kGeomEps; otherwise the centroid sign decides.
inline CellClass classify_cell(const LevelSet& phi, const std::array<Vec2, 3>& v, int cell_id = -1) {
    const double area = tri_signed_area(v[0], v[1], v[2]);
    double scale = 0.0;
    for (int i = 0; i < 3; ++i) scale = std::max(scale, norm(v[(i + 1) % 3] - v[i]));
    if (std::abs(area) <= 1e-14 * scale * scale)
        throw MeshError("classify_cell: degenerate triangle" +
                        (cell_id >= 0 ? " (cell " + std::to_string(cell_id) + ")" : std::string()));

    const auto clip = detail::clip_by_levelset(phi, v, cell_id);
    const Vec2 centroid = (v[0] + v[1] + v[2]) / 3.0;
    if (!clip.two_points)
        return phi(centroid) < 0 ? CellClass::Inside1 : CellClass::Inside2;

    const double total = std::abs(area);
    const double f1 = clip.area1 / total, f2 = clip.area2 / total;
    if (std::min(f1, f2) < kGeomEps)
        return f1 > f2 ? CellClass::Inside1 : CellClass::Inside2;
    return CellClass::Cut;
}

/// Full cut decomposition of a cell previously classified as Cut.
inline CutGeometry cut_triangle(const LevelSet& phi, int cell_id, const std::array<Vec2, 3>& v,
                                const CutOptions& opt = {}) {
    auto clip = detail::clip_by_levelset(phi, v, cell_id);
    if (!clip.two_points)
        throw InternalError("cut_triangle: cell " + std::to_string(cell_id) + " is not cut");

    CutGeometry cg;
    cg.cell_id = cell_id;
    cg.segment = {clip.i_first, clip.i_second};

    // polyline from i_first to i_second, interior knots moved onto Gamma
    std::vector<Vec2> line{clip.i_first};
    detail::refine_polyline(phi, clip.i_first, clip.i_second, std::max(opt.polyline_depth, 0), line);
    // drop interior knots that stay on the chord (straight interfaces)
    const Vec2 chord = clip.i_second - clip.i_first;
    const double clen = norm(chord);
    std::vector<Vec2> pl{clip.i_first};
    for (size_t i = 1; i + 1 < line.size(); ++i) {
        const double dev = std::abs(cross(chord, line[i] - clip.i_first)) / std::max(clen, 1e-300);
        if (dev > 1e-14 * clen) pl.push_back(line[i]);
    }
    pl.push_back(clip.i_second);
    cg.polyline = pl;

    // region polygons: boundary chain closed by the polyline
    auto close_with = [&](const std::vector<Vec2>& chain, bool reverse_pl) {
        std::vector<Vec2> poly = chain;
        if (reverse_pl) {
            for (size_t i = pl.size() - 1; i-- > 1;) poly.push_back(pl[i]);
        } else {
            for (size_t i = 1; i + 1 < pl.size(); ++i) poly.push_back(pl[i]);
        }
        return poly;
    };
    // chain1 runs i_first -> i_second along the boundary, so it is closed by the
    // polyline walked backwards; chain2 by the polyline walked forwards.
    std::vector<Vec2> poly_c1 = close_with(clip.chain1, true);
    std::vector<Vec2> poly_c2 = close_with(clip.chain2, false);
    if (clip.sign_chain1 < 0) {
        cg.poly1 = std::move(poly_c1);
        cg.poly2 = std::move(poly_c2);
    } else {
        cg.poly1 = std::move(poly_c2);
        cg.poly2 = std::move(poly_c1);
    }

    cg.tris1 = triangulate_polygon(cg.poly1);
    cg.tris2 = triangulate_polygon(cg.poly2);
    cg.area1 = 0.0;
    for (const auto& t : cg.tris1) cg.area1 += tri_signed_area(t[0], t[1], t[2]);
    cg.area2 = 0.0;
    for (const auto& t : cg.tris2) cg.area2 += tri_signed_area(t[0], t[1], t[2]);

    const double total = std::abs(tri_signed_area(v[0], v[1], v[2]));
    cg.k1 = cg.area1 / total;
    cg.k2 = cg.area2 / total;

    cg.quad1 = triangles_quadrature(cg.tris1, opt.volume_degree);
    cg.quad2 = triangles_quadrature(cg.tris2, opt.volume_degree);

    // chord-level normal, oriented side 1 -> side 2 via the region centroids
    Vec2 n = rot_cw(chord);
    n = n / std::max(norm(n), 1e-300);
    Vec2 c2{0, 0};
    for (const auto& p : cg.poly2) c2 += p;
    c2 = c2 / static_cast<double>(cg.poly2.size());
    const Vec2 mid = (clip.i_first + clip.i_second) * 0.5;
    if (dot(n, c2 - mid) < 0) n = n * (-1.0);
    cg.normal = n;

    // interface rule; per-segment normals share the chord orientation
    cg.quad_gamma = segment_quadrature(pl, opt.gamma_points);
    cg.quad_gamma.normals.clear();
    cg.quad_gamma.normals.reserve(cg.quad_gamma.points.size());
    size_t qi = 0;
    for (size_t i = 0; i + 1 < pl.size(); ++i) {
        const double len = norm(pl[i + 1] - pl[i]);
        if (len <= 1e-14 * clen) continue;
        Vec2 ns = rot_cw(pl[i + 1] - pl[i]) / len;
        if (dot(ns, cg.normal) < 0) ns = ns * (-1.0);
        for (int k = 0; k < opt.gamma_points; ++k, ++qi) cg.quad_gamma.normals.push_back(ns);
    }
    return cg;
}

} // namespace cutmix
