#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "cutmix/geometry.hpp"

namespace cutmix {

/// Conforming triangle mesh with edge topology. Cells are counterclockwise;
/// edges are stored with canonical direction low vertex index -> high.
/// Local edge j of a cell is opposite local vertex j and is traversed
/// (j+1)%3 -> (j+2)%3; the sign records whether that traversal matches the
/// canonical edge direction.
struct Triangulation {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> cells;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> cell_edges;
    std::vector<std::array<int, 3>> cell_edge_signs;
    std::vector<std::array<int, 2>> edge_cells; // -1 when absent
    std::vector<double> h_K;
    double h = 0.0;
    int orientation_fixes = 0; // clockwise input cells repaired on import

    int n_cells() const { return static_cast<int>(cells.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }
    int n_vertices() const { return static_cast<int>(vertices.size()); }

    std::array<Vec2, 3> cell_vertices(int c) const {
        return {vertices[cells[c][0]], vertices[cells[c][1]], vertices[cells[c][2]]};
    }
    double cell_area(int c) const {
        const auto v = cell_vertices(c);
        return tri_signed_area(v[0], v[1], v[2]);
    }
    std::array<Vec2, 2> edge_vertices(int e) const {
        return {vertices[edges[e][0]], vertices[edges[e][1]]};
    }
    double edge_length(int e) const {
        const auto v = edge_vertices(e);
        return norm(v[1] - v[0]);
    }
    bool is_boundary_edge(int e) const { return edge_cells[e][1] < 0; }
};

namespace detail {

inline void build_topology(Triangulation& tri) {
    std::map<std::pair<int, int>, int> edge_id;
    tri.edges.clear();
    tri.cell_edges.assign(tri.cells.size(), {-1, -1, -1});
    tri.cell_edge_signs.assign(tri.cells.size(), {0, 0, 0});
    tri.edge_cells.clear();

    for (int c = 0; c < tri.n_cells(); ++c) {
        const auto& cv = tri.cells[c];
        for (int j = 0; j < 3; ++j) {
            const int a = cv[(j + 1) % 3];
            const int b = cv[(j + 2) % 3];
            const auto key = std::minmax(a, b);
            auto it = edge_id.find(key);
            int e;
            if (it == edge_id.end()) {
                e = tri.n_edges();
                edge_id.emplace(key, e);
                tri.edges.push_back({key.first, key.second});
                tri.edge_cells.push_back({-1, -1});
            } else {
                e = it->second;
            }
            if (tri.edge_cells[e][0] < 0) tri.edge_cells[e][0] = c;
            else if (tri.edge_cells[e][1] < 0) tri.edge_cells[e][1] = c;
            else
                throw MeshError("non-manifold edge (" + std::to_string(key.first) + "," +
                                std::to_string(key.second) + ") shared by more than two cells");
            tri.cell_edges[c][j] = e;
            tri.cell_edge_signs[c][j] = a < b ? 1 : -1;
        }
    }

    tri.h_K.assign(tri.cells.size(), 0.0);
    tri.h = 0.0;
    for (int c = 0; c < tri.n_cells(); ++c) {
        const auto v = tri.cell_vertices(c);
        double d = 0.0;
        for (int j = 0; j < 3; ++j) d = std::max(d, norm(v[(j + 1) % 3] - v[j]));
        tri.h_K[c] = d;
        tri.h = std::max(tri.h, d);
    }
}

inline void validate_and_orient(Triangulation& tri) {
    std::vector<char> used(tri.vertices.size(), 0);
    std::map<std::array<int, 3>, int> seen;
    for (int c = 0; c < tri.n_cells(); ++c) {
        auto& cv = tri.cells[c];
        for (int k : cv) {
            if (k < 0 || k >= tri.n_vertices())
                throw MeshError("cell " + std::to_string(c) + " references invalid vertex");
            used[k] = 1;
        }
        std::array<int, 3> key = cv;
        std::sort(key.begin(), key.end());
        if (key[0] == key[1] || key[1] == key[2])
            throw MeshError("cell " + std::to_string(c) + " has repeated vertices");
        if (!seen.emplace(key, c).second)
            throw MeshError("duplicate cell " + std::to_string(c));
        const double a = tri.cell_area(c);
        if (a == 0.0)
            throw MeshError("cell " + std::to_string(c) + " is degenerate");
        if (a < 0.0) {
            std::swap(cv[1], cv[2]);
            ++tri.orientation_fixes;
            std::cerr << "warning: cell " << c << " was clockwise, reordered\n";
        }
    }
    for (size_t k = 0; k < used.size(); ++k)
        if (!used[k]) throw MeshError("dangling vertex " + std::to_string(k));
}

} // namespace detail

/// Uniform N x N grid of squares on [lo,hi], each split by the diagonal from
/// the lower-left to the upper-right corner.
inline Triangulation build_structured(int N, Vec2 lo = {-1, -1}, Vec2 hi = {1, 1}) {
    if (N < 2) throw ConfigError("build_structured: N must be at least 2");
    Triangulation tri;
    const double dx = (hi.x - lo.x) / N, dy = (hi.y - lo.y) / N;
    tri.vertices.reserve((N + 1) * (N + 1));
    for (int j = 0; j <= N; ++j)
        for (int i = 0; i <= N; ++i) tri.vertices.push_back({lo.x + i * dx, lo.y + j * dy});
    auto vid = [N](int i, int j) { return j * (N + 1) + i; };
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            tri.cells.push_back({v00, v10, v11}); // below the diagonal
            tri.cells.push_back({v00, v11, v01}); // above the diagonal
        }
    }
    detail::validate_and_orient(tri);
    detail::build_topology(tri);
    return tri;
}

/// Structured mesh with interior vertices jittered by up to `rel` times the
/// grid spacing in each coordinate (deterministic for a fixed seed).
inline Triangulation build_perturbed(int N, uint64_t seed, double rel = 0.2,
                                     Vec2 lo = {-1, -1}, Vec2 hi = {1, 1}) {
    Triangulation tri = build_structured(N, lo, hi);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jit(-rel, rel);
    const double dx = (hi.x - lo.x) / N, dy = (hi.y - lo.y) / N;
    for (int j = 1; j < N; ++j) {
        for (int i = 1; i < N; ++i) {
            Vec2& v = tri.vertices[j * (N + 1) + i];
            v.x += jit(rng) * dx;
            v.y += jit(rng) * dy;
        }
    }
    for (int c = 0; c < tri.n_cells(); ++c)
        if (tri.cell_area(c) <= 0.0)
            throw MeshError("build_perturbed: jitter inverted cell " + std::to_string(c));
    detail::build_topology(tri);
    return tri;
}

/// Text format: `vertices <nv> cells <nc>`, nv lines `x y`, nc lines `i j k`.
inline Triangulation import_mesh(std::istream& in) {
    std::string kw1, kw2;
    int nv = 0, nc = 0;
    if (!(in >> kw1 >> nv >> kw2 >> nc) || kw1 != "vertices" || kw2 != "cells")
        throw MeshError("import_mesh: bad header, expected 'vertices <nv> cells <nc>'");
    if (nv < 3 || nc < 1) throw MeshError("import_mesh: empty mesh");
    Triangulation tri;
    tri.vertices.resize(nv);
    for (int i = 0; i < nv; ++i)
        if (!(in >> tri.vertices[i].x >> tri.vertices[i].y))
            throw MeshError("import_mesh: truncated vertex list");
    tri.cells.resize(nc);
    for (int c = 0; c < nc; ++c)
        if (!(in >> tri.cells[c][0] >> tri.cells[c][1] >> tri.cells[c][2]))
            throw MeshError("import_mesh: truncated cell list");
    detail::validate_and_orient(tri);
    detail::build_topology(tri);
    return tri;
}

inline Triangulation import_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("import_mesh: cannot open '" + path + "'");
    return import_mesh(in);
}

inline void write_mesh(const Triangulation& tri, std::ostream& out) {
    out << "vertices " << tri.n_vertices() << " cells " << tri.n_cells() << "\n";
    out.precision(17);
    for (const auto& v : tri.vertices) out << v.x << " " << v.y << "\n";
    for (const auto& c : tri.cells) out << c[0] << " " << c[1] << " " << c[2] << "\n";
}

/// An element edge crossed by the interface; [a,b] is the sub-segment lying in
/// the given subdomain. cells are the edge's neighbors there (-1 on the outer
/// boundary, where the jump degenerates to the trace).
struct CutEdge {
    int edge = -1;
    Vec2 a{}, b{};
    std::array<int, 2> cells{-1, -1};
};

struct MeshClassification {
    std::vector<CellClass> cell_class;
    std::vector<int> G_h;                  // cut cell ids
    std::array<std::vector<int>, 2> T_h;   // cells of the two overlapping submeshes
    std::array<std::vector<char>, 2> in_side; // per-cell membership flags
    std::vector<int> cut_index;            // per cell, index into cut_geos or -1
    std::vector<CutGeometry> cut_geos;
    std::array<std::vector<CutEdge>, 2> cut_edges;

    bool is_cut(int c) const { return cut_index[c] >= 0; }
    const CutGeometry& cut(int c) const { return cut_geos[cut_index[c]]; }
};

/// Classify all cells against the interface and build the cut data:
/// cut-cell geometry plus the sub-segments of cut edges per subdomain.
inline MeshClassification classify(const Triangulation& tri, const LevelSet& phi,
                                   const CutOptions& opt = {}) {
    MeshClassification cls;
    const int nc = tri.n_cells();
    cls.cell_class.resize(nc);
    cls.cut_index.assign(nc, -1);
    cls.in_side[0].assign(nc, 0);
    cls.in_side[1].assign(nc, 0);

    for (int c = 0; c < nc; ++c) {
        const auto v = tri.cell_vertices(c);
        const CellClass cc = classify_cell(phi, v, c);
        cls.cell_class[c] = cc;
        if (cc == CellClass::Cut) {
            cls.cut_index[c] = static_cast<int>(cls.cut_geos.size());
            cls.cut_geos.push_back(cut_triangle(phi, c, v, opt));
            cls.G_h.push_back(c);
            cls.T_h[0].push_back(c);
            cls.T_h[1].push_back(c);
            cls.in_side[0][c] = 1;
            cls.in_side[1][c] = 1;
        } else {
            const int s = cc == CellClass::Inside1 ? 0 : 1;
            cls.T_h[s].push_back(c);
            cls.in_side[s][c] = 1;
        }
    }

    // edges crossed by the interface; both neighbors are cut cells except in
    // grazing configurations removed by the degeneracy threshold
    for (int e = 0; e < tri.n_edges(); ++e) {
        const auto ev = tri.edge_vertices(e);
        const double fa = phi(ev[0]), fb = phi(ev[1]);
        if (!(fa * fb < 0.0)) continue;
        const Vec2 x = intersect_edge(phi, ev[0], ev[1]);
        const Vec2 end1 = fa < 0 ? ev[0] : ev[1]; // endpoint on side 1
        const Vec2 end2 = fa < 0 ? ev[1] : ev[0];
        const auto& nb = tri.edge_cells[e];
        bool any_cut = cls.is_cut(nb[0]) || (nb[1] >= 0 && cls.is_cut(nb[1]));
        if (!any_cut) continue;
        for (int s = 0; s < 2; ++s) {
            bool ok = cls.in_side[s][nb[0]] && (nb[1] < 0 || cls.in_side[s][nb[1]]);
            if (!ok) continue;
            CutEdge ce;
            ce.edge = e;
            ce.a = s == 0 ? end1 : x;
            ce.b = s == 0 ? x : end2;
            ce.cells = nb;
            cls.cut_edges[s].push_back(ce);
        }
    }
    return cls;
}

/// Volume rule over K (uncut) or over K intersected with the given subdomain.
inline QuadratureRule region_rule(const Triangulation& tri, const MeshClassification& cls,
                                  int cell, int side, int degree) {
    if (cls.is_cut(cell)) {
        const auto& cg = cls.cut(cell);
        return triangles_quadrature(side == 0 ? cg.tris1 : cg.tris2, degree);
    }
    const auto v = tri.cell_vertices(cell);
    return triangle_quadrature(v[0], v[1], v[2], degree);
}

} // namespace cutmix
