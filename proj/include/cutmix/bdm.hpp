#pragma once

#include "cutmix/mesh.hpp"

namespace cutmix {

namespace detail {

/// Dense solve A x = b for small n (partial pivoting); A and b are overwritten.
template <int N>
inline void solve_small(std::array<std::array<double, N>, N>& A,
                        std::array<std::array<double, N>, N>& B) {
    for (int k = 0; k < N; ++k) {
        int piv = k;
        for (int i = k + 1; i < N; ++i)
            if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
        if (A[piv][k] == 0.0) throw InternalError("solve_small: singular matrix");
        std::swap(A[k], A[piv]);
        std::swap(B[k], B[piv]);
        for (int i = k + 1; i < N; ++i) {
            const double f = A[i][k] / A[k][k];
            for (int j = k; j < N; ++j) A[i][j] -= f * A[k][j];
            for (int j = 0; j < N; ++j) B[i][j] -= f * B[k][j];
        }
    }
    for (int k = N - 1; k >= 0; --k) {
        for (int j = 0; j < N; ++j) {
            double s = B[k][j];
            for (int i = k + 1; i < N; ++i) s -= A[k][i] * B[i][j];
            B[k][j] = s / A[k][k];
        }
    }
}

} // namespace detail

/// Lowest-order Brezzi-Douglas-Marini element on the reference triangle
/// (0,0),(1,0),(0,1). The six basis functions are full linear vector
/// polynomials, dual to two moments per edge against {1, s} with the edge
/// parameter s in [-1/2,1/2] centered at the midpoint. Edge j is opposite
/// vertex j and traversed (j+1)%3 -> (j+2)%3 with outward normal.
struct ReferenceBDM1 {
    // basis i: (c[0]+c[1]x+c[2]y, c[3]+c[4]x+c[5]y), local dof order
    // (edge0,m0),(edge0,m1),(edge1,m0),(edge1,m1),(edge2,m0),(edge2,m1)
    std::array<std::array<double, 6>, 6> coeff{};
    std::array<double, 6> div{};

    static const std::array<Vec2, 3>& nodes() {
        static const std::array<Vec2, 3> r{Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}};
        return r;
    }

    ReferenceBDM1() {
        const auto& r = nodes();
        // quadrature along reference edges: 2-point Gauss is exact here
        std::vector<double> gx, gw;
        gauss_legendre(2, gx, gw);

        // moment matrix over the monomial basis (1,0),(x,0),(y,0),(0,1),(0,x),(0,y)
        std::array<std::array<double, 6>, 6> M{};
        for (int j = 0; j < 3; ++j) {
            const Vec2 a = r[(j + 1) % 3], b = r[(j + 2) % 3];
            const double len = norm(b - a);
            Vec2 n = rot_cw(b - a) / len;
            for (size_t k = 0; k < gx.size(); ++k) {
                const double t = 0.5 * (gx[k] + 1.0);
                const double s = t - 0.5;
                const double w = 0.5 * gw[k] * len;
                const Vec2 x = a + (b - a) * t;
                const std::array<Vec2, 6> mono{Vec2{1, 0}, Vec2{x.x, 0}, Vec2{x.y, 0},
                                               Vec2{0, 1}, Vec2{0, x.x}, Vec2{0, x.y}};
                for (int m = 0; m < 6; ++m) {
                    const double qn = dot(mono[m], n);
                    M[2 * j + 0][m] += w * qn;
                    M[2 * j + 1][m] += w * qn * s;
                }
            }
        }
        std::array<std::array<double, 6>, 6> I{};
        for (int i = 0; i < 6; ++i) I[i][i] = 1.0;
        detail::solve_small<6>(M, I); // I now holds coefficients: basis k = column k
        for (int i = 0; i < 6; ++i)
            for (int m = 0; m < 6; ++m) coeff[i][m] = I[m][i];
        for (int i = 0; i < 6; ++i) div[i] = coeff[i][1] + coeff[i][5];
    }

    Vec2 eval(int i, const Vec2& xhat) const {
        const auto& c = coeff[i];
        return {c[0] + c[1] * xhat.x + c[2] * xhat.y, c[3] + c[4] * xhat.x + c[5] * xhat.y};
    }

    static const ReferenceBDM1& instance() {
        static const ReferenceBDM1 ref;
        return ref;
    }
};

/// Affine cell map and the data needed for Piola evaluation.
struct CellMap {
    Vec2 v0{};
    Vec2 col0{}, col1{}; // columns of B = [v1-v0 | v2-v0]
    double det = 0.0;
    std::array<int, 3> signs{};

    CellMap(const Triangulation& tri, int cell) {
        const auto v = tri.cell_vertices(cell);
        v0 = v[0];
        col0 = v[1] - v[0];
        col1 = v[2] - v[0];
        det = cross(col0, col1);
        if (det <= 0.0)
            throw MeshError("CellMap: degenerate or clockwise cell " + std::to_string(cell));
        signs = tri.cell_edge_signs[cell];
    }

    Vec2 to_ref(const Vec2& x) const {
        const Vec2 d = x - v0;
        return {(d.x * col1.y - d.y * col1.x) / det, (col0.x * d.y - col0.y * d.x) / det};
    }
    Vec2 piola(const Vec2& qhat) const {
        return Vec2{col0.x * qhat.x + col1.x * qhat.y, col0.y * qhat.x + col1.y * qhat.y} / det;
    }
};

/// Physical BDM1 basis at x: contravariant Piola image of the reference basis.
/// Flux (m0) components flip sign when the cell traverses the edge against its
/// canonical direction; the centered s-moment is orientation-invariant.
inline std::array<Vec2, 6> eval_basis(const CellMap& map, const Vec2& x) {
    const auto& ref = ReferenceBDM1::instance();
    const Vec2 xhat = map.to_ref(x);
    std::array<Vec2, 6> vals;
    for (int j = 0; j < 3; ++j) {
        const double sgn = static_cast<double>(map.signs[j]);
        vals[2 * j + 0] = map.piola(ref.eval(2 * j + 0, xhat)) * sgn;
        vals[2 * j + 1] = map.piola(ref.eval(2 * j + 1, xhat));
    }
    return vals;
}

inline std::array<Vec2, 6> eval_basis(const Triangulation& tri, int cell, const Vec2& x) {
    return eval_basis(CellMap(tri, cell), x);
}

/// Per-cell constant divergences of the six basis functions.
inline std::array<double, 6> basis_div(const CellMap& map) {
    const auto& ref = ReferenceBDM1::instance();
    std::array<double, 6> d;
    for (int j = 0; j < 3; ++j) {
        d[2 * j + 0] = ref.div[2 * j + 0] / map.det * map.signs[j];
        d[2 * j + 1] = ref.div[2 * j + 1] / map.det;
    }
    return d;
}

inline std::array<double, 6> basis_div(const Triangulation& tri, int cell) {
    return basis_div(CellMap(tri, cell));
}

/// Edge moments of a vector field against the canonical edge normal and the
/// centered parameter; these are the global BDM1 degrees of freedom.
inline std::array<double, 2> edge_moments(const Triangulation& tri, int edge,
                                          const std::function<Vec2(Vec2)>& field,
                                          int n_gauss = 4) {
    const auto ev = tri.edge_vertices(edge);
    const double len = norm(ev[1] - ev[0]);
    const Vec2 n = rot_cw(ev[1] - ev[0]) / len;
    std::vector<double> gx, gw;
    gauss_legendre(n_gauss, gx, gw);
    std::array<double, 2> m{0.0, 0.0};
    for (int k = 0; k < n_gauss; ++k) {
        const double t = 0.5 * (gx[k] + 1.0);
        const double w = 0.5 * gw[k] * len;
        const double qn = dot(field(ev[0] + (ev[1] - ev[0]) * t), n);
        m[0] += w * qn;
        m[1] += w * qn * (t - 0.5);
    }
    return m;
}

/// BDM1 interpolation on one cell: coefficients are the six edge moments.
inline std::array<double, 6> interpolate_bdm1(const Triangulation& tri, int cell,
                                              const std::function<Vec2(Vec2)>& field,
                                              int n_gauss = 4) {
    std::array<double, 6> c;
    for (int j = 0; j < 3; ++j) {
        const auto m = edge_moments(tri, tri.cell_edges[cell][j], field, n_gauss);
        c[2 * j + 0] = m[0];
        c[2 * j + 1] = m[1];
    }
    return c;
}

/// Quadrature-weighted mean over a region (the piecewise-constant projection).
inline double project_p0(const QuadratureRule& rule, const std::function<double(Vec2)>& f) {
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < rule.points.size(); ++k) {
        num += rule.weights[k] * f(rule.points[k]);
        den += rule.weights[k];
    }
    if (den == 0.0) throw ConfigError("project_p0: region has zero measure");
    return num / den;
}

} // namespace cutmix
