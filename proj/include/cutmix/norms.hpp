#pragma once

#include <Eigen/Core>

#include "cutmix/assembly.hpp"

namespace cutmix {

/// Piecewise fields with per-cell, per-subdomain evaluators; used for exact
/// fields, discrete fields and their differences alike.
struct VecField {
    std::function<Vec2(int cell, int side, const Vec2&)> val;
    std::function<double(int cell, int side, const Vec2&)> div;
};
struct ScalarField {
    std::function<double(int cell, int side, const Vec2&)> val;
};

/// View of a solution vector as per-cell fields.
struct DiscreteSolution {
    const Triangulation& tri;
    const MeshClassification& cls;
    const DofMap& dm;
    const Eigen::VectorXd& x;

    std::array<double, 6> p_coeffs(int side, int cell) const {
        const auto dofs = dm.cell_p_dofs(tri, side, cell);
        std::array<double, 6> c;
        for (int a = 0; a < 6; ++a) c[a] = x[dofs[a]];
        return c;
    }
    Vec2 p(int cell, int side, const Vec2& pt) const {
        const auto c = p_coeffs(side, cell);
        const auto phi = eval_basis(tri, cell, pt);
        Vec2 v{};
        for (int a = 0; a < 6; ++a) v += phi[a] * c[a];
        return v;
    }
    double div_p(int cell, int side) const {
        const auto c = p_coeffs(side, cell);
        const auto d = basis_div(tri, cell);
        double s = 0.0;
        for (int a = 0; a < 6; ++a) s += c[a] * d[a];
        return s;
    }
    double u(int cell, int side) const { return x[dm.u_dof(side, cell)]; }

    VecField p_field() const {
        return {[this](int c, int s, const Vec2& pt) { return p(c, s, pt); },
                [this](int c, int s, const Vec2&) { return div_p(c, s); }};
    }
    ScalarField u_field() const {
        return {[this](int c, int s, const Vec2&) { return u(c, s); }};
    }
};

inline VecField exact_p_field(const ProblemSpec& ps) {
    return {[&ps](int, int s, const Vec2& x) { return ps.side[s].p(x); },
            [&ps](int, int s, const Vec2& x) { return ps.side[s].div_p(x); }};
}
inline ScalarField exact_u_field(const ProblemSpec& ps) {
    return {[&ps](int, int s, const Vec2& x) { return ps.side[s].u(x); }};
}
inline VecField difference(const VecField& a, const VecField& b) {
    return {[a, b](int c, int s, const Vec2& x) { return a.val(c, s, x) - b.val(c, s, x); },
            [a, b](int c, int s, const Vec2& x) { return a.div(c, s, x) - b.div(c, s, x); }};
}
inline ScalarField difference(const ScalarField& a, const ScalarField& b) {
    return {[a, b](int c, int s, const Vec2& x) { return a.val(c, s, x) - b.val(c, s, x); }};
}

/// Squared summands of the combined error norm.
struct NormParts {
    double p_mass = 0.0;   // ||alpha^{-1/2} p||^2 over both subdomains
    double p_div = 0.0;    // ||alpha^{-1/2} div p||^2
    double p_jump = 0.0;   // h^{-2} sum_K h_K ||alpha_min^{-1/2} [p.n]||^2 on Gamma_K
    double u_mass = 0.0;   // ||alpha^{1/2} u||^2
    double u_iface = 0.0;  // sum_K h_K alpha_min ||{u}||^2 on Gamma_K
};

/// Mesh-dependent flux norm: mass + divergence + scaled interface flux jump.
inline double norm_h(const Triangulation& tri, const MeshClassification& cls,
                     const AssemblyParams& prm, const VecField& f, int degree = 6,
                     NormParts* parts = nullptr) {
    double mass = 0.0, divn = 0.0, jump = 0.0;
    for (int s = 0; s < 2; ++s) {
        const double wa = 1.0 / prm.alpha(s);
        for (int c : cls.T_h[s]) {
            const QuadratureRule rule = region_rule(tri, cls, c, s, degree);
            for (size_t q = 0; q < rule.points.size(); ++q) {
                const Vec2 v = f.val(c, s, rule.points[q]);
                const double d = f.div(c, s, rule.points[q]);
                mass += wa * rule.weights[q] * dot(v, v);
                divn += wa * rule.weights[q] * d * d;
            }
        }
    }
    const double h2 = tri.h * tri.h;
    for (int c : cls.G_h) {
        const auto& cg = cls.cut(c);
        double acc = 0.0;
        for (size_t q = 0; q < cg.quad_gamma.points.size(); ++q) {
            const Vec2 x = cg.quad_gamma.points[q];
            const Vec2 n = cg.quad_gamma.normals[q];
            const double jn = dot(f.val(c, 0, x), n) - dot(f.val(c, 1, x), n);
            acc += cg.quad_gamma.weights[q] * jn * jn;
        }
        jump += tri.h_K[c] / (h2 * prm.alpha_min()) * acc;
    }
    if (parts) {
        parts->p_mass = mass;
        parts->p_div = divn;
        parts->p_jump = jump;
    }
    return std::sqrt(mass + divn + jump);
}

/// Mesh-dependent scalar norm: alpha-weighted mass + scaled interface average.
inline double norm_star(const Triangulation& tri, const MeshClassification& cls,
                        const AssemblyParams& prm, const ScalarField& f, int degree = 6,
                        NormParts* parts = nullptr) {
    double mass = 0.0, iface = 0.0;
    for (int s = 0; s < 2; ++s) {
        for (int c : cls.T_h[s]) {
            const QuadratureRule rule = region_rule(tri, cls, c, s, degree);
            for (size_t q = 0; q < rule.points.size(); ++q) {
                const double v = f.val(c, s, rule.points[q]);
                mass += prm.alpha(s) * rule.weights[q] * v * v;
            }
        }
    }
    for (int c : cls.G_h) {
        const auto& cg = cls.cut(c);
        double acc = 0.0;
        for (size_t q = 0; q < cg.quad_gamma.points.size(); ++q) {
            const Vec2 x = cg.quad_gamma.points[q];
            const double avg = cg.k1 * f.val(c, 0, x) + cg.k2 * f.val(c, 1, x);
            acc += cg.quad_gamma.weights[q] * avg * avg;
        }
        iface += tri.h_K[c] * prm.alpha_min() * acc;
    }
    if (parts) {
        parts->u_mass = mass;
        parts->u_iface = iface;
    }
    return std::sqrt(mass + iface);
}

/// Combined norm ( ||p||_h^2 + ||u||_star^2 )^{1/2}.
inline double triple_norm(const Triangulation& tri, const MeshClassification& cls,
                          const AssemblyParams& prm, const VecField& p, const ScalarField& u,
                          int degree = 6, NormParts* parts = nullptr) {
    NormParts loc;
    const double nh = norm_h(tri, cls, prm, p, degree, &loc);
    const double ns = norm_star(tri, cls, prm, u, degree, &loc);
    if (parts) *parts = loc;
    return std::sqrt(nh * nh + ns * ns);
}

struct ErrorReport {
    double e_p = 0.0;
    double e_up = 0.0;
    NormParts components;           // squared summands of the error triple norm
    double denominator_star = 0.0;  // ||(p,u)||_*
    double p_l2_error = 0.0;        // ||p - p_h||_0, unweighted
    double p_l2_weighted = 0.0;     // ||alpha^{-1/2} (p - p_h)||_0, the e_p numerator
    double div_p_h1 = 0.0;          // ||div p||_1, broken across the interface
    bool denominator_broken = true;
};

/// Relative errors of a computed solution against the exact fields.
inline ErrorReport compute_errors(const Triangulation& tri, const MeshClassification& cls,
                                  const DofMap& dm, const AssemblyParams& prm,
                                  const ProblemSpec& ps, const Eigen::VectorXd& x,
                                  int degree = 6) {
    const DiscreteSolution sol{tri, cls, dm, x};
    const VecField p_err = difference(exact_p_field(ps), sol.p_field());
    const ScalarField u_err = difference(exact_u_field(ps), sol.u_field());

    ErrorReport rep;
    const double num_up = triple_norm(tri, cls, prm, p_err, u_err, degree, &rep.components);

    // flux L2 errors and the broken H1 norm of div p
    double l2 = 0.0, l2w = 0.0, h2p = 0.0, h1u = 0.0, h1div = 0.0, div_h1_plain = 0.0;
    const double amin = prm.alpha_min();
    for (int s = 0; s < 2; ++s) {
        const auto& sf = ps.side[s];
        const double as = prm.alpha(s);
        for (int c : cls.T_h[s]) {
            const QuadratureRule rule = region_rule(tri, cls, c, s, degree);
            for (size_t q = 0; q < rule.points.size(); ++q) {
                const Vec2 pt = rule.points[q];
                const double w = rule.weights[q];
                const Vec2 pe = p_err.val(c, s, pt);
                l2 += w * dot(pe, pe);
                l2w += w / as * dot(pe, pe);

                const Vec2 pv = sf.p(pt);
                const Mat2 gp = sf.grad_p(pt);
                const Hess2 hp = sf.hess_p(pt);
                double sum2 = dot(pv, pv);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) sum2 += gp[i][j] * gp[i][j];
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 3; ++j) sum2 += hp[i][j] * hp[i][j];
                h2p += w / amin * sum2;

                const double uv = sf.u(pt);
                const Vec2 gu = sf.grad_u(pt);
                h1u += w * as * (uv * uv + dot(gu, gu));

                const double dv = sf.div_p(pt);
                const Vec2 gd = sf.grad_div_p(pt);
                const double dsum = dv * dv + dot(gd, gd);
                h1div += w / as * dsum;
                div_h1_plain += w * dsum;
            }
        }
    }
    rep.p_l2_error = std::sqrt(l2);
    rep.p_l2_weighted = std::sqrt(l2w);
    rep.div_p_h1 = std::sqrt(div_h1_plain);
    rep.denominator_star = std::sqrt(h2p) + std::sqrt(h1u) + std::sqrt(h1div);
    rep.e_p = rep.p_l2_weighted / rep.div_p_h1;
    rep.e_up = num_up / rep.denominator_star;
    return rep;
}

} // namespace cutmix
