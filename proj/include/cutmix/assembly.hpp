#pragma once

#include <Eigen/SparseCore>

#include <fstream>
#include <iomanip>

#include "cutmix/bdm.hpp"
#include "cutmix/dofmap.hpp"
#include "cutmix/problems.hpp"

namespace cutmix {

using Trip = Eigen::Triplet<double>;
using SparseMat = Eigen::SparseMatrix<double>;

/// Which mesh size enters each stabilization weight. The cut-edge penalty is
/// written with the global h, the interface penalties with the per-cell h_K;
/// the toggle allows A/B testing the cut-edge convention.
struct StabilizationPolicy {
    bool j1_global_h = true;
};

struct AssemblyParams {
    double alpha1 = 1.0, alpha2 = 1.0;
    double gamma = 1.0, gamma1 = 1.0, gamma2 = 1.0;
    StabilizationPolicy policy;
    int volume_degree = 4;

    double alpha(int s) const { return s == 0 ? alpha1 : alpha2; }
    double alpha_min() const { return std::min(alpha1, alpha2); }

    void validate() const {
        if (alpha1 <= 0 || alpha2 <= 0) throw ConfigError("alpha must be positive");
        if (gamma <= 0 || gamma1 <= 0 || gamma2 <= 0) throw ConfigError("penalties must be positive");
    }
};

/// Sparse saddle-point system with block layout [p1 p2 | u1 u2].
struct SaddleSystem {
    SparseMat A;
    Eigen::VectorXd rhs;
    std::array<int, 2> p_offset{}, u_offset{};
    int total = 0;
};

namespace detail {

/// mass and div-div terms of one subdomain, weights applied per cell region
inline void add_mass_divdiv(const Triangulation& tri, const MeshClassification& cls,
                            const DofMap& dm, int side, double w_mass, double w_div,
                            int degree, std::vector<Trip>& out) {
    for (int c : cls.T_h[side]) {
        const CellMap map(tri, c);
        const auto divs = basis_div(map);
        const auto dofs = dm.cell_p_dofs(tri, side, c);
        const QuadratureRule rule = region_rule(tri, cls, c, side, degree);

        std::array<std::array<double, 6>, 6> local{};
        double region_area = 0.0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto phi = eval_basis(map, rule.points[q]);
            const double w = rule.weights[q];
            region_area += w;
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b <= a; ++b) local[a][b] += w * dot(phi[a], phi[b]);
        }
        for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
                const double mass = b <= a ? local[a][b] : local[b][a];
                const double val = w_mass * mass + w_div * divs[a] * divs[b] * region_area;
                out.emplace_back(dofs[a], dofs[b], val);
            }
        }
    }
}

/// interface penalty on the flux jump [p.n][q.n] with a per-cut-cell weight
template <typename WeightFn>
inline void add_flux_jump_gamma(const Triangulation& tri, const MeshClassification& cls,
                                const DofMap& dm, WeightFn weight, std::vector<Trip>& out) {
    for (int c : cls.G_h) {
        const auto& cg = cls.cut(c);
        const CellMap map(tri, c);
        std::array<int, 12> dofs;
        for (int s = 0; s < 2; ++s) {
            const auto d = dm.cell_p_dofs(tri, s, c);
            for (int a = 0; a < 6; ++a) dofs[6 * s + a] = d[a];
        }
        const double w_cell = weight(c);
        std::array<std::array<double, 12>, 12> local{};
        for (size_t q = 0; q < cg.quad_gamma.points.size(); ++q) {
            const auto phi = eval_basis(map, cg.quad_gamma.points[q]);
            const Vec2 n = cg.quad_gamma.normals[q];
            std::array<double, 12> jump;
            for (int a = 0; a < 6; ++a) {
                jump[a] = dot(phi[a], n);       // side 1 contribution to [p.n]
                jump[6 + a] = -dot(phi[a], n);  // side 2
            }
            const double w = w_cell * cg.quad_gamma.weights[q];
            for (int a = 0; a < 12; ++a)
                for (int b = 0; b < 12; ++b) local[a][b] += w * jump[a] * jump[b];
        }
        for (int a = 0; a < 12; ++a)
            for (int b = 0; b < 12; ++b) out.emplace_back(dofs[a], dofs[b], local[a][b]);
    }
}

} // namespace detail

/// a_h: alpha^{-1} (p,q) + alpha^{-1} (div p, div q) over both subdomains plus
/// the interface penalty gamma h_K^{-1} alpha_min^{-1} < [p.n],[q.n] >_Gamma.
inline std::vector<Trip> assemble_ah(const Triangulation& tri, const MeshClassification& cls,
                                     const DofMap& dm, const AssemblyParams& prm) {
    std::vector<Trip> out;
    for (int s = 0; s < 2; ++s)
        detail::add_mass_divdiv(tri, cls, dm, s, 1.0 / prm.alpha(s), 1.0 / prm.alpha(s),
                                prm.volume_degree, out);
    detail::add_flux_jump_gamma(tri, cls, dm,
                                [&](int c) { return prm.gamma / (tri.h_K[c] * prm.alpha_min()); },
                                out);
    return out;
}

/// b_h(q, u) = sum_i (u_i, div q_i) - < {u}, [q.n] >_Gamma as (p-dof, u-dof) triplets.
inline std::vector<Trip> assemble_bh(const Triangulation& tri, const MeshClassification& cls,
                                     const DofMap& dm, const AssemblyParams& prm) {
    std::vector<Trip> out;
    for (int s = 0; s < 2; ++s) {
        for (int c : cls.T_h[s]) {
            const CellMap map(tri, c);
            const auto divs = basis_div(map);
            const auto dofs = dm.cell_p_dofs(tri, s, c);
            const int ud = dm.u_dof(s, c);
            const double area = region_rule(tri, cls, c, s, 1).total_weight();
            for (int a = 0; a < 6; ++a) out.emplace_back(dofs[a], ud, divs[a] * area);
        }
    }
    for (int c : cls.G_h) {
        const auto& cg = cls.cut(c);
        const CellMap map(tri, c);
        const std::array<double, 2> k{cg.k1, cg.k2};
        std::array<std::array<int, 6>, 2> pdofs;
        std::array<int, 2> udofs;
        for (int s = 0; s < 2; ++s) {
            pdofs[s] = dm.cell_p_dofs(tri, s, c);
            udofs[s] = dm.u_dof(s, c);
        }
        for (size_t q = 0; q < cg.quad_gamma.points.size(); ++q) {
            const auto phi = eval_basis(map, cg.quad_gamma.points[q]);
            const Vec2 n = cg.quad_gamma.normals[q];
            const double w = cg.quad_gamma.weights[q];
            for (int i = 0; i < 2; ++i) {       // flux side, jump sign
                const double sgn = i == 0 ? 1.0 : -1.0;
                for (int j = 0; j < 2; ++j) {   // scalar side, averaged weight
                    for (int a = 0; a < 6; ++a)
                        out.emplace_back(pdofs[i][a], udofs[j], -w * k[j] * sgn * dot(phi[a], n));
                }
            }
        }
    }
    return out;
}

/// J1: cut-edge jump penalty over the sub-segments e_i, unscaled by gamma1.
inline std::vector<Trip> assemble_j1(const Triangulation& tri, const MeshClassification& cls,
                                     const DofMap& dm, const AssemblyParams& prm) {
    std::vector<Trip> out;
    for (int s = 0; s < 2; ++s) {
        for (const auto& ce : cls.cut_edges[s]) {
            const double len = norm(ce.b - ce.a);
            double hw = tri.h;
            if (!prm.policy.j1_global_h) {
                hw = tri.h_K[ce.cells[0]];
                if (ce.cells[1] >= 0) hw = std::max(hw, tri.h_K[ce.cells[1]]);
            }
            const double w = prm.alpha_min() * hw * len;
            const int dl = dm.u_dof(s, ce.cells[0]);
            if (ce.cells[1] < 0) {
                out.emplace_back(dl, dl, w); // boundary edge: jump is the trace
            } else {
                const int dr = dm.u_dof(s, ce.cells[1]);
                out.emplace_back(dl, dl, w);
                out.emplace_back(dr, dr, w);
                out.emplace_back(dl, dr, -w);
                out.emplace_back(dr, dl, -w);
            }
        }
    }
    return out;
}

/// J2: interface jump penalty alpha_min h_K < [u],[v] >_Gamma, unscaled by gamma2.
inline std::vector<Trip> assemble_j2(const Triangulation& tri, const MeshClassification& cls,
                                     const DofMap& dm, const AssemblyParams& prm) {
    std::vector<Trip> out;
    for (int c : cls.G_h) {
        const auto& cg = cls.cut(c);
        const double w = prm.alpha_min() * tri.h_K[c] * cg.gamma_length();
        const int d1 = dm.u_dof(0, c), d2 = dm.u_dof(1, c);
        out.emplace_back(d1, d1, w);
        out.emplace_back(d2, d2, w);
        out.emplace_back(d1, d2, -w);
        out.emplace_back(d2, d1, -w);
    }
    return out;
}

namespace detail {

/// Dirichlet data on the outer boundary is natural in the mixed form: it pairs
/// with the normal trace of the flux tests, sub-segment-wise where the
/// interface crosses a boundary edge.
inline void add_boundary_data(const Triangulation& tri, const MeshClassification& cls,
                              const DofMap& dm, const ProblemSpec& problem,
                              Eigen::VectorXd& rhs) {
    std::vector<double> gx, gw;
    gauss_legendre(4, gx, gw);
    const LevelSet& phi = problem.level_set;

    for (int e = 0; e < tri.n_edges(); ++e) {
        if (!tri.is_boundary_edge(e)) continue;
        const int c = tri.edge_cells[e][0];
        const auto ev = tri.edge_vertices(e);
        int local = 0;
        while (tri.cell_edges[c][local] != e) ++local;
        const Vec2 n_out =
            rot_cw(ev[1] - ev[0]) / norm(ev[1] - ev[0]) * double(tri.cell_edge_signs[c][local]);
        const CellMap map(tri, c);

        const double fa = phi(ev[0]), fb = phi(ev[1]);
        std::array<std::array<Vec2, 2>, 2> seg; // per side: sub-segment of the edge
        std::array<bool, 2> active{false, false};
        if (fa * fb < 0.0) {
            const Vec2 x = intersect_edge(phi, ev[0], ev[1]);
            const int side_a = fa < 0 ? 0 : 1;
            seg[side_a] = {ev[0], x};
            seg[1 - side_a] = {x, ev[1]};
            active = {true, true};
        } else {
            const int s = phi((ev[0] + ev[1]) * 0.5) < 0 ? 0 : 1;
            seg[s] = {ev[0], ev[1]};
            active[s] = cls.in_side[s][c] != 0;
        }
        for (int s = 0; s < 2; ++s) {
            if (!active[s] || !cls.in_side[s][c]) continue;
            const double len = norm(seg[s][1] - seg[s][0]);
            if (len <= 0.0) continue;
            const auto dofs = dm.cell_p_dofs(tri, s, c);
            for (size_t k = 0; k < gx.size(); ++k) {
                const Vec2 x = seg[s][0] + (seg[s][1] - seg[s][0]) * (0.5 * (gx[k] + 1.0));
                const double w = 0.5 * gw[k] * len;
                const double g = problem.side[s].u(x);
                const auto phi_v = eval_basis(map, x);
                for (int a = 0; a < 6; ++a) rhs[dofs[a]] += w * g * dot(phi_v[a], n_out);
            }
        }
    }
}

} // namespace detail

/// Right-hand side: l_h(q,v) = (f, v) - (alpha^{-1} f, div q), plus the outer
/// Dirichlet data paired with q.n, plus the consistency corrections for
/// prescribed interface jumps. Nonzero g_D pairs with {q.n}_* and with the J2
/// penalty; nonzero g_N pairs with the Nitsche penalty and with {v}.
inline Eigen::VectorXd assemble_rhs(const Triangulation& tri, const MeshClassification& cls,
                                    const DofMap& dm, const AssemblyParams& prm,
                                    const ProblemSpec& problem) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dm.total);
    for (int s = 0; s < 2; ++s) {
        for (int c : cls.T_h[s]) {
            const CellMap map(tri, c);
            const auto divs = basis_div(map);
            const auto dofs = dm.cell_p_dofs(tri, s, c);
            const QuadratureRule rule = region_rule(tri, cls, c, s, prm.volume_degree);
            double f_int = 0.0;
            for (size_t q = 0; q < rule.points.size(); ++q)
                f_int += rule.weights[q] * problem.side[s].f(rule.points[q]);
            rhs[dm.u_dof(s, c)] += f_int;
            for (int a = 0; a < 6; ++a) rhs[dofs[a]] += -f_int * divs[a] / prm.alpha(s);

            if (!problem.p_is_alpha_grad_u) {
                // manufactured mixed data: the flux equation picks up the
                // residual of the constitutive relation
                for (size_t q = 0; q < rule.points.size(); ++q) {
                    const Vec2 x = rule.points[q];
                    const Vec2 defect =
                        problem.side[s].p(x) / prm.alpha(s) - problem.side[s].grad_u(x);
                    const auto phi = eval_basis(map, x);
                    for (int a = 0; a < 6; ++a)
                        rhs[dofs[a]] += rule.weights[q] * dot(defect, phi[a]);
                }
            }
        }
    }
    detail::add_boundary_data(tri, cls, dm, problem, rhs);
    if (!problem.jump.nonzero) return rhs;

    for (int c : cls.G_h) {
        const auto& cg = cls.cut(c);
        const CellMap map(tri, c);
        const std::array<double, 2> k{cg.k1, cg.k2};
        const double w_nitsche = prm.gamma / (tri.h_K[c] * prm.alpha_min());
        const double w_j2 = prm.gamma2 * prm.alpha_min() * tri.h_K[c];
        for (size_t q = 0; q < cg.quad_gamma.points.size(); ++q) {
            const Vec2 x = cg.quad_gamma.points[q];
            const Vec2 n = cg.quad_gamma.normals[q];
            const double w = cg.quad_gamma.weights[q];
            const double gd = problem.jump.g_D(x);
            const double gn = problem.jump.g_N(x);
            const auto phi = eval_basis(map, x);
            for (int s = 0; s < 2; ++s) {
                const double sgn = s == 0 ? 1.0 : -1.0;
                const double k_star = s == 0 ? k[1] : k[0]; // swapped weights
                const auto dofs = dm.cell_p_dofs(tri, s, c);
                for (int a = 0; a < 6; ++a) {
                    const double qn = dot(phi[a], n);
                    rhs[dofs[a]] += w * gd * k_star * qn;
                    rhs[dofs[a]] += w * gn * w_nitsche * sgn * qn;
                }
                rhs[dm.u_dof(s, c)] += w * gn * k[s];
                rhs[dm.u_dof(s, c)] += w * gd * w_j2 * sgn;
            }
        }
    }
    return rhs;
}

/// Full matrix [[A_pp, B], [-B^T, gamma1 J1 + gamma2 J2]] and right-hand side.
inline SaddleSystem assemble_system(const Triangulation& tri, const MeshClassification& cls,
                                    const DofMap& dm, const AssemblyParams& prm,
                                    const ProblemSpec& problem) {
    prm.validate();
    std::vector<Trip> trips = assemble_ah(tri, cls, dm, prm);
    for (const auto& t : assemble_bh(tri, cls, dm, prm)) {
        trips.emplace_back(t.row(), t.col(), t.value());
        trips.emplace_back(t.col(), t.row(), -t.value());
    }
    for (const auto& t : assemble_j1(tri, cls, dm, prm))
        trips.emplace_back(t.row(), t.col(), prm.gamma1 * t.value());
    for (const auto& t : assemble_j2(tri, cls, dm, prm))
        trips.emplace_back(t.row(), t.col(), prm.gamma2 * t.value());

    SaddleSystem sys;
    sys.total = dm.total;
    sys.p_offset = dm.p_offset;
    sys.u_offset = dm.u_offset;
    sys.A.resize(dm.total, dm.total);
    sys.A.setFromTriplets(trips.begin(), trips.end());
    sys.rhs = assemble_rhs(tri, cls, dm, prm, problem);
    if (sys.rhs.size() != sys.A.rows()) throw InternalError("assemble_system: dimension mismatch");
    return sys;
}

/// Gram matrix of the discrete pair norm: ||q||_h^2 + ||alpha^{1/2} v||_0^2
/// + J1(v,v) + J2(v,v), over the same dof layout as the system matrix.
inline SparseMat assemble_pair_norm_gram(const Triangulation& tri, const MeshClassification& cls,
                                         const DofMap& dm, const AssemblyParams& prm) {
    std::vector<Trip> trips;
    for (int s = 0; s < 2; ++s)
        detail::add_mass_divdiv(tri, cls, dm, s, 1.0 / prm.alpha(s), 1.0 / prm.alpha(s),
                                prm.volume_degree, trips);
    const double h2 = tri.h * tri.h;
    detail::add_flux_jump_gamma(tri, cls, dm,
                                [&](int c) { return tri.h_K[c] / (h2 * prm.alpha_min()); }, trips);
    for (int s = 0; s < 2; ++s) {
        for (int c : cls.T_h[s]) {
            const double area = region_rule(tri, cls, c, s, 1).total_weight();
            const int d = dm.u_dof(s, c);
            trips.emplace_back(d, d, prm.alpha(s) * area);
        }
    }
    for (const auto& t : assemble_j1(tri, cls, dm, prm)) trips.push_back(t);
    for (const auto& t : assemble_j2(tri, cls, dm, prm)) trips.push_back(t);
    SparseMat H(dm.total, dm.total);
    H.setFromTriplets(trips.begin(), trips.end());
    return H;
}

inline void write_matrix_market(const SparseMat& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
    out << std::setprecision(17);
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMat::InnerIterator it(A, k); it; ++it)
            out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

} // namespace cutmix
