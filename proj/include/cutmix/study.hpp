#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <future>
#include <limits>

#include "cutmix/norms.hpp"
#include "cutmix/solver.hpp"

namespace cutmix {

struct ConvergenceRow {
    int N = 0;
    double h = 0.0;
    int dofs = 0;
    double e_p = 0.0, e_up = 0.0;
    double residual = 0.0;
    double order_p = std::numeric_limits<double>::quiet_NaN();
    double order_up = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;

    /// Orders between consecutive rows, filled only where N doubles.
    void compute_orders() {
        for (size_t i = 1; i < rows.size(); ++i) {
            auto& r = rows[i];
            const auto& p = rows[i - 1];
            if (r.N != 2 * p.N || p.N <= 0) continue;
            if (r.e_p > 0 && p.e_p > 0) r.order_p = std::log2(p.e_p / r.e_p);
            if (r.e_up > 0 && p.e_up > 0) r.order_up = std::log2(p.e_up / r.e_up);
        }
    }

    /// Mean observed order over the whole table (telescoped ratio).
    double mean_order_p() const { return mean_order(&ConvergenceRow::e_p); }
    double mean_order_up() const { return mean_order(&ConvergenceRow::e_up); }

  private:
    double mean_order(double ConvergenceRow::*field) const {
        if (rows.size() < 2) return std::numeric_limits<double>::quiet_NaN();
        const double e0 = rows.front().*field, e1 = rows.back().*field;
        const double steps = std::log2(double(rows.back().N) / double(rows.front().N));
        return std::log2(e0 / e1) / steps;
    }
};

inline std::string fmt_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

inline std::string to_csv(const ConvergenceTable& table) {
    std::string out = "N,h,dofs,e_p,order_p,e_up,order_up,residual\n";
    for (const auto& r : table.rows) {
        out += std::to_string(r.N) + "," + fmt_sci(r.h) + "," + std::to_string(r.dofs) + ",";
        out += fmt_sci(r.e_p) + ",";
        out += std::isnan(r.order_p) ? std::string() : fmt_sci(r.order_p);
        out += "," + fmt_sci(r.e_up) + ",";
        out += std::isnan(r.order_up) ? std::string() : fmt_sci(r.order_up);
        out += "," + fmt_sci(r.residual) + "\n";
    }
    return out;
}

struct RunConfig {
    std::string problem;
    double alpha1 = 1.0, alpha2 = 1.0;
    std::vector<int> mesh_sizes;
    double gamma = 1.0, gamma1 = 1.0, gamma2 = 1.0;
    double xi = 0.0;
    std::vector<double> xi_list;
    std::string mesh_file;
    int polyline_depth = 2;
    int assembly_degree = 4;
    int norm_degree = 6;
    int gamma_points = 5;
    std::string output;
    std::string dump_matrix;
    bool seeded = false;
    uint64_t seed = 0;
    int threads = 1;

    CutOptions cut_options() const { return {polyline_depth, assembly_degree, gamma_points}; }
    AssemblyParams params() const {
        AssemblyParams prm;
        prm.alpha1 = alpha1;
        prm.alpha2 = alpha2;
        prm.gamma = gamma;
        prm.gamma1 = gamma1;
        prm.gamma2 = gamma2;
        prm.volume_degree = assembly_degree;
        return prm;
    }
};

/// One meshed, assembled, solved, measured configuration. Convenience bundle
/// for tests and the drivers.
struct SingleRun {
    Triangulation tri;
    MeshClassification cls;
    DofMap dm;
    AssemblyParams prm;
    SolveReport sol;
    ErrorReport err;
};

inline SingleRun solve_problem(const ProblemSpec& ps, Triangulation tri, const RunConfig& cfg) {
    SingleRun run{std::move(tri), {}, {}, cfg.params(), {}, {}};
    run.cls = classify(run.tri, ps.level_set, cfg.cut_options());
    run.dm = build_dofmap(run.tri, run.cls);
    const SaddleSystem sys = assemble_system(run.tri, run.cls, run.dm, run.prm, ps);
    if (!cfg.dump_matrix.empty()) write_matrix_market(sys.A, cfg.dump_matrix);
    run.sol = solve_direct(sys);
    run.err = compute_errors(run.tri, run.cls, run.dm, run.prm, ps, run.sol.solution,
                             cfg.norm_degree);
    return run;
}

namespace detail {

inline Triangulation make_mesh(const RunConfig& cfg, int N) {
    if (!cfg.mesh_file.empty()) return import_mesh(cfg.mesh_file);
    if (cfg.seeded) return build_perturbed(N, cfg.seed);
    return build_structured(N);
}

inline ConvergenceRow study_row(const RunConfig& cfg, int N) {
    RunConfig local = cfg;
    if (!cfg.dump_matrix.empty() && cfg.mesh_sizes.size() > 1)
        local.dump_matrix = cfg.dump_matrix + ".N" + std::to_string(N);
    const ProblemSpec ps = make_problem(cfg.problem, cfg.alpha1, cfg.alpha2, cfg.xi);
    const SingleRun run = solve_problem(ps, make_mesh(cfg, N), local);
    ConvergenceRow row;
    row.N = N;
    row.h = run.tri.h;
    row.dofs = run.dm.total;
    row.e_p = run.err.e_p;
    row.e_up = run.err.e_up;
    row.residual = run.sol.relative_residual;
    return row;
}

} // namespace detail

/// Mesh-refinement study: one row per mesh size, orders for consecutive
/// halvings, CSV written to cfg.output when set.
inline ConvergenceTable run_study(const RunConfig& cfg) {
    if (cfg.problem.empty()) throw ConfigError("run_study: no problem selected");
    std::vector<int> sizes = cfg.mesh_sizes;
    if (!cfg.mesh_file.empty()) sizes = {0};
    if (sizes.empty()) throw ConfigError("run_study: no mesh sizes given");

    ConvergenceTable table;
    table.rows.resize(sizes.size());
    const int threads = std::max(1, cfg.threads);
    if (threads == 1 || sizes.size() == 1) {
        for (size_t i = 0; i < sizes.size(); ++i) table.rows[i] = detail::study_row(cfg, sizes[i]);
    } else {
        for (size_t base = 0; base < sizes.size(); base += threads) {
            std::vector<std::future<ConvergenceRow>> fut;
            for (size_t i = base; i < std::min(base + threads, sizes.size()); ++i)
                fut.push_back(std::async(std::launch::async,
                                         [&cfg, N = sizes[i]] { return detail::study_row(cfg, N); }));
            for (size_t i = 0; i < fut.size(); ++i) table.rows[base + i] = fut[i].get();
        }
    }
    table.compute_orders();
    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output);
        if (!out) throw ConfigError("cannot open '" + cfg.output + "' for writing");
        out << to_csv(table);
    }
    return table;
}

struct SweepRow {
    double xi = 0.0;
    double e_up = 0.0, e_p = 0.0;
};

inline std::string to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "xi,e_up,e_p\n";
    for (const auto& r : rows)
        out += fmt_sci(r.xi) + "," + fmt_sci(r.e_up) + "," + fmt_sci(r.e_p) + "\n";
    return out;
}

/// Interface-position sweep at fixed mesh size (one row per xi).
inline std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
    if (cfg.problem != "example3")
        throw ConfigError("run_sweep: interface sweeps are defined for example3 only");
    if (cfg.xi_list.empty()) throw ConfigError("run_sweep: empty xi list");
    if (cfg.mesh_sizes.size() != 1) throw ConfigError("run_sweep: exactly one mesh size expected");
    const int N = cfg.mesh_sizes[0];

    std::vector<SweepRow> rows(cfg.xi_list.size());
    auto one = [&](size_t i) {
        const double xi = cfg.xi_list[i];
        const ProblemSpec ps = make_problem(cfg.problem, cfg.alpha1, cfg.alpha2, xi);
        RunConfig local = cfg;
        local.dump_matrix.clear();
        const SingleRun run = solve_problem(ps, detail::make_mesh(cfg, N), local);
        rows[i] = {xi, run.err.e_up, run.err.e_p};
    };
    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        for (size_t i = 0; i < rows.size(); ++i) one(i);
    } else {
        for (size_t base = 0; base < rows.size(); base += threads) {
            std::vector<std::future<void>> fut;
            for (size_t i = base; i < std::min(base + size_t(threads), rows.size()); ++i)
                fut.push_back(std::async(std::launch::async, one, i));
            for (auto& f : fut) f.get();
        }
    }
    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output);
        if (!out) throw ConfigError("cannot open '" + cfg.output + "' for writing");
        out << to_csv(rows);
    }
    return rows;
}

/// Numerical inf-sup constant: smallest singular value of H^{-1/2} L H^{-1/2}
/// with H the Gram matrix of the discrete pair norm. Dense; guarded to small
/// problems.
inline double infsup_probe(const SparseMat& L, const SparseMat& H) {
    if (L.rows() > 4000)
        throw ConfigError("infsup_probe: dense probe limited to 4000 unknowns");
    const Eigen::MatrixXd Ld(L), Hd(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hd);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw InternalError("infsup_probe: pair-norm Gram is not positive definite");
    const Eigen::MatrixXd his = es.operatorInverseSqrt();
    const Eigen::MatrixXd M = his * Ld * his;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues().minCoeff();
}

inline double infsup_probe(const Triangulation& tri, const MeshClassification& cls,
                           const DofMap& dm, const AssemblyParams& prm, const ProblemSpec& ps) {
    const SaddleSystem sys = assemble_system(tri, cls, dm, prm, ps);
    const SparseMat H = assemble_pair_norm_gram(tri, cls, dm, prm);
    return infsup_probe(sys.A, H);
}

struct InterpRow {
    int N = 0;
    double h = 0.0;
    double err_triple = 0.0; // ||(p - Pi p, u - I u)||
    double err_p_l2 = 0.0;   // ||p - Pi p||_0
};

/// Interpolation-error study: BDM1 edge-moment interpolation and piecewise
/// constant projection of the analytically extended exact fields, measured in
/// the combined norm and in plain L2.
inline std::vector<InterpRow> interpolation_study(const ProblemSpec& ps,
                                                  const std::vector<int>& mesh_sizes,
                                                  const RunConfig& cfg = {}) {
    std::vector<InterpRow> rows;
    const AssemblyParams prm = [&] {
        AssemblyParams p;
        p.alpha1 = ps.alpha1;
        p.alpha2 = ps.alpha2;
        return p;
    }();
    for (int N : mesh_sizes) {
        const Triangulation tri = build_structured(N);
        const MeshClassification cls = classify(tri, ps.level_set, cfg.cut_options());

        // interpolants of the extended fields, per subdomain
        std::array<std::vector<std::array<double, 6>>, 2> coeffs;
        std::array<std::vector<double>, 2> umean;
        for (int s = 0; s < 2; ++s) {
            coeffs[s].assign(tri.n_cells(), {});
            umean[s].assign(tri.n_cells(), 0.0);
            for (int c : cls.T_h[s]) {
                coeffs[s][c] = interpolate_bdm1(tri, c, ps.side[s].p);
                const auto v = tri.cell_vertices(c);
                umean[s][c] = project_p0(triangle_quadrature(v[0], v[1], v[2], cfg.norm_degree),
                                         ps.side[s].u);
            }
        }
        VecField perr{
            [&](int c, int s, const Vec2& x) {
                const auto phi = eval_basis(tri, c, x);
                Vec2 v = ps.side[s].p(x);
                for (int a = 0; a < 6; ++a) v -= phi[a] * coeffs[s][c][a];
                return v;
            },
            [&](int c, int s, const Vec2& x) {
                const auto d = basis_div(tri, c);
                double val = ps.side[s].div_p(x);
                for (int a = 0; a < 6; ++a) val -= d[a] * coeffs[s][c][a];
                return val;
            }};
        ScalarField uerr{[&](int c, int s, const Vec2& x) { return ps.side[s].u(x) - umean[s][c]; }};

        InterpRow row;
        row.N = N;
        row.h = tri.h;
        row.err_triple = triple_norm(tri, cls, prm, perr, uerr, cfg.norm_degree);
        double l2 = 0.0;
        for (int s = 0; s < 2; ++s)
            for (int c : cls.T_h[s]) {
                const QuadratureRule rule = region_rule(tri, cls, c, s, cfg.norm_degree);
                for (size_t q = 0; q < rule.points.size(); ++q) {
                    const Vec2 e = perr.val(c, s, rule.points[q]);
                    l2 += rule.weights[q] * dot(e, e);
                }
            }
        row.err_p_l2 = std::sqrt(l2);
        rows.push_back(row);
    }
    return rows;
}

} // namespace cutmix
