#pragma once

#include <Eigen/SparseLU>

#include <chrono>

#include "cutmix/assembly.hpp"

namespace cutmix {

struct SolveReport {
    Eigen::VectorXd solution;
    double relative_residual = 0.0; // against the original matrix
    long nnz_matrix = 0;
    long nnz_factors = 0;
    double elapsed_s = 0.0;
};

/// Sparse LU with partial pivoting and fill-reducing column ordering; one step
/// of iterative refinement when the residual exceeds 1e-12 relative.
inline SolveReport solve_direct(const SaddleSystem& sys) {
    if (sys.A.rows() != sys.A.cols()) throw SolverError("solve_direct: matrix not square");
    const auto t0 = std::chrono::steady_clock::now();

    Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu;
    SparseMat A = sys.A;
    A.makeCompressed();
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw SolverError("solve_direct: singular or ill-posed system (" + lu.lastErrorMessage() + ")");

    SolveReport rep;
    rep.solution = lu.solve(sys.rhs);
    const double bnorm = sys.rhs.norm();
    auto rel_res = [&](const Eigen::VectorXd& x) {
        const double r = (A * x - sys.rhs).norm();
        return bnorm > 0 ? r / bnorm : r;
    };
    rep.relative_residual = rel_res(rep.solution);
    if (rep.relative_residual > 1e-12) {
        const Eigen::VectorXd corr = lu.solve(sys.rhs - A * rep.solution);
        const Eigen::VectorXd refined = rep.solution + corr;
        const double res2 = rel_res(refined);
        if (res2 < rep.relative_residual) {
            rep.solution = refined;
            rep.relative_residual = res2;
        }
    }
    rep.nnz_matrix = A.nonZeros();
    rep.nnz_factors = lu.nnzL() + lu.nnzU();
    rep.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace cutmix
