#pragma once

#include "ssnmg/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ssnmg {

/// A linear operator known only through its action.
struct LinearMap {
    enum class InnerProduct { euclidean, discrete };

    std::function<Vector(const Vector&)> apply;
    Index dimension = 0;
    bool symmetric = false;
    InnerProduct inner_product = InnerProduct::euclidean;
    /// Quadrature weights, used when inner_product == discrete.
    Vector weights;
    std::string name;

    Vector operator()(const Vector& x) const { return apply(x); }

    double dot(const Vector& a, const Vector& b) const;

    static LinearMap identity(Index n);
    static LinearMap from_matrix(const DenseMatrix& a, bool symmetric = false);
};

struct KrylovOptions {
    double tolerance = 1e-8;   ///< on ||b - A x|| / ||b|| (Euclidean, nodal coefficients)
    int max_iterations = 1000;
};

struct KrylovResult {
    Vector solution;
    int iterations = 0;
    std::vector<double> residual_history;  ///< recurrence residuals, relative to ||b||
    bool converged = false;
    int matvec_count = 0;                  ///< applications of A
    int preconditioner_count = 0;          ///< applications of the preconditioner
    int restarts = 0;
    double true_relative_residual = 0.0;   ///< recomputed once at exit
};

/// Conjugate gradients from a zero initial guess. A must be SPD in its
/// declared inner product. Throws SolverError on breakdown (p^T A p <= 0);
/// hitting max_iterations is reported through `converged`, not thrown.
KrylovResult cg(const LinearMap& a, const Vector& b, const KrylovOptions& options = {});

/// Conjugate gradients squared on the left-preconditioned system
/// P A x = P b from a zero initial guess. Convergence is judged on the
/// unpreconditioned residual. On a rho breakdown, or when the preconditioned
/// residual collapses while r has not converged (inexact preconditioner), the
/// iteration restarts once from the current iterate; a second event throws
/// SolverError.
KrylovResult cgs(const LinearMap& a, const LinearMap& preconditioner, const Vector& b,
                 const KrylovOptions& options = {});

}  // namespace ssnmg
