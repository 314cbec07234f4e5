#pragma once

#include "ssnmg/mesh.hpp"

#include <Eigen/SparseCholesky>

#include <memory>
#include <optional>
#include <vector>

namespace ssnmg {

struct PoissonSolverConfig {
    double tolerance = 1e-10;      ///< relative residual target for the V-cycle iteration
    int max_cycles = 100;
    Index direct_threshold = 5000; ///< levels with at most this many unknowns are factorized
    int pre_smoothing = 2;
    int post_smoothing = 2;
    /// Jacobi damping; defaults to 2/3 in 1D and 4/5 in 2D.
    std::optional<double> jacobi_damping;
};

struct PoissonSolveStats {
    int cycles = 0;            ///< 0 when the level was solved directly
    double relative_residual = 0.0;
};

/// The smoothing operator K_j = A_j^{-1} W_j (discrete inverse Dirichlet
/// Laplacian with a lumped-mass right-hand side) on every level of a
/// hierarchy.
///
/// Because W_j is diagonal, W_j K_j = W_j A_j^{-1} W_j is symmetric, so K_j is
/// self-adjoint in <.,.>_j. Immutable after construction; apply calls only
/// allocate per-call scratch and may run concurrently.
class PoissonOperator {
public:
    explicit PoissonOperator(std::shared_ptr<const MeshHierarchy> hierarchy,
                             PoissonSolverConfig config = {});

    PoissonOperator(const PoissonOperator&) = delete;
    PoissonOperator& operator=(const PoissonOperator&) = delete;

    const MeshHierarchy& hierarchy() const noexcept { return *hierarchy_; }
    std::shared_ptr<const MeshHierarchy> hierarchy_ptr() const noexcept { return hierarchy_; }
    const PoissonSolverConfig& config() const noexcept { return config_; }

    const SparseMatrix& stiffness(int level) const;
    /// Diagonal of W_j.
    const Vector& lumped_mass(int level) const;
    bool solves_directly(int level) const;

    /// y = K u, i.e. A y = W u.
    FeVector apply_K(const FeVector& u) const;
    /// K* u = W^{-1} K^T W u.
    FeVector apply_K_adjoint(const FeVector& u) const;
    /// A y = rhs by V-cycles (or a sparse factorization on small levels).
    /// Throws SolverError if the tolerance is not met within max_cycles.
    FeVector poisson_solve(const FeVector& rhs, PoissonSolveStats* stats = nullptr) const;

    Vector apply_K(int level, const Vector& u) const;
    Vector apply_K_adjoint(int level, const Vector& u) const;
    Vector solve(int level, const Vector& rhs, PoissonSolveStats* stats = nullptr) const;

private:
    void vcycle(int level, const Vector& rhs, Vector& x) const;
    void smooth(int level, const Vector& rhs, Vector& x, int sweeps) const;

    std::shared_ptr<const MeshHierarchy> hierarchy_;
    PoissonSolverConfig config_;
    double damping_;
    std::vector<SparseMatrix> stiffness_;
    std::vector<Vector> inverse_diagonal_;
    std::vector<std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>>> direct_;
};

}  // namespace ssnmg
