#pragma once

#include "ssnmg/active_sets.hpp"
#include "ssnmg/krylov.hpp"
#include "ssnmg/poisson.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>

#include <atomic>
#include <memory>
#include <vector>

namespace ssnmg {

/// Scatter a vector indexed by `set` into a full level vector (zeros elsewhere).
Vector embed(const InactiveSet& set, const Vector& values);
/// Gather the entries of a full level vector that belong to `set`.
Vector extract(const InactiveSet& set, const Vector& full);
/// Rows `rows`, columns `cols` of a sparse matrix.
SparseMatrix submatrix(const SparseMatrix& m, const InactiveSet& rows, const InactiveSet& cols);

/// G = P (K* K + beta I) E on the inactive indices of one level.
class GOperator {
public:
    GOperator(std::shared_ptr<const PoissonOperator> k, InactiveSet inactive, double beta);

    GOperator(const GOperator&) = delete;
    GOperator& operator=(const GOperator&) = delete;

    int level() const noexcept { return inactive_.level(); }
    double beta() const noexcept { return beta_; }
    Index dimension() const noexcept { return inactive_.size(); }
    const InactiveSet& inactive() const noexcept { return inactive_; }
    const PoissonOperator& smoothing() const noexcept { return *k_; }

    /// Two Poisson solves per call.
    Vector apply(const Vector& u) const;
    /// (K* K + beta I) applied to a full level vector.
    Vector apply_full(const Vector& u) const;
    LinearMap as_map() const;

    long long applications() const noexcept { return applications_.load(); }

private:
    std::shared_ptr<const PoissonOperator> k_;
    InactiveSet inactive_;
    double beta_;
    mutable std::atomic<long long> applications_{0};
};

/// L2-orthogonal projection pi from the fine inactive space onto the coarse
/// inactive space, pi = (L_c^I)^{-1} (J^I)^T L_f^I with consistent mass
/// matrices. Also holds J^I, the interpolation restricted to these sets.
class InactiveProjection {
public:
    InactiveProjection(const MeshHierarchy& hierarchy, const InactiveSet& fine, const InactiveSet& coarse,
                       double mass_tolerance = 1e-12);

    Index fine_dimension() const noexcept { return fine_dim_; }
    Index coarse_dimension() const noexcept { return interp_.cols(); }
    const SparseMatrix& interpolation() const noexcept { return interp_; }
    const SparseMatrix& fine_mass() const noexcept { return fine_mass_; }
    const SparseMatrix& coarse_mass() const noexcept { return coarse_mass_; }

    /// Coarse coefficients of pi u; throws SolverError if the mass solve stalls.
    Vector project(const Vector& fine) const;
    Vector interpolate(const Vector& coarse) const { return interp_ * coarse; }

private:
    Index fine_dim_;
    SparseMatrix interp_;
    SparseMatrix fine_mass_;
    SparseMatrix coarse_mass_;
    std::unique_ptr<Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                             Eigen::DiagonalPreconditioner<double>>> mass_solver_;
};

/// How G^{-1} is applied on the coarsest level of a preconditioner.
struct CoarseSolveOptions {
    enum class Mode { iterative, exact };
    Mode mode = Mode::iterative;  ///< exact: dense LU of the assembled coarse G
    double tolerance = 1e-10;
    int max_iterations = 2000;
};

/// Inverse of G by CG, or by a dense factorization.
class CoarseSolver {
public:
    CoarseSolver(const GOperator& g, CoarseSolveOptions options);
    Vector solve(const Vector& rhs) const;

private:
    const GOperator& g_;
    CoarseSolveOptions options_;
    Eigen::PartialPivLU<DenseMatrix> lu_;
};

/// Two-grid pair on the inactive space of level j:
///   M = J G_c pi + beta (I - J pi),   S = J G_c^{-1} pi + beta^{-1} (I - J pi),
/// with the coarse inactive set from coarsen_inactive. When that set is
/// empty, M = beta I and S = beta^{-1} I.
class TwoGridPreconditioner {
public:
    TwoGridPreconditioner(std::shared_ptr<const PoissonOperator> k, const InactiveSet& fine, double beta,
                          CoarseSolveOptions coarse = {});

    const InactiveSet& fine_set() const noexcept { return fine_; }
    const InactiveSet& coarse_set() const noexcept { return coarse_g_->inactive(); }
    bool coarse_empty() const noexcept { return coarse_set().empty(); }
    Index dimension() const noexcept { return fine_.size(); }
    double beta() const noexcept { return beta_; }
    const GOperator& coarse_G() const noexcept { return *coarse_g_; }
    const InactiveProjection& projection() const noexcept { return *projection_; }

    Vector apply_S(const Vector& r) const;
    Vector apply_M(const Vector& u) const;
    LinearMap S_map() const;
    LinearMap M_map() const;

private:
    InactiveSet fine_;
    double beta_;
    std::unique_ptr<GOperator> coarse_g_;
    std::unique_ptr<InactiveProjection> projection_;
    std::unique_ptr<CoarseSolver> coarse_solver_;
};

enum class MultigridVariant {
    newton,  ///< Z_k = I(N(Z_{k-1})) with N(X) = 2X - X G X
    naive    ///< plain recursion Z_k = I(Z_{k-1})
};

/// Multigrid approximation Z_{j,j0} of the inverse of G on level j, built
/// from the chain of coarsened inactive sets down to base level j0, with
///   I(X) r = J X pi r + beta^{-1} (r - J pi r).
/// For j0 = j - 1 both variants coincide with the two-grid S.
class MultigridPreconditioner {
public:
    MultigridPreconditioner(std::shared_ptr<const PoissonOperator> k, const InactiveSet& fine, double beta,
                            int base_level, MultigridVariant variant, CoarseSolveOptions base_solve = {});

    int fine_level() const noexcept { return fine_level_; }
    int base_level() const noexcept { return base_level_; }
    MultigridVariant variant() const noexcept { return variant_; }
    Index dimension() const noexcept { return dims_.back(); }
    const InactiveSet& inactive(int level) const;

    Vector apply(const Vector& r) const;
    LinearMap as_map() const;

    /// G applications on `level` made by apply() so far (Newton steps only).
    long long g_applications(int level) const;
    long long base_solves() const noexcept { return base_solves_.load(); }

private:
    Vector apply_level(int level, const Vector& r) const;

    int fine_level_;
    int base_level_;
    double beta_;
    MultigridVariant variant_;
    std::vector<InactiveSet> sets_;                           // index level - base_level
    std::vector<Index> dims_;
    std::vector<std::unique_ptr<GOperator>> g_;               // levels base..fine-1
    std::vector<std::unique_ptr<InactiveProjection>> proj_;   // proj_[k - base - 1]: level k -> k-1
    std::unique_ptr<CoarseSolver> base_solver_;
    mutable std::atomic<long long> base_solves_{0};
};

}  // namespace ssnmg
