#include "ssnmg/poisson.hpp"

#include <stdexcept>
#include <string>

namespace ssnmg {

PoissonOperator::PoissonOperator(std::shared_ptr<const MeshHierarchy> hierarchy, PoissonSolverConfig config)
    : hierarchy_(std::move(hierarchy)), config_(config) {
    if (!hierarchy_) throw std::invalid_argument("PoissonOperator: null hierarchy");
    if (config_.tolerance <= 0.0) throw std::invalid_argument("PoissonOperator: tolerance must be positive");
    damping_ = config_.jacobi_damping.value_or(hierarchy_->dim() == 1 ? 2.0 / 3.0 : 4.0 / 5.0);

    const int levels = hierarchy_->num_levels();
    stiffness_.reserve(static_cast<std::size_t>(levels));
    inverse_diagonal_.reserve(static_cast<std::size_t>(levels));
    direct_.resize(static_cast<std::size_t>(levels));
    for (int j = 0; j < levels; ++j) {
        stiffness_.push_back(assemble_stiffness(hierarchy_->level(j)));
        inverse_diagonal_.push_back(stiffness_.back().diagonal().cwiseInverse());
        // Level 0 has no coarser grid to correct on, so it is always factorized.
        if (j == 0 || stiffness_.back().rows() <= config_.direct_threshold) {
            auto ldlt = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>(stiffness_.back());
            if (ldlt->info() != Eigen::Success)
                throw SolverError("PoissonOperator: factorization failed on level " + std::to_string(j));
            direct_[j] = std::move(ldlt);
        }
    }
}

const SparseMatrix& PoissonOperator::stiffness(int level) const {
    hierarchy_->level(level);
    return stiffness_[level];
}

const Vector& PoissonOperator::lumped_mass(int level) const {
    return hierarchy_->level(level).weights();
}

bool PoissonOperator::solves_directly(int level) const {
    hierarchy_->level(level);
    return direct_[level] != nullptr;
}

void PoissonOperator::smooth(int level, const Vector& rhs, Vector& x, int sweeps) const {
    const SparseMatrix& a = stiffness_[level];
    const Vector& dinv = inverse_diagonal_[level];
    for (int s = 0; s < sweeps; ++s) {
        Vector r = rhs - a * x;
        x.array() += damping_ * dinv.array() * r.array();
    }
}

void PoissonOperator::vcycle(int level, const Vector& rhs, Vector& x) const {
    if (direct_[level]) {
        x = direct_[level]->solve(rhs);
        return;
    }
    smooth(level, rhs, x, config_.pre_smoothing);

    // Coarse-grid correction. Nested P1 spaces make J^T A_j J = A_{j-1}, so the
    // residual transfers with J^T (no 2^{-d} scaling).
    const SparseMatrix& j = hierarchy_->interpolation(level);
    const Vector residual = rhs - stiffness_[level] * x;
    const Vector coarse_rhs = j.transpose() * residual;
    Vector correction = Vector::Zero(coarse_rhs.size());
    vcycle(level - 1, coarse_rhs, correction);
    x += j * correction;

    smooth(level, rhs, x, config_.post_smoothing);
}

Vector PoissonOperator::solve(int level, const Vector& rhs, PoissonSolveStats* stats) const {
    hierarchy_->level(level);
    if (rhs.size() != stiffness_[level].rows())
        throw std::invalid_argument("poisson_solve: right-hand side length does not match level");

    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) {
        if (stats) *stats = {};
        return Vector::Zero(rhs.size());
    }
    if (direct_[level]) {
        Vector x = direct_[level]->solve(rhs);
        if (stats) *stats = {0, (rhs - stiffness_[level] * x).norm() / rhs_norm};
        return x;
    }

    Vector x = Vector::Zero(rhs.size());
    double rel = 1.0;
    for (int cycle = 1; cycle <= config_.max_cycles; ++cycle) {
        vcycle(level, rhs, x);
        rel = (rhs - stiffness_[level] * x).norm() / rhs_norm;
        if (rel <= config_.tolerance) {
            if (stats) *stats = {cycle, rel};
            return x;
        }
    }
    throw SolverError("poisson_solve: no convergence on level " + std::to_string(level) + " after " +
                      std::to_string(config_.max_cycles) + " V-cycles (relative residual " +
                      std::to_string(rel) + ")");
}

Vector PoissonOperator::apply_K(int level, const Vector& u) const {
    return solve(level, lumped_mass(level).cwiseProduct(u));
}

Vector PoissonOperator::apply_K_adjoint(int level, const Vector& u) const {
    // W^{-1} K^T W u with K^T = W A^{-1} (A symmetric).
    const Vector& w = lumped_mass(level);
    const Vector kt_w_u = w.cwiseProduct(solve(level, w.cwiseProduct(u)));
    return kt_w_u.cwiseQuotient(w);
}

FeVector PoissonOperator::apply_K(const FeVector& u) const {
    return {u.level, apply_K(u.level, u.values)};
}

FeVector PoissonOperator::apply_K_adjoint(const FeVector& u) const {
    return {u.level, apply_K_adjoint(u.level, u.values)};
}

FeVector PoissonOperator::poisson_solve(const FeVector& rhs, PoissonSolveStats* stats) const {
    return {rhs.level, solve(rhs.level, rhs.values, stats)};
}

}  // namespace ssnmg
