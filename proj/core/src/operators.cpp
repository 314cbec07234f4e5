#include "ssnmg/operators.hpp"

#include <stdexcept>
#include <string>

namespace ssnmg {

Vector embed(const InactiveSet& set, const Vector& values) {
    if (values.size() != set.size()) throw std::invalid_argument("embed: vector length does not match the set");
    Vector full = Vector::Zero(set.num_nodes());
    Index k = 0;
    for (Index i : set.indices()) full[i] = values[k++];
    return full;
}

Vector extract(const InactiveSet& set, const Vector& full) {
    if (full.size() != set.num_nodes()) throw std::invalid_argument("extract: vector length does not match the level");
    Vector out(set.size());
    Index k = 0;
    for (Index i : set.indices()) out[k++] = full[i];
    return out;
}

SparseMatrix submatrix(const SparseMatrix& m, const InactiveSet& rows, const InactiveSet& cols) {
    std::vector<Index> row_pos(static_cast<std::size_t>(m.rows()), -1);
    std::vector<Index> col_pos(static_cast<std::size_t>(m.cols()), -1);
    Index k = 0;
    for (Index i : rows.indices()) row_pos[i] = k++;
    k = 0;
    for (Index i : cols.indices()) col_pos[i] = k++;

    std::vector<Eigen::Triplet<double>> t;
    for (Index c = 0; c < m.outerSize(); ++c) {
        if (col_pos[c] < 0) continue;
        for (SparseMatrix::InnerIterator it(m, c); it; ++it)
            if (row_pos[it.row()] >= 0) t.emplace_back(row_pos[it.row()], col_pos[c], it.value());
    }
    SparseMatrix out(rows.size(), cols.size());
    out.setFromTriplets(t.begin(), t.end());
    out.makeCompressed();
    return out;
}

// ---------------------------------------------------------------------------

GOperator::GOperator(std::shared_ptr<const PoissonOperator> k, InactiveSet inactive, double beta)
    : k_(std::move(k)), inactive_(std::move(inactive)), beta_(beta) {
    if (!k_) throw std::invalid_argument("GOperator: null smoothing operator");
    if (!(beta_ > 0.0)) throw std::invalid_argument("GOperator: beta must be positive");
    if (inactive_.num_nodes() != k_->hierarchy().level(inactive_.level()).num_interior())
        throw std::invalid_argument("GOperator: inactive set does not match its level");
}

Vector GOperator::apply_full(const Vector& u) const {
    const int j = level();
    return k_->apply_K_adjoint(j, k_->apply_K(j, u)) + beta_ * u;
}

Vector GOperator::apply(const Vector& u) const {
    if (u.size() != dimension()) throw std::invalid_argument("GOperator::apply: index mismatch");
    ++applications_;
    if (dimension() == 0) return Vector();
    return extract(inactive_, apply_full(embed(inactive_, u)));
}

LinearMap GOperator::as_map() const {
    LinearMap m;
    m.apply = [this](const Vector& x) { return apply(x); };
    m.dimension = dimension();
    m.symmetric = true;
    m.inner_product = LinearMap::InnerProduct::discrete;
    m.weights = extract(inactive_, k_->lumped_mass(level()));
    m.name = "G";
    return m;
}

// ---------------------------------------------------------------------------

InactiveProjection::InactiveProjection(const MeshHierarchy& hierarchy, const InactiveSet& fine,
                                       const InactiveSet& coarse, double mass_tolerance)
    : fine_dim_(fine.size()) {
    if (fine.level() < 1 || coarse.level() != fine.level() - 1)
        throw std::invalid_argument("InactiveProjection: sets must be on consecutive levels");
    interp_ = submatrix(hierarchy.interpolation(fine.level()), fine, coarse);
    fine_mass_ = submatrix(hierarchy.mass(fine.level()), fine, fine);
    coarse_mass_ = submatrix(hierarchy.mass(coarse.level()), coarse, coarse);
    if (coarse.size() > 0) {
        mass_solver_ = std::make_unique<std::remove_reference_t<decltype(*mass_solver_)>>();
        mass_solver_->setTolerance(mass_tolerance);
        mass_solver_->setMaxIterations(std::max<Index>(1000, coarse.size()));
        mass_solver_->compute(coarse_mass_);
    }
}

Vector InactiveProjection::project(const Vector& fine) const {
    if (fine.size() != fine_dim_) throw std::invalid_argument("InactiveProjection::project: dimension mismatch");
    if (!mass_solver_) return Vector();
    const Vector rhs = interp_.transpose() * (fine_mass_ * fine);
    const double scale = rhs.norm();
    if (scale == 0.0) return Vector::Zero(rhs.size());
    // Solve for the unit right-hand side; tiny norms would underflow the
    // squared-residual test inside the CG.
    Vector x = scale * mass_solver_->solve(rhs / scale);
    if (mass_solver_->info() != Eigen::Success)
        throw SolverError("InactiveProjection: coarse mass solve did not converge");
    return x;
}

// ---------------------------------------------------------------------------

CoarseSolver::CoarseSolver(const GOperator& g, CoarseSolveOptions options) : g_(g), options_(options) {
    if (options_.mode != CoarseSolveOptions::Mode::exact || g.dimension() == 0) return;
    const Index n = g.dimension();
    DenseMatrix dense(n, n);
    Vector e = Vector::Zero(n);
    for (Index c = 0; c < n; ++c) {
        e[c] = 1.0;
        dense.col(c) = g.apply(e);
        e[c] = 0.0;
    }
    lu_.compute(dense);
}

Vector CoarseSolver::solve(const Vector& rhs) const {
    if (g_.dimension() == 0) return Vector();
    if (options_.mode == CoarseSolveOptions::Mode::exact) return lu_.solve(rhs);
    const KrylovResult res = cg(g_.as_map(), rhs, {options_.tolerance, options_.max_iterations});
    if (!res.converged)
        throw SolverError("coarse G solve did not converge on level " + std::to_string(g_.level()));
    return res.solution;
}

// ---------------------------------------------------------------------------

TwoGridPreconditioner::TwoGridPreconditioner(std::shared_ptr<const PoissonOperator> k, const InactiveSet& fine,
                                             double beta, CoarseSolveOptions coarse)
    : fine_(fine), beta_(beta) {
    if (!k) throw std::invalid_argument("TwoGridPreconditioner: null smoothing operator");
    if (!(beta > 0.0)) throw std::invalid_argument("TwoGridPreconditioner: beta must be positive");
    const MeshHierarchy& h = k->hierarchy();
    InactiveSet coarse_set = coarsen_inactive(fine_, h);
    projection_ = std::make_unique<InactiveProjection>(h, fine_, coarse_set);
    coarse_g_ = std::make_unique<GOperator>(std::move(k), std::move(coarse_set), beta);
    coarse_solver_ = std::make_unique<CoarseSolver>(*coarse_g_, coarse);
}

Vector TwoGridPreconditioner::apply_S(const Vector& r) const {
    if (r.size() != dimension()) throw std::invalid_argument("apply_S: dimension mismatch");
    if (coarse_empty()) return r / beta_;
    const Vector c = projection_->project(r);
    const Vector x = coarse_solver_->solve(c);
    return projection_->interpolate(x) + (r - projection_->interpolate(c)) / beta_;
}

Vector TwoGridPreconditioner::apply_M(const Vector& u) const {
    if (u.size() != dimension()) throw std::invalid_argument("apply_M: dimension mismatch");
    if (coarse_empty()) return beta_ * u;
    const Vector c = projection_->project(u);
    return projection_->interpolate(coarse_g_->apply(c)) + beta_ * (u - projection_->interpolate(c));
}

LinearMap TwoGridPreconditioner::S_map() const {
    return {[this](const Vector& x) { return apply_S(x); }, dimension(), false, LinearMap::InnerProduct::euclidean, {},
            "S"};
}

LinearMap TwoGridPreconditioner::M_map() const {
    return {[this](const Vector& x) { return apply_M(x); }, dimension(), false, LinearMap::InnerProduct::euclidean, {},
            "M"};
}

// ---------------------------------------------------------------------------

MultigridPreconditioner::MultigridPreconditioner(std::shared_ptr<const PoissonOperator> k, const InactiveSet& fine,
                                                 double beta, int base_level, MultigridVariant variant,
                                                 CoarseSolveOptions base_solve)
    : fine_level_(fine.level()), base_level_(base_level), beta_(beta), variant_(variant) {
    if (!k) throw std::invalid_argument("MultigridPreconditioner: null smoothing operator");
    if (!(beta > 0.0)) throw std::invalid_argument("MultigridPreconditioner: beta must be positive");
    if (base_level < 0 || base_level >= fine_level_)
        throw std::invalid_argument("MultigridPreconditioner: need 0 <= base_level < fine level");
    const MeshHierarchy& h = k->hierarchy();
    sets_ = coarsen_chain(fine, base_level, h);
    for (const auto& s : sets_) dims_.push_back(s.size());
    for (int lvl = base_level; lvl < fine_level_; ++lvl)
        g_.push_back(std::make_unique<GOperator>(k, sets_[lvl - base_level], beta));
    for (int lvl = base_level + 1; lvl <= fine_level_; ++lvl)
        proj_.push_back(std::make_unique<InactiveProjection>(h, sets_[lvl - base_level], sets_[lvl - 1 - base_level]));
    base_solver_ = std::make_unique<CoarseSolver>(*g_.front(), base_solve);
}

const InactiveSet& MultigridPreconditioner::inactive(int level) const {
    if (level < base_level_ || level > fine_level_) throw std::out_of_range("MultigridPreconditioner: level outside chain");
    return sets_[level - base_level_];
}

long long MultigridPreconditioner::g_applications(int level) const {
    if (level < base_level_ || level >= fine_level_) return 0;
    return g_[level - base_level_]->applications();
}

Vector MultigridPreconditioner::apply_level(int level, const Vector& r) const {
    if (level == base_level_) {
        ++base_solves_;
        return base_solver_->solve(r);
    }
    const InactiveProjection& p = *proj_[level - base_level_ - 1];
    if (p.coarse_dimension() == 0) return r / beta_;

    const Vector c = p.project(r);
    Vector x = apply_level(level - 1, c);
    if (variant_ == MultigridVariant::newton && level - 1 > base_level_) {
        // N(X) c = 2 X c - X G X c
        const GOperator& g = *g_[level - 1 - base_level_];
        x = 2.0 * x - apply_level(level - 1, g.apply(x));
    }
    return p.interpolate(x) + (r - p.interpolate(c)) / beta_;
}

Vector MultigridPreconditioner::apply(const Vector& r) const {
    if (r.size() != dimension()) throw std::invalid_argument("MultigridPreconditioner::apply: dimension mismatch");
    return apply_level(fine_level_, r);
}

LinearMap MultigridPreconditioner::as_map() const {
    return {[this](const Vector& x) { return apply(x); }, dimension(), false, LinearMap::InnerProduct::euclidean, {},
            variant_ == MultigridVariant::newton ? "Z" : "Z_naive"};
}

}  // namespace ssnmg
