#include "ssnmg/ssnm.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ssnmg {

namespace {

KrylovResult solve_inner(const ControlProblem& problem, const GOperator& g, const Vector& rhs,
                         const SsnmOptions& options) {
    switch (options.solver) {
        case InnerSolver::cg:
            return cg(g.as_map(), rhs, options.inner);
        case InnerSolver::cgs_two_grid: {
            if (problem.level() < 1) return cg(g.as_map(), rhs, options.inner);
            const TwoGridPreconditioner s(problem.k, g.inactive(), problem.beta, options.coarse);
            return cgs(g.as_map(), s.S_map(), rhs, options.inner);
        }
        case InnerSolver::cgs_multigrid: {
            if (problem.level() < 1) return cg(g.as_map(), rhs, options.inner);
            const int base = std::clamp(options.multigrid_base_level, 0, problem.level() - 1);
            const MultigridPreconditioner z(problem.k, g.inactive(), problem.beta, base, options.multigrid_variant,
                                            options.coarse);
            return cgs(g.as_map(), z.as_map(), rhs, options.inner);
        }
    }
    throw std::logic_error("unknown inner solver");
}

}  // namespace

std::pair<SsnmState, SsnmReport> ssnm_solve(const ControlProblem& problem, const InactiveSet& initial_inactive,
                                            const SsnmOptions& options) {
    if (!problem.k) throw std::invalid_argument("ssnm_solve: null smoothing operator");
    if (!(problem.beta > 0.0)) throw std::invalid_argument("ssnm_solve: beta must be positive");
    const int j = problem.level();
    const LevelMesh& mesh = problem.k->hierarchy().level(j);
    const Index n = mesh.num_interior();
    if (problem.y_d.values.size() != n) throw std::invalid_argument("ssnm_solve: y_d does not match its level");
    if (initial_inactive.level() != j || initial_inactive.num_nodes() != n)
        throw std::invalid_argument("ssnm_solve: initial inactive set is on the wrong level");

    // W^{-1} b = K* y_d
    const Vector scaled_b = problem.k->apply_K_adjoint(j, problem.y_d.values);

    SsnmState state;
    state.inactive = initial_inactive;
    state.active = initial_inactive.complement();
    state.lambda = {j, Vector::Zero(n)};
    state.u = {j, Vector::Zero(n)};

    SsnmReport report;
    report.level = j;

    for (int outer = 1; outer <= options.max_outer; ++outer) {
        const GOperator g(problem.k, state.inactive, problem.beta);
        const Vector rhs = extract(state.inactive, scaled_b);

        OuterRecord rec;
        rec.outer = outer;
        rec.inactive_size = state.inactive.size();
        rec.inner = solve_inner(problem, g, rhs, options);
        if (!rec.inner.converged)
            throw SolverError("ssnm_solve: inner solve did not converge at outer iteration " + std::to_string(outer));
        if (options.reference_cg) rec.reference = cg(g.as_map(), rhs, options.inner);

        const Vector u = embed(state.inactive, rec.inner.solution);
        const Vector gradient = g.apply_full(u) - scaled_b;
        Vector lambda = Vector::Zero(n);
        for (Index i : state.active) lambda[i] = gradient[i];

        state.u.values = u;
        state.lambda.values = lambda;
        state.iteration = outer;
        rec.complementarity = (u.array() * lambda.array()).abs().maxCoeff();
        report.max_complementarity = std::max(report.max_complementarity, rec.complementarity);
        report.records.push_back(std::move(rec));

        std::vector<Index> next_active;
        std::vector<Index> next_inactive;
        for (Index i = 0; i < n; ++i) {
            if (lambda[i] - problem.beta * u[i] > 0.0)
                next_active.push_back(i);
            else
                next_inactive.push_back(i);
        }

        if (next_active == state.active) {
            report.converged = true;
            report.outer_iterations = outer;
            const Vector stationarity = gradient - lambda;
            const double bnorm = scaled_b.norm();
            report.stationarity_residual = bnorm > 0.0 ? stationarity.norm() / bnorm : stationarity.norm();
            report.inactive_fraction = n > 0 ? static_cast<double>(state.inactive.size()) / static_cast<double>(n) : 0.0;
            report.min_u = n > 0 ? u.minCoeff() : 0.0;
            report.min_lambda = n > 0 ? lambda.minCoeff() : 0.0;
            return {std::move(state), std::move(report)};
        }
        state.active = std::move(next_active);
        state.inactive = InactiveSet(j, std::move(next_inactive), n);
    }
    throw SolverError("ssnm_solve: active set did not settle within " + std::to_string(options.max_outer) +
                      " outer iterations");
}

std::vector<std::pair<SsnmState, SsnmReport>> grid_sequenced_solve(const std::vector<ControlProblem>& problems,
                                                                   const SsnmOptions& options) {
    std::vector<std::pair<SsnmState, SsnmReport>> out;
    for (std::size_t p = 0; p < problems.size(); ++p) {
        const ControlProblem& problem = problems[p];
        const MeshHierarchy& h = problem.k->hierarchy();
        InactiveSet start;
        if (p == 0) {
            start = InactiveSet::all(h.level(problem.level()));
        } else {
            const SsnmState& prev = out.back().first;
            if (problem.level() != prev.inactive.level() + 1)
                throw std::invalid_argument("grid_sequenced_solve: problems must be on consecutive levels");
            start = grid_sequencing_guess(inactive_domain(prev.inactive, h), h);
        }
        out.push_back(ssnm_solve(problem, start, options));
    }
    return out;
}

}  // namespace ssnmg
