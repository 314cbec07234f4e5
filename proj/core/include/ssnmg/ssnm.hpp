#pragma once

#include "ssnmg/operators.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace ssnmg {

/// min 1/2 |K u - y_d|^2 + beta/2 |u|^2 subject to u >= 0 at the nodes of one level.
struct ControlProblem {
    std::shared_ptr<const PoissonOperator> k;
    double beta = 1e-4;
    FeVector y_d;

    int level() const noexcept { return y_d.level; }
};

enum class InnerSolver { cg, cgs_two_grid, cgs_multigrid };

struct SsnmOptions {
    InnerSolver solver = InnerSolver::cgs_two_grid;
    KrylovOptions inner{1e-8, 1000};
    CoarseSolveOptions coarse;
    int multigrid_base_level = 0;
    MultigridVariant multigrid_variant = MultigridVariant::newton;
    int max_outer = 50;
    /// Also run unpreconditioned CG on every inner system, for comparison only.
    bool reference_cg = false;
};

struct SsnmState {
    FeVector u;
    FeVector lambda;             ///< multipliers in the W-scaled (nodal function) convention
    std::vector<Index> active;
    InactiveSet inactive;
    int iteration = 0;
};

struct OuterRecord {
    int outer = 0;                            ///< 1-based
    Index inactive_size = 0;
    KrylovResult inner;
    std::optional<KrylovResult> reference;    ///< unpreconditioned CG on the same system
    double complementarity = 0.0;             ///< max |u_i lambda_i| after the update
};

struct SsnmReport {
    int level = 0;
    int outer_iterations = 0;
    bool converged = false;
    std::vector<OuterRecord> records;
    double inactive_fraction = 0.0;
    double stationarity_residual = 0.0;   ///< |(K*K + beta)u - K* y_d - lambda| / |K* y_d|
    double min_u = 0.0;
    double min_lambda = 0.0;
    double max_complementarity = 0.0;
};

/// Primal-dual active set iteration started from `initial_inactive` with
/// lambda = 0. Each step solves G u_I = (K* y_d)_I, sets
/// lambda_A = ((K*K + beta)u - K* y_d)_A, and takes the new active set
/// {lambda - beta u > 0}; it stops when the active set repeats. Throws
/// SolverError when max_outer is exhausted or an inner solve fails.
std::pair<SsnmState, SsnmReport> ssnm_solve(const ControlProblem& problem, const InactiveSet& initial_inactive,
                                            const SsnmOptions& options = {});

/// Solves problems on consecutive levels, warm-starting each level from the
/// grid-sequencing guess of the previous solution (all inactive on the first).
std::vector<std::pair<SsnmState, SsnmReport>> grid_sequenced_solve(const std::vector<ControlProblem>& problems,
                                                                   const SsnmOptions& options = {});

}  // namespace ssnmg
