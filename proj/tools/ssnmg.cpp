#include "ssnmg/experiments.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

using namespace ssnmg;

namespace {

struct Command {
    ExperimentConfig config;
    std::vector<double> region;
    std::vector<double> x0;
    std::string solver;
    std::string variant;
};

void add_options(CLI::App& sub, Command& cmd) {
    ExperimentConfig& c = cmd.config;
    cmd.region = {c.region.lower[0], c.region.lower[1], c.region.upper[0], c.region.upper[1]};
    cmd.x0 = {c.x0[0], c.x0[1]};
    cmd.solver = to_string(c.solver);
    cmd.variant = to_string(c.variant);

    sub.add_option("--dim", c.dim, "spatial dimension (1 or 2)")->capture_default_str();
    sub.add_option("--n0", c.n0, "subdivisions of the coarsest grid")->capture_default_str();
    sub.add_option("--levels", c.levels, "number of grids, n0 .. n0*2^(levels-1)")->capture_default_str();
    sub.add_option("--first-level", c.first_level, "first fine level analysed or solved")->capture_default_str();
    sub.add_option("--beta", c.beta, "regularization parameter")->capture_default_str();
    sub.add_option("--region", cmd.region, "inactive box: xlo ylo xhi yhi")->expected(4)->capture_default_str();
    sub.add_option("--x0", cmd.x0, "centre of the target bump")->expected(2)->capture_default_str();
    sub.add_option("--radius", c.radius, "radius of the target bump")->capture_default_str();
    sub.add_option("--alpha", c.alpha, "offset of the target control")->capture_default_str();
    sub.add_option("--noise", c.noise, "relative max-norm bound of the data noise")->capture_default_str();
    sub.add_option("--seed", c.seed, "noise seed")->capture_default_str();
    sub.add_option("--inner-tolerance", c.inner_tolerance, "relative residual for the inner solves")
        ->capture_default_str();
    sub.add_option("--coarse-tolerance", c.coarse_tolerance, "tolerance of the coarse G solves")->capture_default_str();
    sub.add_option("--poisson-tolerance", c.poisson_tolerance, "tolerance of the Poisson solves")
        ->capture_default_str();
    sub.add_option("--max-outer", c.max_outer, "maximum semismooth Newton iterations")->capture_default_str();
    sub.add_option("--solver", cmd.solver, "inner solver: cg, two-grid, multigrid")->capture_default_str();
    sub.add_option("--base-level", c.base_level, "base level of the multigrid preconditioner")->capture_default_str();
    sub.add_option("--variant", cmd.variant, "multigrid variant: newton, naive")->capture_default_str();
    sub.add_option("--reference-cg", c.reference_cg, "also run unpreconditioned CG")->capture_default_str();
    sub.add_flag("--allow-large", c.allow_large, "permit 2D grids finer than n=512");
    sub.add_option("--dense-cap", c.dense_cap, "largest dense matrix dimension")->capture_default_str();
    sub.add_option("--output-dir,-o", c.output_dir, "directory for CSV output")
        ->envname("SSNMG_OUTPUT_DIR")
        ->capture_default_str();
}

void finish(Command& cmd) {
    ExperimentConfig& c = cmd.config;
    c.region = Region{{cmd.region[0], cmd.region[1]}, {cmd.region[2], cmd.region[3]}};
    c.x0 = {cmd.x0[0], cmd.x0[1]};
    c.solver = parse_solver(cmd.solver);
    c.variant = parse_variant(cmd.variant);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semismooth Newton solver with multigrid preconditioners for control-constrained problems"};
    app.set_config("--config", "", "TOML file; sections are named after the subcommands");
    app.require_subcommand(1);
    bool check = false;
    bool quiet = false;
    app.add_flag("--check", check, "exit nonzero unless every gating check passes");
    app.add_flag("--quiet,-q", quiet, "do not print tables");

    std::map<CLI::App*, Command> commands;
    for (ExperimentKind kind : {ExperimentKind::invitro1d, ExperimentKind::invivo2d, ExperimentKind::spectrum,
                                ExperimentKind::normgap, ExperimentKind::compare_mg}) {
        const char* help = "";
        switch (kind) {
            case ExperimentKind::invitro1d: help = "1D two-grid spectral distance table"; break;
            case ExperimentKind::invivo2d: help = "2D grid-sequenced solve with iteration counts"; break;
            case ExperimentKind::spectrum: help = "all eigenvalues of one two-grid pair"; break;
            case ExperimentKind::normgap: help = "|G - M|_2 against h"; break;
            case ExperimentKind::compare_mg: help = "naive and Newton multigrid against two-grid"; break;
        }
        std::string name = to_string(kind);
        if (kind == ExperimentKind::compare_mg) name = "compare-mg";
        CLI::App* sub = app.add_subcommand(name, help);
        sub->configurable();
        Command& cmd = commands[sub];
        cmd.config = default_config(kind);
        add_options(*sub, cmd);
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* chosen = app.get_subcommands().front();
    Command& cmd = commands.at(chosen);
    try {
        finish(cmd);
        const ExperimentConfig& c = cmd.config;
        validate(c);
        const ExperimentOutput out = run_experiment(c);
        for (const auto& t : out.tables) {
            const auto path = write_csv(c.output_dir, t);
            std::printf("wrote %s\n", path.string().c_str());
            if (!quiet && t.rows.size() <= 40) {
                for (std::size_t i = 0; i < t.columns.size(); ++i) std::printf("%s%s", i ? "\t" : "", t.columns[i].c_str());
                std::printf("\n");
                for (const auto& row : t.rows) {
                    for (std::size_t i = 0; i < row.size(); ++i) std::printf("%s%s", i ? "\t" : "", row[i].c_str());
                    std::printf("\n");
                }
            }
        }
        std::printf("config hash %s\n", config_hash(c).c_str());
        bool ok = true;
        for (const auto& chk : out.checks) {
            std::printf("%s%s: %s  %s\n", chk.passed ? "PASS" : "FAIL", chk.soft ? " (soft)" : "", chk.name.c_str(),
                        chk.detail.c_str());
            if (!chk.soft && !chk.passed) ok = false;
        }
        return check && !ok ? 1 : 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return 3;
    }
}
