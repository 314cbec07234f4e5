#pragma once

#include "ssnmg/spectral.hpp"
#include "ssnmg/ssnm.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ssnmg {

enum class ExperimentKind { invitro1d, invivo2d, spectrum, normgap, compare_mg };

std::string to_string(ExperimentKind kind);
/// Accepts the CLI spellings (`compare-mg` and `compare_mg` both work).
ExperimentKind parse_experiment(std::string_view name);
std::string to_string(InnerSolver solver);
InnerSolver parse_solver(std::string_view name);
std::string to_string(MultigridVariant variant);
MultigridVariant parse_variant(std::string_view name);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::invitro1d;
    int dim = 1;
    int n0 = 16;
    int levels = 7;        ///< hierarchy levels, n0 .. n0 * 2^(levels-1)
    int first_level = 1;   ///< first fine level that is analysed or solved
    double beta = 1.0;
    Region region{{0.125, 0.0}, {0.75, 1.0}};

    std::array<double, 2> x0{0.54, 0.62};
    double radius = 0.06;
    double alpha = -0.1;
    double noise = 0.05;
    std::uint64_t seed = 1;

    double inner_tolerance = 1e-8;
    double coarse_tolerance = 1e-10;
    double poisson_tolerance = 1e-10;
    int max_outer = 50;
    InnerSolver solver = InnerSolver::cgs_two_grid;
    int base_level = 0;
    MultigridVariant variant = MultigridVariant::newton;
    bool reference_cg = true;

    bool allow_large = false;   ///< permit 2D grids finer than n = 512
    Index dense_cap = 4096;
    std::string output_dir = "results";
};

/// Default parameters for each experiment.
ExperimentConfig default_config(ExperimentKind kind);
/// Throws std::invalid_argument naming the first offending field.
void validate(const ExperimentConfig& config);
/// Ordered key/value echo of every field except output_dir.
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& config);
/// FNV-1a 64 of describe(), as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::shared_ptr<const PoissonOperator> make_smoothing_operator(const ExperimentConfig& config);

struct TargetData {
    FeVector u_d;
    FeVector y_tilde;  ///< K u_d
    FeVector y_d;      ///< y_tilde plus bounded noise
};

/// u_d = r^{-4}(r^2 - |x - x0|^2) + alpha inside the ball, alpha outside;
/// y_d = K u_d + noise * |K u_d|_inf * U[-1, 1] per node. The noise stream
/// depends only on (seed, level).
TargetData build_target_data(const PoissonOperator& k, int level, std::array<double, 2> x0, double radius,
                             double alpha, double noise, std::uint64_t seed);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    bool soft = false;   ///< reported but never gates --check
};

struct TableArtifact {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> header;  ///< config echo
    std::string config_hash;
};

struct ExperimentOutput {
    std::vector<TableArtifact> tables;
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

// Raw results ---------------------------------------------------------------

std::vector<SpectralRow> invitro_rows(const ExperimentConfig& config);

struct InvivoLevel {
    int level = 0;
    int n = 0;
    SsnmReport report;
};
std::vector<InvivoLevel> solve_invivo(const ExperimentConfig& config);

struct VariantRow {
    int level = 0;
    int n_fine = 0;
    double d_two_grid = 0.0;
    double d_newton = 0.0;
    double d_naive = 0.0;
    double z_minus_s = 0.0;   ///< max relative |Z r - S r| with base level j-1, over random r
};
std::vector<VariantRow> compare_variants(const ExperimentConfig& config, int random_probes = 20);

// Reference values --------------------------------------------------------

namespace reference {
inline constexpr std::array<double, 6> spectral_distance{0.0023, 0.0016, 0.0011, 7.4617e-4, 5.1996e-4, 3.6372e-4};
inline constexpr std::array<double, 5> spectral_ratio{1.4610, 1.4506, 1.4421, 1.4351, 1.4295};
inline constexpr std::array<int, 4> outer_iterations{5, 3, 4, 4};
/// CGS counts per column (n = 64, 128, 256, 512), one entry per outer iteration.
std::vector<std::vector<int>> cgs_counts();
inline constexpr int cg_low = 12;
inline constexpr int cg_high = 13;
}  // namespace reference

// Checks (also used by --check) ----------------------------------------------

std::vector<CheckResult> check_invitro(const std::vector<SpectralRow>& rows);
std::vector<CheckResult> check_normgap(const std::vector<SpectralRow>& rows);
std::vector<CheckResult> check_invivo(const ExperimentConfig& config, const std::vector<InvivoLevel>& levels);
std::vector<CheckResult> check_variants(const std::vector<VariantRow>& rows);

// Runners -------------------------------------------------------------------

ExperimentOutput run_invitro_1d(const ExperimentConfig& config);
ExperimentOutput run_normgap(const ExperimentConfig& config);
ExperimentOutput run_invivo_2d(const ExperimentConfig& config);
ExperimentOutput run_naive_vs_newton(const ExperimentConfig& config);
ExperimentOutput run_spectrum(const ExperimentConfig& config);
ExperimentOutput run_experiment(const ExperimentConfig& config);

// Output --------------------------------------------------------------------

std::string format_number(double value);
void write_csv(std::ostream& os, const TableArtifact& table);
/// Writes <dir>/<table.name>.csv, creating dir; returns the path.
std::filesystem::path write_csv(const std::filesystem::path& dir, const TableArtifact& table);

}  // namespace ssnmg
