#pragma once

#include "ssnmg/operators.hpp"

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

namespace ssnmg {

/// Column k is op(e_k). Throws std::invalid_argument above `max_dimension`.
DenseMatrix assemble_dense(const LinearMap& op, Index max_dimension = 4096);

struct SpectralReport {
    int level = 0;
    std::vector<std::complex<double>> eigenvalues;  ///< sorted by |ln lambda|, largest first
    double d = 0.0;                                 ///< max |ln lambda|
    std::vector<double> sorted_distances;           ///< |lambda - 1|, descending
    Vector extremal_vector;                         ///< real part of the arg-max eigenvector
    double asymmetry = 0.0;                         ///< |M - M^T|_F / |M|_F of the preconditioner matrix
    /// |ln(1 - a)| / a * a with a = max |lambda - 1|; NaN when a >= 1.
    double bound_estimate = 0.0;
};

/// Eigenvalues of M^{-1} G. Imaginary parts below 1e-10 |lambda| are
/// dropped. Throws std::domain_error if an eigenvalue lies on (-inf, 0].
/// If `weights` is given the extremal vector is normalized in the weighted norm.
SpectralReport generalized_spectrum(const DenseMatrix& g, const DenseMatrix& m, const Vector* weights = nullptr);

/// Same report for a preconditioner given as an approximate inverse Z:
/// eigenvalues of Z G.
SpectralReport inverse_spectrum(const DenseMatrix& g, const DenseMatrix& z, const Vector* weights = nullptr);

/// Spectral norm |A|_2.
double spectral_norm(const DenseMatrix& a);

/// Dense G and two-grid M (and S) for a fine inactive set; coarse solves are exact.
struct DenseTwoGrid {
    int level = 0;
    DenseMatrix g;
    DenseMatrix m;
    Index coarse_dimension = 0;
    Vector weights;
};
DenseTwoGrid assemble_two_grid(std::shared_ptr<const PoissonOperator> k, const InactiveSet& fine, double beta,
                               Index max_dimension = 4096);

struct SpectralRow {
    int level = 0;
    int n_fine = 0;
    int n_coarse = 0;
    Index inactive_fine = 0;
    Index inactive_coarse = 0;
    double d = 0.0;
    std::optional<double> ratio;   ///< d of the previous row divided by this d
    double norm_gap = 0.0;         ///< |G - M|_2
    double boundary_measure = 0.0; ///< mu_j^in
    double asymmetry = 0.0;
};

/// Two-grid spectral distance for the inactive set {P_i in region} on each
/// fine level in `levels` (each >= 1), in the given order.
std::vector<SpectralRow> spectral_distance_table(std::shared_ptr<const PoissonOperator> k, const Region& region,
                                                 double beta, const std::vector<int>& levels,
                                                 Index max_dimension = 4096);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Whitespace-delimited dump, one matrix row per line.
void write_matrix(std::ostream& os, const DenseMatrix& a);

}  // namespace ssnmg
