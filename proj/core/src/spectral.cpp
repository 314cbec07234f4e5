#include "ssnmg/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ssnmg {

DenseMatrix assemble_dense(const LinearMap& op, Index max_dimension) {
    if (op.dimension > max_dimension)
        throw std::invalid_argument("assemble_dense: dimension " + std::to_string(op.dimension) + " exceeds the cap " +
                                    std::to_string(max_dimension));
    const Index n = op.dimension;
    DenseMatrix a(n, n);
    Vector e = Vector::Zero(n);
    for (Index c = 0; c < n; ++c) {
        e[c] = 1.0;
        a.col(c) = op(e);
        e[c] = 0.0;
    }
    return a;
}

namespace {

SpectralReport spectrum_of(const DenseMatrix& product, const DenseMatrix& preconditioner, const Vector* weights) {
    SpectralReport rep;
    const Index n = product.rows();
    const double pnorm = preconditioner.norm();
    rep.asymmetry = pnorm > 0.0 ? (preconditioner - preconditioner.transpose()).norm() / pnorm : 0.0;
    if (n == 0) return rep;

    Eigen::EigenSolver<DenseMatrix> es(product, true);
    if (es.info() != Eigen::Success) throw SolverError("generalized_spectrum: eigensolver failed");

    const Eigen::VectorXcd& values = es.eigenvalues();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index(0));
    std::vector<double> logs(static_cast<std::size_t>(n));
    std::vector<std::complex<double>> cleaned(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        std::complex<double> z = values[i];
        if (std::abs(z.imag()) < 1e-10 * std::abs(z)) z = {z.real(), 0.0};
        if (z.imag() == 0.0 && z.real() <= 0.0)
            throw std::domain_error("generalized_spectrum: eigenvalue " + std::to_string(z.real()) +
                                    " lies on the branch cut of the logarithm");
        cleaned[i] = z;
        logs[i] = std::abs(std::log(z));
    }
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return logs[a] > logs[b]; });

    rep.eigenvalues.reserve(static_cast<std::size_t>(n));
    for (Index i : order) rep.eigenvalues.push_back(cleaned[i]);
    rep.d = logs[order.front()];

    for (const auto& z : cleaned) rep.sorted_distances.push_back(std::abs(z - 1.0));
    std::sort(rep.sorted_distances.begin(), rep.sorted_distances.end(), std::greater<>());

    Vector v = es.eigenvectors().col(order.front()).real();
    const double norm = weights ? std::sqrt((weights->array() * v.array().square()).sum()) : v.norm();
    if (norm > 0.0) v /= norm;
    rep.extremal_vector = v;

    const double a = rep.sorted_distances.front();
    rep.bound_estimate = a < 1.0 ? (a > 0.0 ? std::abs(std::log1p(-a)) : 0.0) : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

}  // namespace

SpectralReport generalized_spectrum(const DenseMatrix& g, const DenseMatrix& m, const Vector* weights) {
    if (g.rows() != g.cols() || m.rows() != m.cols() || g.rows() != m.rows())
        throw std::invalid_argument("generalized_spectrum: matrices must be square and of equal size");
    if (g.rows() == 0) return spectrum_of(g, m, weights);
    const Eigen::PartialPivLU<DenseMatrix> lu(m);
    return spectrum_of(lu.solve(g), m, weights);
}

SpectralReport inverse_spectrum(const DenseMatrix& g, const DenseMatrix& z, const Vector* weights) {
    if (g.rows() != g.cols() || z.rows() != z.cols() || g.rows() != z.rows())
        throw std::invalid_argument("inverse_spectrum: matrices must be square and of equal size");
    return spectrum_of(z * g, z, weights);
}

double spectral_norm(const DenseMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::BDCSVD<DenseMatrix> svd(a);
    return svd.singularValues()(0);
}

DenseTwoGrid assemble_two_grid(std::shared_ptr<const PoissonOperator> k, const InactiveSet& fine, double beta,
                               Index max_dimension) {
    const GOperator g(k, fine, beta);
    const TwoGridPreconditioner tg(k, fine, beta, {CoarseSolveOptions::Mode::iterative, 1e-12, 5000});
    DenseTwoGrid out;
    out.level = fine.level();
    out.g = assemble_dense(g.as_map(), max_dimension);
    out.m = assemble_dense(tg.M_map(), max_dimension);
    out.coarse_dimension = tg.coarse_set().size();
    out.weights = extract(fine, k->lumped_mass(fine.level()));
    return out;
}

std::vector<SpectralRow> spectral_distance_table(std::shared_ptr<const PoissonOperator> k, const Region& region,
                                                 double beta, const std::vector<int>& levels, Index max_dimension) {
    const MeshHierarchy& h = k->hierarchy();
    std::vector<SpectralRow> rows;
    for (int j : levels) {
        if (j < 1) throw std::invalid_argument("spectral_distance_table: levels must be >= 1");
        const InactiveSet fine = inactive_from_region(j, region, h);
        const DenseTwoGrid dense = assemble_two_grid(k, fine, beta, max_dimension);
        const SpectralReport rep = generalized_spectrum(dense.g, dense.m, &dense.weights);

        SpectralRow row;
        row.level = j;
        row.n_fine = h.level(j).subdivisions();
        row.n_coarse = h.level(j - 1).subdivisions();
        row.inactive_fine = fine.size();
        row.inactive_coarse = dense.coarse_dimension;
        row.d = rep.d;
        if (!rows.empty() && row.d > 0.0) row.ratio = rows.back().d / row.d;
        row.norm_gap = spectral_norm(dense.g - dense.m);
        row.boundary_measure = geometry(fine, coarsen_inactive(fine, h), h).numerical_boundary_measure;
        row.asymmetry = rep.asymmetry;
        rows.push_back(row);
    }
    return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

void write_matrix(std::ostream& os, const DenseMatrix& a) {
    const auto old = os.precision(17);
    for (Index r = 0; r < a.rows(); ++r) {
        for (Index c = 0; c < a.cols(); ++c) os << (c ? " " : "") << a(r, c);
        os << '\n';
    }
    os.precision(old);
}

}  // namespace ssnmg
