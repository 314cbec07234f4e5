#include "doctest.h"
#include "oracles.hpp"

#include "ssnmg/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>
#include <sstream>

using namespace ssnmg;

namespace {

std::shared_ptr<const PoissonOperator> make_k(int dim, int n0, int levels) {
    return std::make_shared<const PoissonOperator>(std::make_shared<const MeshHierarchy>(dim, n0, levels));
}

const Region kRegion{{0.125, 0.0}, {0.75, 1.0}};

std::vector<Index> as_vector(const InactiveSet& s) {
    return {s.indices().begin(), s.indices().end()};
}

}  // namespace

TEST_CASE("dense assembly of the identity") {
    const DenseMatrix a = assemble_dense(LinearMap::identity(3));
    CHECK(a == DenseMatrix::Identity(3, 3));
    CHECK_THROWS_AS(assemble_dense(LinearMap::identity(10), 5), std::invalid_argument);
}

TEST_CASE("dense G on a small all-inactive grid") {
    const auto k = make_k(1, 4, 1);
    const GOperator g(k, InactiveSet::all(k->hierarchy().level(0)), 1.0);
    const DenseMatrix a = assemble_dense(g.as_map());
    CHECK((a - a.transpose()).norm() <= 1e-12 * a.norm());
    // uniform weights, so the Euclidean spectrum is the weighted one
    const Vector ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(a).eigenvalues();
    CHECK(ev.minCoeff() >= 1.0 - 1e-12);
    CHECK((a - oracle::hessian(1, 4, 1.0)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("G = M gives d = 0") {
    const DenseMatrix g = oracle::hessian(1, 8, 0.5);
    const SpectralReport r = generalized_spectrum(g, g);
    CHECK(r.d <= 1e-12);
    for (const auto& z : r.eigenvalues) CHECK(std::abs(z - 1.0) <= 1e-12);
    CHECK(r.asymmetry <= 1e-14);
}

TEST_CASE("dense two-grid M matches the matrix formula") {
    const auto k = make_k(1, 4, 2);
    const InactiveSet fine = inactive_from_region(1, kRegion, k->hierarchy());
    const DenseTwoGrid tg = assemble_two_grid(k, fine, 1.0);
    const TwoGridPreconditioner p(k, fine, 1.0);
    const DenseMatrix expected = oracle::two_grid_m(1, 8, 1.0, as_vector(fine), as_vector(p.coarse_set()));
    CHECK((tg.m - expected).cwiseAbs().maxCoeff() <= 1e-10 * expected.cwiseAbs().maxCoeff());
    CHECK(tg.coarse_dimension == p.coarse_set().size());
}

TEST_CASE("spectral distance against coarse grid 32") {
    // coarse n = 32, fine n = 64
    const auto rows = spectral_distance_table(make_k(1, 16, 3), kRegion, 1.0, {2});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_coarse == 32);
    CHECK(std::abs(rows[0].d - 0.0016) <= 0.05 * 0.0016);
    CHECK_FALSE(rows[0].ratio.has_value());
    CHECK(rows[0].asymmetry < 0.1);
}

TEST_CASE("ratios are filled in from the second row") {
    const auto rows = spectral_distance_table(make_k(1, 8, 3), kRegion, 1.0, {1, 2});
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[1].ratio.has_value());
    CHECK(*rows[1].ratio == doctest::Approx(rows[0].d / rows[1].d));
    CHECK_THROWS_AS(spectral_distance_table(make_k(1, 8, 2), kRegion, 1.0, {0}), std::invalid_argument);
}

TEST_CASE("spectrum is invariant under diagonal similarity") {
    const auto k = make_k(1, 8, 2);
    const DenseTwoGrid tg = assemble_two_grid(k, inactive_from_region(1, kRegion, k->hierarchy()), 1.0);
    const Index n = tg.g.rows();
    Vector s(n);
    for (Index i = 0; i < n; ++i) s[i] = oracle::uniform(0.5, 2.0);
    const DenseMatrix d = s.asDiagonal(), di = s.cwiseInverse().asDiagonal();
    const SpectralReport a = generalized_spectrum(tg.g, tg.m);
    const SpectralReport b = generalized_spectrum(d * tg.g * di, d * tg.m * di);
    // balanced with the weights
    const Vector w = tg.weights.cwiseSqrt();
    const SpectralReport c =
        generalized_spectrum(w.asDiagonal() * tg.g * w.cwiseInverse().asDiagonal(),
                             w.asDiagonal() * tg.m * w.cwiseInverse().asDiagonal(), &tg.weights);
    CHECK(std::abs(a.d - b.d) <= 1e-8);
    CHECK(std::abs(a.d - c.d) <= 1e-8);
    REQUIRE(a.sorted_distances.size() == b.sorted_distances.size());
    for (std::size_t i = 0; i < a.sorted_distances.size(); ++i)
        CHECK(std::abs(a.sorted_distances[i] - b.sorted_distances[i]) <= 1e-8);
}

TEST_CASE("eigenvalue on the branch cut throws") {
    const DenseMatrix g = DenseMatrix::Identity(2, 2);
    DenseMatrix m = DenseMatrix::Identity(2, 2);
    m(1, 1) = -1.0;
    CHECK_THROWS_AS(generalized_spectrum(g, m), std::domain_error);
    CHECK_THROWS_AS(inverse_spectrum(g, DenseMatrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("report fields") {
    const auto k = make_k(1, 16, 2);
    const DenseTwoGrid tg = assemble_two_grid(k, inactive_from_region(1, kRegion, k->hierarchy()), 1.0);
    const SpectralReport r = generalized_spectrum(tg.g, tg.m, &tg.weights);
    REQUIRE(r.eigenvalues.size() == 21);
    CHECK(r.d == doctest::Approx(std::abs(std::log(r.eigenvalues.front()))));
    for (std::size_t i = 1; i < r.eigenvalues.size(); ++i)
        CHECK(std::abs(std::log(r.eigenvalues[i])) <= std::abs(std::log(r.eigenvalues[i - 1])) + 1e-15);
    for (std::size_t i = 1; i < r.sorted_distances.size(); ++i) CHECK(r.sorted_distances[i] <= r.sorted_distances[i - 1]);
    CHECK((tg.weights.array() * r.extremal_vector.array().square()).sum() == doctest::Approx(1.0));
    // eigenvector of M^{-1} G
    const Vector v = r.extremal_vector;
    const double lam = r.eigenvalues.front().real();
    CHECK((tg.g * v - lam * (tg.m * v)).norm() <= 1e-8 * (tg.g * v).norm());
    CHECK(r.asymmetry > 0.0);
    CHECK(r.asymmetry < 0.1);

    // soft: the distances decay quickly over the leading entries (eigenvalues
    // come in near pairs, so the rate is averaged over the top 10)
    const double factor = std::pow(r.sorted_distances[0] / r.sorted_distances[9], 1.0 / 9.0);
    INFO("mean factor " << factor);
    const bool geometric = factor >= 1.5;
    WARN(geometric);
}

TEST_CASE("one Newton step roughly squares the distance") {
    const auto k = make_k(1, 16, 2);
    const InactiveSet fine = inactive_from_region(1, kRegion, k->hierarchy());
    const DenseTwoGrid tg = assemble_two_grid(k, fine, 1.0);
    const TwoGridPreconditioner p(k, fine, 1.0, {CoarseSolveOptions::Mode::exact});
    const DenseMatrix s = assemble_dense(p.S_map());
    const DenseMatrix z = 2.0 * s - s * tg.g * s;
    const double ds = inverse_spectrum(tg.g, s).d;
    const double dz = inverse_spectrum(tg.g, z).d;
    INFO("d(S) " << ds << " d(N(S)) " << dz);
    CHECK(ds > 0.0);
    CHECK(dz <= 10.0 * ds * ds);
    // S is the inverse of M
    CHECK(std::abs(generalized_spectrum(tg.g, tg.m).d - ds) <= 1e-8);
}

TEST_CASE("three-level Newton multigrid stays close to two-grid") {
    const auto k = make_k(1, 16, 3);
    const InactiveSet fine = inactive_from_region(2, kRegion, k->hierarchy());
    const DenseTwoGrid tg = assemble_two_grid(k, fine, 1.0);
    const double d2 = generalized_spectrum(tg.g, tg.m).d;
    const MultigridPreconditioner z(k, fine, 1.0, 0, MultigridVariant::newton, {CoarseSolveOptions::Mode::exact});
    const double dn = inverse_spectrum(tg.g, assemble_dense(z.as_map())).d;
    INFO("two-grid " << d2 << " newton " << dn);
    CHECK(dn <= 2.0 * d2);
    CHECK(dn >= 0.5 * d2);
}

TEST_CASE("spectral norm and log-log slope") {
    DenseMatrix a = DenseMatrix::Zero(2, 2);
    a(0, 1) = 3.0;
    a(1, 0) = -1.0;
    CHECK(spectral_norm(a) == doctest::Approx(3.0));
    const std::vector<double> x{0.1, 0.01, 0.001};
    std::vector<double> y;
    for (double v : x) y.push_back(5.0 * std::sqrt(v));
    CHECK(loglog_slope(x, y) == doctest::Approx(0.5));
}

TEST_CASE("matrix dump") {
    const DenseMatrix a{{1.0, 2.5}, {-3.0, 0.0}};
    std::ostringstream os;
    write_matrix(os, a);
    std::istringstream is(os.str());
    std::string line;
    int lines = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        double v;
        int cols = 0;
        while (ls >> v) CHECK(v == a(lines, cols++));
        CHECK(cols == 2);
        ++lines;
    }
    CHECK(lines == 2);
}
