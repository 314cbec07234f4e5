#include "doctest.h"
#include "oracles.hpp"

#include "ssnmg/operators.hpp"

#include <cmath>
#include <memory>

using namespace ssnmg;

namespace {

std::shared_ptr<const PoissonOperator> make_k(int dim, int n0, int levels) {
    return std::make_shared<const PoissonOperator>(std::make_shared<const MeshHierarchy>(dim, n0, levels));
}

std::vector<Index> as_vector(const InactiveSet& s) {
    return {s.indices().begin(), s.indices().end()};
}

double wdot(const Vector& w, const Vector& a, const Vector& b) {
    return (w.array() * a.array() * b.array()).sum();
}

DenseMatrix dense_of(const LinearMap& m) {
    DenseMatrix a(m.dimension, m.dimension);
    for (Index c = 0; c < m.dimension; ++c) a.col(c) = m(Vector::Unit(m.dimension, c));
    return a;
}

}  // namespace

TEST_CASE("embed and extract") {
    const InactiveSet s(0, {1, 3}, 5);
    const Vector full = embed(s, Vector::LinSpaced(2, 7, 8));
    CHECK(full == (Vector(5) << 0, 7, 0, 8, 0).finished());
    CHECK(extract(s, full) == Vector::LinSpaced(2, 7, 8));
    CHECK_THROWS_AS(embed(s, Vector::Zero(3)), std::invalid_argument);
    CHECK_THROWS_AS(extract(s, Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("G matches the principal minor of the dense Hessian") {
    const auto k = make_k(1, 4, 1);
    const DenseMatrix hess = oracle::hessian(1, 4, 1.0);
    {
        const GOperator g(k, InactiveSet::all(k->hierarchy().level(0)), 1.0);
        CHECK(g.apply(Vector::Zero(3)).isZero());
        for (int t = 0; t < 20; ++t) {
            const Vector u = oracle::random_vector(3);
            CHECK((g.apply(u) - hess * u).norm() <= 1e-10 * (hess * u).norm());
        }
        CHECK(g.applications() == 21);
    }
    {
        const GOperator g(k, InactiveSet(0, {1}, 3), 1.0);
        CHECK(g.apply(Vector::Ones(1))[0] == doctest::Approx(hess(1, 1)).epsilon(1e-12));
        CHECK_THROWS_AS(g.apply(Vector::Ones(2)), std::invalid_argument);
    }
    CHECK_THROWS_AS(GOperator(k, InactiveSet(0, {1}, 3), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GOperator(k, InactiveSet(0, {1}, 4), 1.0), std::invalid_argument);

    const auto k2 = make_k(2, 6, 1);
    const InactiveSet s2 = inactive_from_region(0, {{0.2, 0.1}, {0.8, 0.6}}, k2->hierarchy());
    const GOperator g2(k2, s2, 1e-3);
    const DenseMatrix minor = oracle::principal_minor(oracle::hessian(2, 6, 1e-3), as_vector(s2));
    const Vector u = oracle::random_vector(s2.size());
    CHECK((g2.apply(u) - minor * u).norm() <= 1e-10 * (minor * u).norm());
}

TEST_CASE("G is symmetric and coercive in the discrete inner product") {
    for (int dim : {1, 2}) {
        const auto k = make_k(dim, 8, 2);
        const InactiveSet s = inactive_from_region(1, {{0.1, 0.2}, {0.7, 0.9}}, k->hierarchy());
        for (double beta : {1.0, 1e-4}) {
            const GOperator g(k, s, beta);
            const Vector w = g.as_map().weights;
            for (int t = 0; t < 10; ++t) {
                const Vector u = oracle::random_vector(s.size()), v = oracle::random_vector(s.size());
                const double a = wdot(w, g.apply(u), v), b = wdot(w, u, g.apply(v));
                CHECK(std::abs(a - b) <= 1e-10 * std::sqrt(wdot(w, u, u) * wdot(w, v, v)));
                CHECK(wdot(w, g.apply(u), u) >= beta * wdot(w, u, u));
            }
        }
    }
}

TEST_CASE("projection onto the coarse inactive space") {
    for (int dim : {1, 2}) {
        const int n0 = dim == 1 ? 8 : 4;
        const auto k = make_k(dim, n0, 2);
        const MeshHierarchy& h = k->hierarchy();
        const InactiveSet fine = inactive_from_region(1, {{0.1, 0.1}, {0.9, 0.8}}, h);
        const InactiveSet coarse = coarsen_inactive(fine, h);
        REQUIRE(!coarse.empty());
        const InactiveProjection p(h, fine, coarse);
        const int nf = 2 * n0;

        CHECK(p.project(Vector::Zero(fine.size())).isZero());
        for (int t = 0; t < 10; ++t) {
            const Vector u = oracle::random_vector(fine.size());
            const Vector c = p.project(u);
            // idempotent on the coarse subspace
            CHECK((p.project(p.interpolate(c)) - c).norm() <= 1e-10 * c.norm());
            // residual orthogonal to every coarse inactive basis function
            const Vector residual = embed(fine, u - p.interpolate(c));
            const DenseMatrix jfull = oracle::interpolation(dim, n0);
            for (Index ci : coarse.indices()) {
                const Vector phi = jfull.col(ci);
                CHECK(std::abs(oracle::l2_inner(dim, nf, residual, phi)) <= 1e-11);
            }
            // contraction in L2
            const Vector uf = embed(fine, u);
            const Vector cc = embed(coarse, c);
            CHECK(oracle::l2_inner(dim, n0, cc, cc) <= oracle::l2_inner(dim, nf, uf, uf) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("projection onto a single coarse hat") {
    const auto k = make_k(1, 4, 2);
    const MeshHierarchy& h = k->hierarchy();
    const InactiveSet fine(1, {1, 2, 3, 4, 5}, 7);
    const InactiveSet coarse = coarsen_inactive(fine, h);
    REQUIRE(as_vector(coarse) == std::vector<Index>{1});
    const InactiveProjection p(h, fine, coarse);
    const Vector u = oracle::random_vector(5);
    const Vector phi_fine = oracle::interpolation(1, 4).col(1);
    const Vector phi_coarse = Vector::Unit(3, 1);
    const double expected =
        oracle::l2_inner(1, 8, embed(fine, u), phi_fine) / oracle::l2_inner(1, 4, phi_coarse, phi_coarse);
    CHECK(p.project(u)[0] == doctest::Approx(expected).epsilon(1e-11));
    CHECK_THROWS_AS(InactiveProjection(h, fine, fine), std::invalid_argument);
}

TEST_CASE("empty coarse set gives the scaled identity") {
    const auto k = make_k(1, 4, 2);
    const double beta = 0.37;
    const InactiveSet fine(1, {0, 2, 4, 6}, 7);
    const TwoGridPreconditioner tg(k, fine, beta);
    REQUIRE(tg.coarse_empty());
    for (int t = 0; t < 10; ++t) {
        const Vector r = oracle::random_vector(fine.size());
        const Vector s = tg.apply_S(r);
        const Vector m = tg.apply_M(r);
        for (Index i = 0; i < r.size(); ++i) {
            CHECK(s[i] == r[i] / beta);
            CHECK(m[i] == beta * r[i]);
        }
    }
}

TEST_CASE("S and M are inverse to each other") {
    const auto k = make_k(1, 16, 2);
    const InactiveSet fine = inactive_from_region(1, {{0.125, 0}, {0.75, 1}}, k->hierarchy());
    const TwoGridPreconditioner tg(k, fine, 1.0);
    REQUIRE_FALSE(tg.coarse_empty());
    CHECK(tg.apply_S(Vector::Zero(fine.size())).isZero());
    CHECK(tg.apply_M(Vector::Zero(fine.size())).isZero());
    for (int t = 0; t < 20; ++t) {
        const Vector r = oracle::random_vector(fine.size());
        CHECK((tg.apply_S(tg.apply_M(r)) - r).norm() <= 1e-8 * r.norm());
        CHECK((tg.apply_M(tg.apply_S(r)) - r).norm() <= 1e-8 * r.norm());
    }

    const auto k2 = make_k(2, 8, 2);
    const InactiveSet fine2 = inactive_from_region(1, {{0.2, 0.1}, {0.9, 0.7}}, k2->hierarchy());
    const TwoGridPreconditioner tg2(k2, fine2, 1e-3);
    for (int t = 0; t < 5; ++t) {
        const Vector r = oracle::random_vector(fine2.size());
        CHECK((tg2.apply_S(tg2.apply_M(r)) - r).norm() <= 1e-8 * r.norm());
    }
}

TEST_CASE("assembled M equals the matrix formula") {
    const auto k = make_k(1, 8, 2);
    const InactiveSet fine = inactive_from_region(1, {{0.125, 0}, {0.75, 1}}, k->hierarchy());
    const TwoGridPreconditioner tg(k, fine, 1.0, {CoarseSolveOptions::Mode::exact});
    const DenseMatrix m = dense_of(tg.M_map());
    const DenseMatrix expected = oracle::two_grid_m(1, 16, 1.0, as_vector(fine), as_vector(tg.coarse_set()));
    CHECK((m - expected).cwiseAbs().maxCoeff() <= 1e-12 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("all-inactive M is the unconstrained two-grid operator") {
    for (int dim : {1, 2}) {
        const int n0 = 4;
        const auto k = make_k(dim, n0, 2);
        const InactiveSet fine = InactiveSet::all(k->hierarchy().level(1));
        const double beta = 1e-2;
        const TwoGridPreconditioner tg(k, fine, beta, {CoarseSolveOptions::Mode::exact});
        REQUIRE(tg.coarse_set().size() == k->hierarchy().level(0).num_interior());
        // unrestricted: J G_c (L_c^{-1} J^T L_f) + beta (I - J L_c^{-1} J^T L_f)
        const DenseMatrix j = oracle::interpolation(dim, n0);
        const DenseMatrix lf = oracle::mass(dim, 2 * n0), lc = oracle::mass(dim, n0);
        const DenseMatrix pi = lc.ldlt().solve(j.transpose() * lf);
        const DenseMatrix expected = j * oracle::hessian(dim, n0, beta) * pi +
                                     beta * (DenseMatrix::Identity(j.rows(), j.rows()) - j * pi);
        CHECK((dense_of(tg.M_map()) - expected).cwiseAbs().maxCoeff() <= 1e-12 * expected.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("exact and iterative coarse solves agree") {
    const auto k = make_k(1, 16, 2);
    const InactiveSet fine = inactive_from_region(1, {{0.125, 0}, {0.75, 1}}, k->hierarchy());
    const TwoGridPreconditioner a(k, fine, 1.0, {CoarseSolveOptions::Mode::exact});
    const TwoGridPreconditioner b(k, fine, 1.0, {CoarseSolveOptions::Mode::iterative, 1e-12, 1000});
    const Vector r = oracle::random_vector(fine.size());
    CHECK((a.apply_S(r) - b.apply_S(r)).norm() <= 1e-9 * a.apply_S(r).norm());
}

TEST_CASE("multigrid with base level j-1 equals the two-grid S") {
    const auto k = make_k(1, 16, 3);
    const InactiveSet fine = inactive_from_region(2, {{0.125, 0}, {0.75, 1}}, k->hierarchy());
    const TwoGridPreconditioner s(k, fine, 1.0);
    for (MultigridVariant v : {MultigridVariant::newton, MultigridVariant::naive}) {
        const MultigridPreconditioner z(k, fine, 1.0, 1, v);
        CHECK(z.apply(Vector::Zero(fine.size())).isZero());
        for (int t = 0; t < 20; ++t) {
            const Vector r = oracle::random_vector(fine.size());
            const Vector sr = s.apply_S(r);
            CHECK((z.apply(r) - sr).norm() <= 1e-8 * sr.norm());
        }
    }
    CHECK_THROWS_AS(MultigridPreconditioner(k, fine, 1.0, 2, MultigridVariant::newton), std::invalid_argument);
    CHECK_THROWS_AS(MultigridPreconditioner(k, fine, 1.0, -1, MultigridVariant::newton), std::invalid_argument);
}

TEST_CASE("multigrid cost counters") {
    const auto k = make_k(1, 4, 4);
    const InactiveSet fine = InactiveSet::all(k->hierarchy().level(3));
    const CoarseSolveOptions exact{CoarseSolveOptions::Mode::exact};

    const MultigridPreconditioner newton(k, fine, 1.0, 0, MultigridVariant::newton, exact);
    CHECK(newton.inactive(0).size() == 3);
    CHECK_THROWS(newton.inactive(4));
    newton.apply(oracle::random_vector(fine.size()));
    // level 2 sub-preconditioner applied twice, level 1 four times, base four times
    CHECK(newton.g_applications(2) == 1);
    CHECK(newton.g_applications(1) == 2);
    CHECK(newton.base_solves() == 4);

    const MultigridPreconditioner naive(k, fine, 1.0, 0, MultigridVariant::naive, exact);
    naive.apply(oracle::random_vector(fine.size()));
    CHECK(naive.g_applications(2) == 0);
    CHECK(naive.g_applications(1) == 0);
    CHECK(naive.base_solves() == 1);
}
