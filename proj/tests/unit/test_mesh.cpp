#include "doctest.h"
#include "oracles.hpp"

#include "ssnmg/mesh.hpp"

#include <cmath>
#include <stdexcept>

using namespace ssnmg;

namespace {

FeVector random_fe(const MeshHierarchy& h, int level) {
    return {level, oracle::random_vector(h.level(level).num_interior())};
}

}  // namespace

TEST_CASE("hierarchy sizes") {
    const MeshHierarchy h1(1, 16, 6);
    REQUIRE(h1.num_levels() == 6);
    const int expected[] = {16, 32, 64, 128, 256, 512};
    for (int j = 0; j < 6; ++j) {
        CHECK(h1.level(j).subdivisions() == expected[j]);
        CHECK(h1.level(j).num_interior() == expected[j] - 1);
        CHECK(h1.level(j).num_elements() == expected[j]);
    }

    const MeshHierarchy tiny(1, 2, 1);
    REQUIRE(tiny.level(0).num_interior() == 1);
    CHECK(tiny.level(0).coordinates(0)[0] == doctest::Approx(0.5));

    const MeshHierarchy h2(2, 4, 2);
    CHECK(h2.level(0).num_interior() == 9);
    CHECK(h2.level(0).num_elements() == 32);
    CHECK(h2.level(1).num_interior() == 49);
    CHECK(h2.level(1).num_elements() == 128);
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(MeshHierarchy(1, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(MeshHierarchy(1, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(MeshHierarchy(3, 4, 2), std::invalid_argument);
    const MeshHierarchy h(1, 4, 2);
    CHECK_THROWS(h.level(2));
    CHECK_THROWS(h.interpolation(0));
}

TEST_CASE("lexicographic ordering and nesting") {
    const MeshHierarchy h(2, 4, 2);
    const LevelMesh& f = h.level(1);
    const LevelMesh& c = h.level(0);
    for (Index i = 0; i < f.num_interior(); ++i) {
        const auto [ix, iy] = oracle::node(2, 8, i);
        const auto p = f.coordinates(i);
        CHECK(p[0] == doctest::Approx(ix / 8.0));
        CHECK(p[1] == doctest::Approx(iy / 8.0));
        const Index ci = f.coarse_of_fine(i);
        if (ix % 2 == 0 && iy % 2 == 0) {
            REQUIRE(ci >= 0);
            CHECK(c.coordinates(ci)[0] == doctest::Approx(p[0]));
            CHECK(c.coordinates(ci)[1] == doctest::Approx(p[1]));
            CHECK(f.fine_of_coarse(ci) == i);
        } else {
            CHECK(ci == -1);
        }
    }
}

TEST_CASE("parent elements contain their children") {
    for (int dim : {1, 2}) {
        const MeshHierarchy h(dim, 4, 2);
        const LevelMesh& f = h.level(1);
        const LevelMesh& c = h.level(0);
        for (Index e = 0; e < f.num_elements(); ++e) {
            // centroid of the child in coarse grid units
            double cx = 0.0, cy = 0.0;
            for (Index g : f.element(e)) {
                const auto q = f.grid_coords(g);
                cx += q[0] / 2.0;
                cy += q[1] / 2.0;
            }
            cx /= f.vertices_per_element();
            cy /= f.vertices_per_element();
            // barycentric test: sum of the parent's vertex hats at the centroid is 1
            double s = 0.0;
            for (Index g : c.element(f.parent_element(e))) {
                const auto q = c.grid_coords(g);
                s += oracle::hat(dim, q[0], q[1], cx, cy);
            }
            CHECK(s == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("weights are uniform and sum to the touched measure") {
    for (int dim : {1, 2}) {
        const MeshHierarchy h(dim, 4, 3);
        for (int j = 0; j < 3; ++j) {
            const LevelMesh& m = h.level(j);
            const double hh = m.h();
            const double w = dim == 1 ? hh : hh * hh;
            for (Index i = 0; i < m.num_interior(); ++i) CHECK(m.weights()[i] == doctest::Approx(w).epsilon(1e-14));
            // vertex quadrature of the constant 1 over elements with interior vertices
            double touched = 0.0;
            for (Index e = 0; e < m.num_elements(); ++e) {
                int interior = 0;
                for (Index g : m.element(e)) interior += m.interior_of_grid(g) >= 0;
                touched += m.element_volume() * interior / m.vertices_per_element();
            }
            CHECK(m.weights().sum() == doctest::Approx(touched));
        }
    }
}

TEST_CASE("discrete inner product examples") {
    const MeshHierarchy h(1, 4, 1);
    FeVector phi2 = h.zeros(0);
    phi2.values[1] = 1.0;
    CHECK(h.discrete_inner(phi2, phi2) == doctest::Approx(0.25));
    CHECK(h.discrete_inner(h.zeros(0), phi2) == 0.0);
    FeVector one{0, Vector::Ones(3)};
    CHECK(h.discrete_inner(one, one) == doctest::Approx(0.75));

    const MeshHierarchy h2(1, 4, 2);
    CHECK_THROWS_AS(h2.discrete_inner(h2.zeros(0), h2.zeros(1)), std::invalid_argument);
}

TEST_CASE("discrete inner product is symmetric and positive") {
    const MeshHierarchy h(2, 4, 2);
    for (int t = 0; t < 20; ++t) {
        const FeVector u = random_fe(h, 1), v = random_fe(h, 1);
        CHECK(h.discrete_inner(u, v) == doctest::Approx(h.discrete_inner(v, u)));
        CHECK(h.discrete_inner(u, u) > 0.0);
    }
}

TEST_CASE("interpolation matches hat-function evaluation") {
    for (int dim : {1, 2}) {
        const int n0 = 4;
        const MeshHierarchy h(dim, n0, 3);
        for (int j = 1; j < 3; ++j) {
            const DenseMatrix expected = oracle::interpolation(dim, n0 << (j - 1));
            const DenseMatrix got = DenseMatrix(h.interpolation(j));
            CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-15);
        }
    }
}

TEST_CASE("interpolation examples") {
    const MeshHierarchy h(1, 2, 2);
    const FeVector fine = h.interpolate({0, Vector::Ones(1)});
    REQUIRE(fine.values.size() == 3);
    CHECK(fine.values[0] == 0.5);
    CHECK(fine.values[1] == 1.0);
    CHECK(fine.values[2] == 0.5);
    CHECK(h.interpolate(h.zeros(0)).values.isZero());
    CHECK_THROWS_AS(h.interpolate(h.zeros(1)), std::invalid_argument);

    const MeshHierarchy h2(2, 4, 2);
    const auto lin = [](double x, double y) { return x + y; };
    const FeVector up = h2.interpolate(h2.nodal_interpolant(0, lin));
    const FeVector direct = h2.nodal_interpolant(1, lin);
    // boundary nodes where x + y != 0 are dropped, so compare away from the boundary ring
    for (Index i = 0; i < up.values.size(); ++i) {
        const auto [ix, iy] = oracle::node(2, 8, i);
        if (ix > 1 && iy > 1 && ix < 7 && iy < 7) CHECK(up.values[i] == doctest::Approx(direct.values[i]));
    }
}

TEST_CASE("interpolation preserves the function") {
    for (int dim : {1, 2}) {
        const MeshHierarchy h(dim, 4, 2);
        const FeVector u = random_fe(h, 0);
        const FeVector v = h.interpolate(u);
        for (int t = 0; t < 50; ++t) {
            const double x = oracle::uniform(0.0, 4.0);
            const double y = dim == 2 ? oracle::uniform(0.0, 4.0) : 0.0;
            CHECK(oracle::evaluate(dim, 8, v.values, 2 * x, 2 * y) ==
                  doctest::Approx(oracle::evaluate(dim, 4, u.values, x, y)).epsilon(1e-12));
        }
    }
}

TEST_CASE("restriction examples") {
    const MeshHierarchy h(1, 2, 2);
    FeVector e{1, Vector::Zero(3)};
    e.values[1] = 1.0;
    const FeVector r = h.restrict(e);
    REQUIRE(r.level == 0);
    CHECK(r.values[0] == doctest::Approx(0.5));
    CHECK(h.restrict(h.zeros(1)).values.isZero());
    CHECK_THROWS_AS(h.restrict(h.zeros(0)), std::invalid_argument);
}

TEST_CASE("restriction is the adjoint of interpolation") {
    for (int dim : {1, 2}) {
        const MeshHierarchy h(dim, 4, 3);
        for (int j = 1; j < 3; ++j)
            for (int t = 0; t < 100; ++t) {
                const FeVector u = random_fe(h, j), v = random_fe(h, j - 1);
                const double lhs = h.discrete_inner(u, h.interpolate(v));
                const double rhs = h.discrete_inner(h.restrict(u), v);
                CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
            }
    }
}

TEST_CASE("interpolation is injective") {
    for (int dim : {1, 2}) {
        const MeshHierarchy h(dim, 4, 2);
        const DenseMatrix j = DenseMatrix(h.interpolation(1));
        Eigen::FullPivLU<DenseMatrix> lu(j);
        CHECK(lu.rank() == j.cols());
    }
}

TEST_CASE("consistent mass matches exact quadrature") {
    for (int dim : {1, 2}) {
        const int n = 4;
        const MeshHierarchy h(dim, n, 1);
        const DenseMatrix expected = oracle::mass(dim, n);
        CHECK((DenseMatrix(h.mass(0)) - expected).cwiseAbs().maxCoeff() < 1e-14);
        const FeVector u = random_fe(h, 0), v = random_fe(h, 0);
        CHECK(h.l2_inner(u, v) == doctest::Approx(oracle::l2_inner(dim, n, u.values, v.values)).epsilon(1e-12));
    }
}

TEST_CASE("stiffness matches the finite-difference stencil") {
    for (int dim : {1, 2})
        for (int n : {2, 4, 8}) {
            const LevelMesh m(dim, 0, n);
            CHECK((DenseMatrix(assemble_stiffness(m)) - oracle::stiffness(dim, n)).cwiseAbs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("discrete and L2 norms are equivalent uniformly in h") {
    for (int dim : {1, 2}) {
        const MeshHierarchy h(dim, 4, dim == 1 ? 6 : 4);
        double lo = 1e300, hi = 0.0;
        for (int j = 0; j < h.num_levels(); ++j) {
            double llo = 1e300, lhi = 0.0;
            for (int t = 0; t < 200; ++t) {
                const FeVector u = random_fe(h, j);
                const double q = std::sqrt(h.discrete_inner(u, u) / h.l2_inner(u, u));
                llo = std::min(llo, q);
                lhi = std::max(lhi, q);
            }
            lo = std::min(lo, llo);
            hi = std::max(hi, lhi);
        }
        // P1 lumped/consistent bounds: 1 <= q <= sqrt(d + 2)
        CHECK(lo >= 1.0 - 1e-12);
        CHECK(hi <= std::sqrt(dim + 2.0) + 1e-12);
    }
}
