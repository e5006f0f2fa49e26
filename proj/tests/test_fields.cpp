#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rotsmag/discrete_ops.hpp"
#include "rotsmag/errors.hpp"
#include "rotsmag/norms.hpp"
#include "rotsmag/projection.hpp"
#include "rotsmag/quadrature.hpp"
#include "test_support.hpp"

using namespace rotsmag;
using rotsmag::test::fill_random;

namespace {

constexpr double pi = std::numbers::pi;

bool interior_edge(const Grid& g, int slot, int i, int j, int k, int margin) {
    const int idx[3] = {i, j, k};
    for (int a = 0; a < g.dims(); ++a) {
        if (g.periodic(a)) continue;
        const bool node_axis = !(g.dims() == 3 && a == slot);
        const int hi = node_axis ? g.cells(a) : g.cells(a) - 1;
        if (idx[a] < margin || idx[a] > hi - margin) return false;
    }
    return true;
}

double max_interior_curl_error(const EdgeField& w, int margin,
                               const std::function<double(int, const Point&)>& exact) {
    double err = 0.0;
    const Grid& g = w.grid();
    for (int c = 0; c < w.components(); ++c) {
        const Array3& arr = w.component(c);
        for (int k = 0; k < arr.n[2]; ++k)
            for (int j = 0; j < arr.n[1]; ++j)
                for (int i = 0; i < arr.n[0]; ++i) {
                    if (!interior_edge(g, c, i, j, k, margin)) continue;
                    err = std::max(err, std::abs(arr(i, j, k) - exact(c, w.edge_position(c, i, j, k))));
                }
    }
    return err;
}

}  // namespace

TEST_CASE("curl of constant and affine fields") {
    const Grid g = Grid::uniform(Domain::box3d(1.0, 1.0, 1.0), {6, 6, 6});
    const auto constant = VectorField::from_function(g, [](const Point&) { return Point{0.3, -1.2, 0.7}; });
    CHECK(max_interior_curl_error(curl(constant), 1, [](int, const Point&) { return 0.0; }) < 1e-13);

    const auto rot = VectorField::from_function(g, [](const Point& x) { return Point{-x[1], x[0], 0.0}; });
    CHECK(max_interior_curl_error(curl(rot), 1, [](int c, const Point&) { return c == 2 ? 2.0 : 0.0; }) < 1e-12);
}

TEST_CASE("2D Taylor-Green vorticity converges at second order") {
    double prev = 0.0;
    for (int n : {16, 32, 64, 128}) {
        const Grid g = Grid::uniform(Domain::box2d(2.0 * pi, pi, true), {2 * n, n, 1});
        const auto u = VectorField::from_function(g, [](const Point& x) {
            return Point{std::sin(x[0]) * std::cos(x[1]), -std::cos(x[0]) * std::sin(x[1]), 0.0};
        });
        const double err = max_interior_curl_error(curl(u), 1, [](int, const Point& x) {
            return 2.0 * std::sin(x[0]) * std::sin(x[1]);
        });
        if (prev > 0.0) CHECK(std::log2(prev / err) > 1.9);
        prev = err;
    }
}

TEST_CASE("divergence of affine fields") {
    const Grid g = Grid::uniform(Domain::box3d(1.0, 1.0, 1.0), {5, 5, 5});
    const auto a = VectorField::from_function(g, [](const Point& x) { return Point{x[0], -x[1], 0.0}; });
    const auto b = VectorField::from_function(g, [](const Point& x) { return Point{x[0], 0.0, 0.0}; });
    const ScalarField da = divergence(a), db = divergence(b);
    for (int k = 0; k < 5; ++k)
        for (int j = 1; j < 4; ++j)
            for (int i = 1; i < 4; ++i) {
                CHECK(std::abs(da.component(0)(i, j, k)) < 1e-13);
                CHECK(db.component(0)(i, j, k) == doctest::Approx(1.0).epsilon(1e-13));
            }
}

TEST_CASE("discrete adjointness") {
    const std::vector<Grid> grids = {
        Grid::uniform(Domain::box3d(1.0, 2.0, 1.5), {5, 6, 7}),
        Grid::uniform(Domain::channel3d(2.0, 1.0, 1.0), {6, 5, 8}),
        Grid::uniform(Domain::box2d(1.0, 1.0), {7, 9, 1}),
        Grid::uniform(Domain::box2d(2.0, 1.0, true), {8, 6, 1}),
        Grid::window(Domain::channel3d(1.0, 1.0, 1.0), {0.25, 0.0, 0.0}, {0.5, 1.0, 0.25}, {6, 5, 4}),
    };
    std::uint64_t seed = 1;
    for (const Grid& g : grids) {
        VectorField u(g);
        EdgeField w(g);
        ScalarField phi(g);
        fill_random(u, seed++);
        u.enforce_walls();
        fill_random(w, seed++);
        fill_random(phi, seed++);
        const double lhs = inner(curl(u), w);
        const double rhs = inner(u, curl_adjoint(w));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + 1.0));
        const double gl = inner(gradient(phi), u);
        const double gr = -inner(phi, divergence(u));
        CHECK(std::abs(gl - gr) <= 1e-12 * (std::abs(gl) + 1.0));
    }
}

TEST_CASE("stream-function fields are exactly solenoidal") {
    for (const Grid& g : {Grid::uniform(Domain::channel3d(1.0, 1.0, 1.0), {6, 7, 8}),
                          Grid::uniform(Domain::box2d(1.0, 1.0), {9, 8, 1})}) {
        EdgeField psi(g);
        fill_random(psi, 42);
        // Zero on Dirichlet boundary nodes so the wall-normal flux vanishes.
        for (int c = 0; c < psi.components(); ++c) {
            Array3& arr = psi.component(c);
            for (int k = 0; k < arr.n[2]; ++k)
                for (int j = 0; j < arr.n[1]; ++j)
                    for (int i = 0; i < arr.n[0]; ++i)
                        if (!interior_edge(g, c, i, j, k, 1)) arr(i, j, k) = 0.0;
        }
        const VectorField u = potential_curl(psi);
        CHECK(divergence(u).max_abs() < 1e-12 * u.max_abs() * g.cells(0));
    }
}

TEST_CASE("Leray projection") {
    const Grid g = Grid::uniform(Domain::channel3d(1.0, 1.0, 1.0), {8, 8, 8});
    LerayProjector P(g);

    SUBCASE("random field: solenoidal output orthogonal to gradients") {
        VectorField u(g);
        fill_random(u, 7);
        u.enforce_walls();
        auto [v, phi] = P.project(u);
        CHECK(divergence(v).max_abs() <= 1e-10);
        for (std::uint64_t s = 0; s < 5; ++s) {
            ScalarField psi(g);
            fill_random(psi, 100 + s);
            const VectorField gp = gradient(psi);
            CHECK(std::abs(inner(v, gp)) <= 10 * 1e-10 * l2_norm(gp));
        }
        // Projection is idempotent.
        CHECK((P(v) - v).max_abs() <= 1e-10);
    }
    SUBCASE("pure gradients are annihilated") {
        ScalarField psi(g);
        fill_random(psi, 9);
        const VectorField u = gradient(psi);
        CHECK(P(u).max_abs() <= 10 * 1e-10);
    }
    SUBCASE("plain CG agrees with the preconditioned solve") {
        VectorField u(g);
        fill_random(u, 11);
        u.enforce_walls();
        PoissonOptions opt;
        opt.spectral_preconditioner = false;
        PoissonStats s1, s2;
        const auto a = LerayProjector(g, opt).project(u, &s1).first;
        const auto b = P.project(u, &s2).first;
        CHECK((a - b).max_abs() < 1e-9);
        CHECK(s2.iterations < s1.iterations);
    }
    SUBCASE("2D box with walls on both axes") {
        const Grid g2 = Grid::uniform(Domain::box2d(1.0, 2.0), {16, 24, 1});
        VectorField u(g2);
        fill_random(u, 5);
        u.enforce_walls();
        const auto [v, phi] = leray_project(u, 1e-10);
        CHECK(divergence(v).max_abs() <= 1e-10);
    }
    SUBCASE("iteration cap reports the residual") {
        VectorField u(g);
        fill_random(u, 3);
        u.enforce_walls();
        PoissonOptions opt;
        opt.spectral_preconditioner = false;
        opt.max_iterations = 2;
        CHECK_THROWS_AS(LerayProjector(g, opt).project(u), SolverError);
    }
}

TEST_CASE("weighted norms") {
    const Domain channel = Domain::channel3d(1.0, 1.0, 1.0);
    MixingLength ml;
    SUBCASE("zero field and constant field") {
        const Grid g = Grid::uniform(Domain::channel3d(2.0, 1.0, 1.5), {4, 4, 6});
        const auto w = weight_field(g, ml, 0.0);
        CHECK(weighted_lp_norm(VectorField(g), w, 3.0).value == 0.0);
        const auto one = VectorField::from_function(g, [](const Point&) { return Point{1.0, 0.0, 0.0}; });
        CHECK(weighted_lp_norm(one, w, 3.0).value == doctest::Approx(std::pow(3.0, 1.0 / 3.0)).epsilon(1e-14));
    }
    SUBCASE("alpha = 2, p = 3 on the unit channel against the closed-form integral") {
        // ∫ d² = 2 ∫_0^{1/2} z² dz = 1/12.
        double prev = 1.0;
        for (int n : {8, 16, 32, 64}) {
            const Grid g = Grid::uniform(channel, {2, 2, n});
            const auto one = VectorField::from_function(g, [](const Point&) { return Point{1.0, 0.0, 0.0}; });
            const double err =
                std::abs(weighted_lp_norm(one, weight_field(g, ml, 2.0), 3.0).value - std::cbrt(1.0 / 12.0));
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 1e-4);
    }
    SUBCASE("alpha = 0 weighted norm is the unweighted norm") {
        const Grid g = Grid::uniform(channel, {4, 5, 6});
        VectorField u(g);
        fill_random(u, 21);
        u.enforce_walls();
        const auto w = weight_field(g, ml, 0.0);
        double plain = 0.0;
        corner::for_each(g, [&](int i, int j, int k, int s, std::size_t) {
            const auto v = corner::gather(u, i, j, k, s);
            plain += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        });
        plain = std::sqrt(plain * corner::volume(g));
        CHECK(weighted_lp_norm(u, w, 2.0).value == doctest::Approx(plain).epsilon(1e-15));
        // The corner rule integrates each face value with its full control volume.
        CHECK(weighted_lp_norm(u, w, 2.0).value == doctest::Approx(l2_norm(u)).epsilon(1e-13));
    }
    SUBCASE("location mismatch is rejected") {
        const Grid g = Grid::uniform(channel, {4, 4, 4});
        const auto wc = weight_field(g, ml, 1.0, SampleLocation::cell);
        CHECK_THROWS_AS(weighted_lp_norm(VectorField(g), wc, 2.0), ArgumentError);
    }
    SUBCASE("V norm vanishes only for curl-free fields") {
        const Grid g = Grid::uniform(channel, {4, 4, 6});
        ModelParams mp;
        mp.alpha = 1.0;
        CHECK(v_norm(VectorField(g), mp).value == 0.0);
        VectorField u(g);
        fill_random(u, 2);
        u.enforce_walls();
        CHECK(v_norm(u, mp).value > 0.0);
    }
}
