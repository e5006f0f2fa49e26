#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rotsmag/discrete_ops.hpp"
#include "rotsmag/errors.hpp"
#include "rotsmag/norms.hpp"
#include "rotsmag/operators.hpp"
#include "rotsmag/quadrature.hpp"
#include "test_support.hpp"

using namespace rotsmag;
using rotsmag::test::fill_random;

namespace {

constexpr double pi = std::numbers::pi;

/// Solenoidal field from an analytic vector potential sampled on edges.
VectorField from_potential(const Grid& g, const std::function<Point(const Point&)>& psi) {
    EdgeField e(g);
    for (int c = 0; c < e.components(); ++c) {
        Array3& arr = e.component(c);
        for (int k = 0; k < arr.n[2]; ++k)
            for (int j = 0; j < arr.n[1]; ++j)
                for (int i = 0; i < arr.n[0]; ++i) {
                    const Point v = psi(e.edge_position(c, i, j, k));
                    arr(i, j, k) = g.dims() == 2 ? v[2] : v[c];
                }
    }
    return potential_curl(e);
}

Point psi_a(const Point& x) {
    const double s = std::pow(std::sin(pi * x[2]), 2);
    return {s * std::cos(2 * pi * x[1]), s * std::sin(2 * pi * x[0]), s * std::cos(2 * pi * (x[0] + x[1]))};
}

Point psi_b(const Point& x) {
    const double s = std::pow(std::sin(pi * x[2]), 2) * x[2];
    return {s * std::sin(2 * pi * (x[0] - x[1])), s * std::cos(2 * pi * x[0]), s};
}

Point psi_2d(const Point& x) {
    return {0.0, 0.0, std::pow(std::sin(pi * x[0]) * std::sin(pi * x[1]), 2) * (1.0 + x[0] + x[1] * x[1])};
}

Point psi_2d_b(const Point& x) {
    return {0.0, 0.0, std::pow(std::sin(pi * x[0]) * std::sin(pi * x[1]), 2) * x[0] * (1.0 + 2.0 * x[1] * x[1])};
}

ModelParams params(double p, double alpha, double C = 1.0) {
    ModelParams m;
    m.p = p;
    m.alpha = alpha;
    m.C_alpha = C;
    return m;
}

const Grid& channel_grid() {
    static const Grid g = Grid::uniform(Domain::channel3d(1.0, 1.0, 1.0), {8, 8, 8});
    return g;
}

/// Convective weak form −∫(u⊗u):∇w on the corner quadrature.
double convective_form(const VectorField& u, const VectorField& w) {
    const Grid& g = u.grid();
    double acc = 0.0;
    corner::for_each(g, [&](int i, int j, int k, int s, std::size_t) {
        const auto uu = corner::gather(u, i, j, k, s);
        const auto G = corner::gradient(w, i, j, k, s);
        for (int c = 0; c < 3; ++c)
            for (int a = 0; a < 3; ++a) acc -= uu[c] * uu[a] * G[c][a];
    });
    return acc * corner::volume(g);
}

}  // namespace

TEST_CASE("S: curl-free input, energy identity, homogeneity") {
    const Grid& g = channel_grid();
    SUBCASE("gradients supported away from walls give zero") {
        ScalarField phi(g);
        fill_random(phi, 4);
        auto& a = phi.component(0);
        for (int k = 0; k < a.n[2]; ++k)
            for (int j = 0; j < a.n[1]; ++j)
                for (int i = 0; i < a.n[0]; ++i)
                    if (k < 2 || k > a.n[2] - 3) a(i, j, k) = 0.0;
        const VectorField u = gradient(phi);
        CHECK(u.max_abs() > 0.1);
        CHECK(apply_S(u, params(3.0, 1.0)).max_abs() < 1e-12);
    }
    SUBCASE("⟨S u, u⟩ = C ‖u‖_V^p") {
        FieldSampler sampler(g, 11);
        for (double p : {2.0, 3.0, 4.5}) {
            const auto m = params(p, 1.3, 1.7);
            const VectorField u = sampler.next();
            const double lhs = inner(apply_S(u, m), u);
            const double rhs = 1.7 * std::pow(v_norm(u, m).value, p);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
    SUBCASE("homogeneity of degree p-1") {
        FieldSampler sampler(g, 12);
        const VectorField u = sampler.next();
        const auto m = params(3.5, 0.5);
        const double lam = 2.7;
        const VectorField a = apply_S(lam * u, m);
        const VectorField b = std::pow(lam, 2.5) * apply_S(u, m);
        CHECK((a - b).max_abs() <= 1e-13 * b.max_abs());
    }
    SUBCASE("regularization is off by default and changes the result when on") {
        FieldSampler sampler(g, 13);
        const VectorField u = sampler.next();
        auto m = params(3.0, 1.0);
        const VectorField a = apply_S(u, m);
        m.eps_reg = 0.5;
        CHECK((apply_S(u, m) - a).max_abs() > 1e-3 * a.max_abs());
    }
    SUBCASE("integral monotonicity") {
        FieldSampler sampler(g, 14);
        for (int r = 0; r < 5; ++r) {
            const VectorField u = sampler.next();
            const VectorField v = sampler.next();
            const auto m = params(3.0, 1.5);
            const double gap = inner(apply_S(u, m) - apply_S(v, m), u - v);
            CHECK(gap > 0.0);
        }
    }
}

TEST_CASE("B: skewness, homogeneity, precondition") {
    const Grid& g = channel_grid();
    FieldSampler sampler(g, 21);
    CHECK(apply_B(VectorField(g), 1e-8).max_abs() == 0.0);
    for (int r = 0; r < 5; ++r) {
        const VectorField u = sampler.next();
        const VectorField b = apply_B(u, 1e-8);
        CHECK(std::abs(inner(b, u)) <= 1e-12 * l2_norm(u) * l2_norm(b) + 1e-300);
        const VectorField b2 = apply_B(3.0 * u, 1e-8);
        CHECK((b2 - 9.0 * b).max_abs() <= 1e-13 * b2.max_abs());
    }
    SUBCASE("2D skewness") {
        const Grid g2 = Grid::uniform(Domain::box2d(1.0, 1.0), {16, 16, 1});
        FieldSampler s2(g2, 5);
        const VectorField u = s2.next();
        const VectorField b = apply_B(u, 1e-8);
        CHECK(b.max_abs() > 0.0);
        CHECK(std::abs(inner(b, u)) <= 1e-12 * l2_norm(u) * l2_norm(b));
    }
    SUBCASE("non-solenoidal input is rejected") {
        VectorField u(g);
        fill_random(u, 3);
        u.enforce_walls();
        CHECK_THROWS_AS(apply_B(u, 1e-8), PreconditionError);
    }
}

TEST_CASE("B: weak form equals the convective form and converges under refinement") {
    std::vector<double> v3, v2;
    for (int n : {8, 16, 32}) {
        const Grid g = Grid::uniform(Domain::channel3d(1.0, 1.0, 1.0), {n, n, n});
        const VectorField u = from_potential(g, psi_a), w = from_potential(g, psi_b);
        const double lhs = inner(apply_B(u, 1e-8), w);
        CHECK(std::abs(lhs - convective_form(u, w)) <= 1e-10 * std::abs(lhs));
        v3.push_back(lhs);

        const Grid g2 = Grid::uniform(Domain::box2d(1.0, 1.0), {4 * n, 4 * n, 1});
        const VectorField u2 = from_potential(g2, psi_2d), w2 = from_potential(g2, psi_2d_b);
        const double l2 = inner(apply_B(u2, 1e-8), w2);
        CHECK(std::abs(l2 - convective_form(u2, w2)) <= 1e-10 * std::abs(l2));
        v2.push_back(l2);
    }
    for (const auto* v : {&v3, &v2}) {
        const double d1 = std::abs((*v)[1] - (*v)[0]), d2 = std::abs((*v)[2] - (*v)[1]);
        MESSAGE("successive differences " << d1 << " " << d2);
        CHECK(d2 < 0.5 * d1);
        CHECK(d2 < 0.05 * std::abs((*v)[2]));
    }
}

TEST_CASE("B: face-average variant converges to the corner form and is nearly skew") {
    double prev = 0.0;
    for (int n : {8, 16, 32}) {
        const Grid g = Grid::uniform(Domain::channel3d(1.0, 1.0, 1.0), {n, n, n});
        const VectorField u = from_potential(g, psi_a);
        const VectorField bc = apply_B(u, 1e-8), bf = apply_B(u, 1e-8, ConvectionForm::face_average);
        const double rel = l2_norm(bc - bf) / l2_norm(bc);
        if (prev > 0.0) CHECK(rel < 0.6 * prev);
        prev = rel;
        CHECK(std::abs(inner(bf, u)) <= 0.1 * l2_norm(u) * l2_norm(bf));
    }
}

TEST_CASE("A = S + B") {
    const Grid& g = channel_grid();
    const auto m = params(3.0, 1.0);
    CHECK(apply_A(VectorField(g), m, 1e-8).max_abs() == 0.0);
    FieldSampler sampler(g, 31);
    const VectorField u = sampler.next();
    const VectorField a = apply_A(u, m, 1e-8);
    CHECK((a - apply_S(u, m) - apply_B(u, 1e-8)).max_abs() <= 1e-14 * a.max_abs());
    const double su = inner(apply_S(u, m), u);
    CHECK(inner(a, u) == doctest::Approx(su).epsilon(1e-12));
}

TEST_CASE("condition checker") {
    const Grid& g = channel_grid();
    SUBCASE("coercivity constant equals C exactly") {
        FieldSampler sampler(g, 41);
        const auto r = check_conditions(params(3.0, 1.0, 2.5), sampler, 10);
        CHECK(r.sample_count == 10);
        CHECK(r.c1_hat == doctest::Approx(2.5).epsilon(1e-10));
        CHECK(r.c0_hat >= r.c1_hat);
    }
    SUBCASE("single normalized sample") {
        FieldSampler sampler(g, 42);
        const auto r = check_conditions(params(4.0, 2.0), sampler, 1);
        CHECK(r.sample_count == 1);
        CHECK(r.c1_hat == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("growth estimate is stable under doubling the sample count") {
        FieldSampler s1(g, 43), s2(g, 43);
        const auto r1 = check_conditions(params(3.0, 1.0), s1, 200);
        const auto r2 = check_conditions(params(3.0, 1.0), s2, 400);
        MESSAGE("c0(200)=" << r1.c0_hat << " c0(400)=" << r2.c0_hat);
        CHECK(std::isfinite(r1.c0_hat));
        CHECK(std::abs(r2.c0_hat - r1.c0_hat) < 0.1 * r1.c0_hat);
    }
    SUBCASE("n < 1 is rejected") {
        FieldSampler sampler(g, 44);
        CHECK_THROWS_AS(check_conditions(params(3.0, 1.0), sampler, 0), ArgumentError);
    }
    SUBCASE("csv row") {
        std::ostringstream os;
        write_condition_csv_header(os);
        OperatorConditionReport r;
        r.p = 3.0;
        r.alpha = 1.0;
        r.sample_count = 2;
        r.c0_hat = 1.5;
        r.c1_hat = 1.0;
        write_condition_csv_row(os, r, 7);
        CHECK(os.str() == "p,alpha,n,seed,c0_hat,c1_hat,skipped\n3,1,2,7,1.5,1,0\n");
    }
}

TEST_CASE("pointwise monotonicity") {
    CHECK(monotonicity_product({2.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 3.0, 1.0) == 3.0);
    const Grid& g = channel_grid();
    FieldSampler sampler(g, 51);
    const auto m = params(3.0, 1.0);
    const VectorField u = sampler.next();
    CHECK(monotonicity_gap(u, u, m) == 0.0);
    for (int r = 0; r < 10; ++r) {
        const VectorField a = sampler.next();
        const VectorField b = sampler.next();
        const double scale = std::max(curl(a).max_abs(), curl(b).max_abs());
        CHECK(monotonicity_gap(a, b, m) >= -1e-14 * std::pow(scale, m.p));
    }
}
