#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rotsmag/discrete_ops.hpp"
#include "rotsmag/errors.hpp"
#include "rotsmag/evolution.hpp"
#include "rotsmag/norms.hpp"
#include "rotsmag/snapshot.hpp"
#include "test_support.hpp"

using namespace rotsmag;

namespace {

/// ½ Σ h^d u² over all face samples, written out independently of inner().
double kinetic(const VectorField& u) {
    const Grid& g = u.grid();
    double vol = 1.0;
    for (int a = 0; a < g.dims(); ++a) vol *= g.spacing(a);
    double s = 0.0;
    for (int c = 0; c < g.dims(); ++c)
        for (double x : u.component(c).data) s += x * x;
    return 0.5 * vol * s;
}

SolverConfig config(double dt, int steps) {
    SolverConfig c;
    c.dt = dt;
    c.t_end = dt * steps;
    return c;
}

ModelParams model(double p, double alpha) {
    ModelParams m;
    m.p = p;
    m.alpha = alpha;
    return m;
}

}  // namespace

TEST_CASE("zero data stays at rest") {
    const Grid g = Grid::uniform(Domain::box2d(1.0, 1.0), {8, 8, 1});
    Stepper s(g, model(3.0, 1.0), config(1e-2, 1));
    const StepResult r = s.step(VectorField(g), VectorField(g));
    CHECK(r.u.max_abs() == 0.0);
    CHECK(r.stats.picard_iterations == 1);
    CHECK(r.row.kinetic == 0.0);
}

TEST_CASE("Taylor-Green initial energy and decay") {
    const Grid g = Grid::uniform(Domain::box2d(1.0, 1.0), {32, 32, 1});
    InitialData init;
    const RunResult r = run(g, init, ForcingSpec::zero(), model(3.0, 1.0), config(1e-3, 20));
    // ½∫ sin²πx cos²πy + cos²πx sin²πy = 1/4; the face samples integrate it exactly.
    CHECK(r.ledger.kinetic0 == doctest::Approx(0.25).epsilon(1e-12));
    double prev = r.ledger.kinetic0;
    for (std::size_t n = 0; n < r.ledger.rows.size(); ++n) {
        const auto& row = r.ledger.rows[n];
        CHECK(row.kinetic < prev);
        CHECK(row.dissipation > 0.0);
        CHECK(row.work == 0.0);
        CHECK(energy_residual(r.ledger, n + 1) <= 1e-8);
        prev = row.kinetic;
    }
    CHECK(r.ledger.rows.back().t == doctest::Approx(0.02));
    CHECK(kinetic(r.final_state) == doctest::Approx(r.ledger.rows.back().kinetic).epsilon(1e-13));
    CHECK(divergence(r.final_state).max_abs() <= 1e-10);
    CHECK(r.trajectory.states.size() == 2);
    CHECK(r.trajectory.max_l2 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("energy balance holds with forcing, a periodic axis and in 3D") {
    SUBCASE("steady forcing, both axes walls") {
        const Grid g = Grid::uniform(Domain::box2d(1.0, 2.0), {16, 24, 1});
        ManufacturedSolution ms;
        const ModelParams m = model(3.0, 0.5);
        InitialData init;
        init.amplitude = 0.3;
        const RunResult r = run(g, init, ForcingSpec::steady(ms.forcing(g, model(3.0, 0.5))), m, config(5e-3, 10));
        for (std::size_t n = 1; n <= r.ledger.rows.size(); ++n) CHECK(energy_residual(r.ledger, n) <= 1e-8);
        double wabs = 0.0;
        for (const auto& row : r.ledger.rows) wabs += std::abs(row.work);
        CHECK(wabs > 0.0);
    }
    SUBCASE("channel periodic in x") {
        const Grid g = Grid::uniform(Domain::box2d(2.0, 1.0, true), {24, 12, 1});
        InitialData init;
        init.kind = InitialData::Kind::random_bump_projected;
        init.seed = 7;
        const RunResult r = run(g, init, ForcingSpec::zero(), model(4.0, 1.0), config(1e-2, 8));
        CHECK(r.ledger.kinetic0 > 0.0);
        for (std::size_t n = 1; n <= r.ledger.rows.size(); ++n) CHECK(energy_residual(r.ledger, n) <= 1e-8);
        CHECK(divergence(r.final_state).max_abs() <= 1e-10);
    }
    SUBCASE("3D box") {
        const Grid g = Grid::uniform(Domain::box3d(1.0, 1.0, 1.0), {8, 8, 8});
        InitialData init;
        init.kind = InitialData::Kind::random_bump_projected;
        init.seed = 3;
        const RunResult r = run(g, init, ForcingSpec::zero(), model(3.0, 1.0), config(1e-2, 3));
        for (std::size_t n = 1; n <= r.ledger.rows.size(); ++n) CHECK(energy_residual(r.ledger, n) <= 1e-8);
        CHECK(r.ledger.rows.back().kinetic < r.ledger.kinetic0);
    }
}

TEST_CASE("ledger csv") {
    const Grid g = Grid::uniform(Domain::box2d(1.0, 1.0), {8, 8, 1});
    const RunResult r = run(g, InitialData{}, ForcingSpec::zero(), model(3.0, 0.0), config(1e-2, 3));
    std::ostringstream os;
    r.ledger.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "step,t,kinetic,dissipation_cum,work_cum,scheme_dissipation_cum,residual,picard_iters");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 4);
    CHECK_THROWS_AS(energy_residual(r.ledger, 4), ArgumentError);
    CHECK(energy_residual(r.ledger, 0) == 0.0);
}

TEST_CASE("stationary manufactured solution converges in space") {
    const ModelParams m = model(3.0, 0.0);
    ManufacturedSolution ms;
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        const Grid g = Grid::uniform(Domain::box2d(1.0, 1.0), {n, n, 1});
        SolverConfig c = config(1e3, 1);
        c.picard_max = 500;
        Stepper s(g, m, c);
        const VectorField exact = ms.velocity(g);
        const VectorField f = ms.forcing(g, m);
        VectorField u = s.project(exact);
        double change = 1.0;
        for (int k = 0; k < 60 && change > 1e-9; ++k) {
            StepResult r = s.step(u, f);
            change = l2_norm(r.u - u) / l2_norm(r.u);
            u = std::move(r.u);
        }
        const double err = l2_norm(u - exact) / l2_norm(exact);
        if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.0);
        prev = err;
    }
    CHECK(prev < 2e-3);
}

TEST_CASE("manufactured forcing matches a finite-difference oracle") {
    // f = curlᵀ g + ω × u with g = C d^α |ω|^{p-2} ω, differentiated numerically.
    const Grid g = Grid::uniform(Domain::box2d(1.0, 1.5), {8, 8, 1});
    const ModelParams m = model(3.0, 1.0);
    ManufacturedSolution ms;
    ms.amplitude = 0.7;
    const VectorField f = ms.forcing(g, m);
    const Domain& dom = g.domain();
    auto gfun = [&](double x, double y) {
        const double w = ms.vorticity(dom, {x, y, 0.0});
        const double d = std::min(std::min(x, 1.0 - x), std::min(y, 1.5 - y));
        return m.coefficient() * d * std::abs(w) * w;
    };
    auto vel = [&](double x, double y, int c) {
        // u = (∂ψ/∂y, -∂ψ/∂x) with ψ = A sin²(πx) sin²(πy/1.5).
        const double h = 1e-5;
        auto psi = [&](double a, double b) {
            return ms.amplitude * std::pow(std::sin(M_PI * a), 2) * std::pow(std::sin(M_PI * b / 1.5), 2);
        };
        return c == 0 ? (psi(x, y + h) - psi(x, y - h)) / (2 * h) : -(psi(x + h, y) - psi(x - h, y)) / (2 * h);
    };
    const double h = 1e-6;
    // Interior x-face at (0.5, 0.2·1.5 + ...) away from the distance kinks.
    const int i = 4, j = 1;
    const double x = i * g.spacing(0), y = (j + 0.5) * g.spacing(1);
    const double w = ms.vorticity(dom, {x, y, 0.0});
    const double fx = (gfun(x, y + h) - gfun(x, y - h)) / (2 * h) - w * vel(x, y, 1);
    CHECK(f.component(0)(i, j, 0) == doctest::Approx(fx).epsilon(1e-6));
    const int i1 = 2, j1 = 3;
    const double x1 = (i1 + 0.5) * g.spacing(0), y1 = j1 * g.spacing(1);
    const double w1 = ms.vorticity(dom, {x1, y1, 0.0});
    const double fy = -(gfun(x1 + h, y1) - gfun(x1 - h, y1)) / (2 * h) + w1 * vel(x1, y1, 0);
    CHECK(f.component(1)(i1, j1, 0) == doctest::Approx(fy).epsilon(1e-6));
}

TEST_CASE("first order in time on the terminal energy") {
    const Grid g = Grid::uniform(Domain::box2d(1.0, 1.0), {32, 32, 1});
    const ModelParams m = model(3.0, 1.0);
    double e[3];
    for (int k = 0; k < 3; ++k) {
        const double dt = 1e-2 / (1 << k);
        e[k] = run(g, InitialData{}, ForcingSpec::zero(), m, config(dt, 10 << k)).ledger.rows.back().kinetic;
    }
    const double order = std::log2((e[0] - e[1]) / (e[1] - e[2]));
    CHECK(order >= 0.9);
    CHECK(order <= 1.2);
}

TEST_CASE("semi-implicit scheme") {
    const Grid g = Grid::uniform(Domain::box2d(1.0, 1.0), {16, 16, 1});
    SolverConfig c = config(1e-3, 5);
    c.scheme = Scheme::semi_implicit;
    const RunResult r = run(g, InitialData{}, ForcingSpec::zero(), model(3.0, 1.0), c);
    CHECK(r.ledger.rows.back().kinetic < r.ledger.kinetic0);
    CHECK(scheme_from_string(to_string(Scheme::semi_implicit)) == Scheme::semi_implicit);
    CHECK_THROWS_AS(scheme_from_string("rk4"), ArgumentError);
}

TEST_CASE("errors") {
    const Grid g = Grid::uniform(Domain::box2d(1.0, 1.0), {8, 8, 1});
    SUBCASE("non-solenoidal data") {
        Stepper s(g, model(3.0, 1.0), config(1e-2, 1));
        VectorField u = VectorField::from_function(g, [](const Point& x) { return Point{x[0] * (1 - x[0]), 0.0, 0.0}; });
        CHECK_THROWS_AS(s.step(u, VectorField(g)), PreconditionError);
    }
    SUBCASE("configuration") {
        SolverConfig c;
        c.dt = 0.0;
        CHECK_THROWS_AS(c.validate(), ArgumentError);
        c = SolverConfig{};
        c.damping = 1.5;
        CHECK_THROWS_AS(c.validate(), ArgumentError);
        CHECK(SolverConfig{}.damping_for(4.0) == doctest::Approx(0.5));
        CHECK_THROWS_AS(Stepper(g, model(3.0, 2.0), SolverConfig{}), PreconditionError);
        SolverConfig odd = config(0.03, 1);
        odd.t_end = 0.1;
        CHECK_THROWS_AS(run(g, InitialData{}, ForcingSpec::zero(), model(3.0, 1.0), odd), ArgumentError);
    }
    SUBCASE("Picard cap") {
        SolverConfig c = config(1e-1, 1);
        c.picard_max = 2;
        c.anderson_depth = 0;
        CHECK_THROWS_AS(run(g, InitialData{}, ForcingSpec::zero(), model(3.0, 1.0), c), SolverError);
    }
    SUBCASE("grid mismatch and 3D Taylor-Green") {
        const Grid other = Grid::uniform(Domain::box2d(1.0, 1.0), {4, 4, 1});
        Stepper s(g, model(3.0, 1.0), SolverConfig{});
        CHECK_THROWS_AS(s.step(VectorField(other), VectorField(other)), ArgumentError);
        const Grid g3 = Grid::uniform(Domain::box3d(1.0, 1.0, 1.0), {4, 4, 4});
        CHECK_THROWS_AS(InitialData{}.sample(g3), ArgumentError);
        CHECK_THROWS_AS(initial_kind_from_string("vortex"), ArgumentError);
    }
}

TEST_CASE("snapshot round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "rotsmag_snapshot_test";
    std::filesystem::create_directories(dir);
    const Grid g = Grid::uniform(Domain::box3d(1.0, 2.0, 1.0), {4, 6, 5});
    VectorField u(g);
    test::fill_random(u, 11);
    write_snapshot(u, dir / "state");
    const VectorField v = read_vector_snapshot(g, dir / "state");
    for (int c = 0; c < 3; ++c) CHECK(v.component(c).data == u.component(c).data);

    ScalarField q(g);
    test::fill_random(q, 5);
    write_snapshot(q, dir / "state");
    CHECK(read_scalar_snapshot(g, dir / "state").component(0).data == q.component(0).data);

    const Grid h = Grid::uniform(Domain::box3d(1.0, 2.0, 1.0), {4, 6, 4});
    CHECK_THROWS_AS(read_vector_snapshot(h, dir / "state"), ArgumentError);
    {
        std::ofstream bad(dir / "state.u1.bin", std::ios::binary);
        bad << "rotsmag-field dims=3\n";
    }
    CHECK_THROWS_AS(read_vector_snapshot(g, dir / "state"), ArgumentError);
    CHECK_THROWS_AS(read_vector_snapshot(g, dir / "missing"), ArgumentError);

    // Initial data from a file.
    const Grid g2 = Grid::uniform(Domain::box2d(1.0, 1.0), {8, 8, 1});
    const VectorField tg = InitialData{}.sample(g2);
    write_snapshot(tg, dir / "tg");
    InitialData from_file;
    from_file.kind = InitialData::Kind::file;
    from_file.path = dir / "tg";
    CHECK(from_file.sample(g2).component(0).data == tg.component(0).data);
    std::filesystem::remove_all(dir);
}
