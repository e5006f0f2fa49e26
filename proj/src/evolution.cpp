#include "rotsmag/evolution.hpp"

#include <Eigen/QR>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "rotsmag/discrete_ops.hpp"
#include "rotsmag/errors.hpp"
#include "rotsmag/norms.hpp"
#include "rotsmag/operators.hpp"
#include "rotsmag/projection.hpp"
#include "rotsmag/quadrature.hpp"
#include "rotsmag/snapshot.hpp"
#include "rotsmag/weights.hpp"
#include "stencil.hpp"

namespace rotsmag {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

constexpr double pi = std::numbers::pi;

/// Divergence slack accepted by apply_B inside the solver; iterates are
/// solenoidal to round-off (2D) or to the projection tolerance (3D).
constexpr double b_div_tol = 1e-6;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool finite(const VectorField& u) { return u.all_finite(); }

Vec flat(const VectorField& u) {
    std::size_t n = 0;
    for (int c = 0; c < u.grid().dims(); ++c) n += u.component(c).data.size();
    Vec v(static_cast<int>(n));
    int at = 0;
    for (int c = 0; c < u.grid().dims(); ++c)
        for (double x : u.component(c).data) v[at++] = x;
    return v;
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::implicit_euler ? "implicit_euler" : "semi_implicit"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "implicit_euler") return Scheme::implicit_euler;
    if (s == "semi_implicit") return Scheme::semi_implicit;
    throw ArgumentError("unknown scheme '" + s + "'");
}

void SolverConfig::validate() const {
    std::string bad;
    if (!(dt > 0.0)) bad += " dt > 0;";
    if (!(t_end >= 0.0)) bad += " t_end >= 0;";
    if (!(picard_tol > 0.0)) bad += " picard_tol > 0;";
    if (picard_max < 1) bad += " picard_max >= 1;";
    if (damping && !(*damping > 0.0 && *damping <= 1.0)) bad += " damping in (0, 1];";
    if (!(leray_tol > 0.0)) bad += " leray_tol > 0;";
    if (!(linear_tol > 0.0)) bad += " linear_tol > 0;";
    if (snapshot_every < 0) bad += " snapshot_every >= 0;";
    if (anderson_depth < 0) bad += " anderson_depth >= 0;";
    if (!bad.empty()) throw ArgumentError("SolverConfig requires" + bad);
}

double SolverConfig::damping_for(double p) const { return damping ? *damping : std::min(1.0, 2.0 / p); }

void EnergyLedger::write_csv(std::ostream& os) const {
    os << "step,t,kinetic,dissipation_cum,work_cum,scheme_dissipation_cum,residual,picard_iters\n";
    os << 0 << ',' << fmt(0.0) << ',' << fmt(kinetic0) << ",0,0,0,0,0\n";
    double d = 0.0, w = 0.0, s = 0.0;
    for (std::size_t n = 0; n < rows.size(); ++n) {
        const auto& r = rows[n];
        d += r.dissipation;
        w += r.work;
        s += r.scheme_dissipation;
        os << r.step << ',' << fmt(r.t) << ',' << fmt(r.kinetic) << ',' << fmt(d) << ',' << fmt(w) << ','
           << fmt(s) << ',' << fmt(energy_residual(*this, n + 1)) << ',' << r.picard_iterations << '\n';
    }
}

double energy_residual(const EnergyLedger& ledger, std::size_t t_index) {
    if (t_index > ledger.rows.size()) throw ArgumentError("energy_residual: index past the end of the ledger");
    if (t_index == 0) return 0.0;
    double d = 0.0, w = 0.0, wabs = 0.0, s = 0.0;
    for (std::size_t n = 0; n < t_index; ++n) {
        d += ledger.rows[n].dissipation;
        w += ledger.rows[n].work;
        wabs += std::abs(ledger.rows[n].work);
        s += ledger.rows[n].scheme_dissipation;
    }
    const double num = std::abs(ledger.rows[t_index - 1].kinetic + d + s - w - ledger.kinetic0);
    const double den = ledger.kinetic0 + wabs;
    if (num == 0.0 && den == 0.0) return 0.0;
    return num / den;
}

/// Solenoidal space of a 2D grid as the range of K: nodal stream function
/// to faces, u_x = ∂ψ/∂y, u_y = -∂ψ/∂x. ψ vanishes on wall nodes; with one
/// periodic axis the far wall carries one extra unknown (the net flux).
class StreamSpace {
public:
    explicit StreamSpace(const Grid& g) : g_(g) {
        const auto ns = g.edge_shape(0);
        nodes_ = static_cast<std::size_t>(ns[0]) * ns[1];
        int dirichlet = 0;
        for (int a = 0; a < 2; ++a) dirichlet += g.periodic(a) ? 0 : 1;
        dof_.assign(nodes_, -1);
        int next = 0;
        for (int j = 0; j < ns[1]; ++j)
            for (int i = 0; i < ns[0]; ++i) {
                const bool b0 = detail::boundary_node(g, 0, i), b1 = detail::boundary_node(g, 1, j);
                if (!b0 && !b1) dof_[i + ns[0] * j] = next++;
            }
        if (dirichlet == 1) {
            const int wall = g.periodic(0) ? 1 : 0;
            const int flux_dof = next++;
            for (int j = 0; j < ns[1]; ++j)
                for (int i = 0; i < ns[0]; ++i) {
                    const int idx = wall == 0 ? i : j;
                    if (idx == g.cells(wall)) dof_[i + ns[0] * j] = flux_dof;
                }
        }
        ndof_ = next;

        offset_[0] = 0;
        offset_[1] = g.face_shape(0)[0] * g.face_shape(0)[1];
        nfaces_ = offset_[1] + static_cast<std::size_t>(g.face_shape(1)[0]) * g.face_shape(1)[1];

        std::vector<Eigen::Triplet<double>> t;
        auto node = [&](int i, int j) { return dof_[detail::node_wrap(g, 0, i) + ns[0] * detail::node_wrap(g, 1, j)]; };
        auto add = [&](std::size_t row, int dof, double v) {
            if (dof >= 0) t.emplace_back(static_cast<int>(row), dof, v);
        };
        const auto s0 = g.face_shape(0), s1 = g.face_shape(1);
        for (int j = 0; j < s0[1]; ++j)
            for (int i = 0; i < s0[0]; ++i) {
                if (detail::boundary_node(g, 0, i)) continue;
                const std::size_t row = offset_[0] + i + s0[0] * j;
                add(row, node(i, j + 1), 1.0 / g.spacing(1));
                add(row, node(i, j), -1.0 / g.spacing(1));
            }
        for (int j = 0; j < s1[1]; ++j)
            for (int i = 0; i < s1[0]; ++i) {
                if (detail::boundary_node(g, 1, j)) continue;
                const std::size_t row = offset_[1] + i + s1[0] * j;
                add(row, node(i + 1, j), -1.0 / g.spacing(0));
                add(row, node(i, j), 1.0 / g.spacing(0));
            }
        K_.resize(static_cast<int>(nfaces_), ndof_);
        K_.setFromTriplets(t.begin(), t.end());

        // Node vorticity from faces, identical to curl().
        std::array<std::array<int, 3>, 3> shapes{};
        shapes[0] = s0;
        shapes[1] = s1;
        t.clear();
        std::array<detail::FaceTerm, 4> terms;
        for (int j = 0; j < ns[1]; ++j)
            for (int i = 0; i < ns[0]; ++i) {
                const int n = detail::curl_stencil(g, shapes, 2, {i, j, 0}, terms);
                for (int m = 0; m < n; ++m)
                    t.emplace_back(i + ns[0] * j, static_cast<int>(offset_[terms[m].component] + terms[m].index),
                                   terms[m].coef);
            }
        SpMat C(static_cast<int>(nodes_), static_cast<int>(nfaces_));
        C.setFromTriplets(t.begin(), t.end());
        CK_ = C * K_;
        KtK_ = SpMat(K_.transpose() * K_) * g.cell_volume();

        corner_node_.resize(corner::count(g));
        corner::for_each(g, [&](int i, int j, int k, int s, std::size_t q) {
            corner_node_[q] = static_cast<int>(corner::edge_index(g, 0, i, j, k, s));
        });

        // Pattern of A: union of KᵀK and (CK)ᵀ(CK), then per-node contribution lists.
        SpMat pattern = KtK_;
        pattern += SpMat(CK_.transpose() * CK_);
        pattern.makeCompressed();
        A_ = pattern;
        auto entry = [&](int r, int c) {
            const int* inner = A_.innerIndexPtr();
            const int* lo = inner + A_.outerIndexPtr()[c];
            const int* hi = inner + A_.outerIndexPtr()[c + 1];
            const int* it = std::lower_bound(lo, hi, r);
            return static_cast<int>(it - inner);
        };
        mass_.assign(A_.nonZeros(), 0.0);
        for (int c = 0; c < KtK_.outerSize(); ++c)
            for (SpMat::InnerIterator e(KtK_, c); e; ++e) mass_[entry(e.row(), e.col())] += e.value();
        Eigen::SparseMatrix<double, Eigen::RowMajor> rows = CK_;
        for (int n = 0; n < rows.outerSize(); ++n)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator a(rows, n); a; ++a)
                for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator b(rows, n); b; ++b)
                    contrib_.push_back({entry(static_cast<int>(a.col()), static_cast<int>(b.col())), n,
                                        a.value() * b.value()});
        w_.assign(nodes_, 0.0);
    }

    int dofs() const { return ndof_; }

    Vec flatten(const VectorField& u) const {
        Vec v(static_cast<int>(nfaces_));
        for (int c = 0; c < 2; ++c) {
            const auto& d = u.component(c).data;
            for (std::size_t f = 0; f < d.size(); ++f) v[static_cast<int>(offset_[c] + f)] = d[f];
        }
        return v;
    }

    VectorField unflatten(const Vec& v) const {
        VectorField u(g_);
        for (int c = 0; c < 2; ++c) {
            auto& d = u.component(c).data;
            for (std::size_t f = 0; f < d.size(); ++f) d[f] = v[static_cast<int>(offset_[c] + f)];
        }
        return u;
    }

    VectorField velocity(const Vec& psi) const { return unflatten(K_ * psi); }

    /// Kᵀ M_F r.
    Vec load(const VectorField& r) const { return K_.transpose() * flatten(r) * g_.cell_volume(); }

    /// (1/dt) Kᵀ M_F K + (C K)ᵀ W (C K), W the corner coefficient summed per
    /// node. The sparsity pattern is fixed, so only values are rewritten.
    const SpMat& system(const std::vector<double>& kappa, double dt) {
        std::fill(w_.begin(), w_.end(), 0.0);
        const double vol = corner::volume(g_);
        for (std::size_t q = 0; q < kappa.size(); ++q) w_[corner_node_[q]] += vol * kappa[q];
        double* val = A_.valuePtr();
        for (std::size_t e = 0; e < mass_.size(); ++e) val[e] = mass_[e] / dt;
        for (const auto& c : contrib_) val[c.entry] += w_[c.node] * c.coef;
        return A_;
    }

private:
    Grid g_;
    std::size_t nodes_ = 0, nfaces_ = 0;
    std::array<std::size_t, 2> offset_{};
    std::vector<int> dof_;
    int ndof_ = 0;
    SpMat K_, CK_, KtK_, A_;
    std::vector<int> corner_node_;
    struct Contribution {
        int entry;
        int node;
        double coef;
    };
    std::vector<Contribution> contrib_;
    std::vector<double> mass_, w_;
};

struct Stepper::Impl {
    Grid grid;
    ModelParams params;
    SolverConfig cfg;
    WeightSamples weights;
    LerayProjector projector;
    double theta;

    std::unique_ptr<StreamSpace> space;
    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool factored = false;
    int last_pcg = 0;
    Vec psi;

    Impl(const Grid& g, const ModelParams& p, const SolverConfig& c)
        : grid(g),
          params(p),
          cfg(c),
          weights(weight_field(g, p.mixing, p.alpha)),
          projector(g, PoissonOptions{c.leray_tol, 0, true}),
          theta(c.damping_for(p.p)) {
        if (g.dims() == 2) {
            space = std::make_unique<StreamSpace>(g);
            psi = Vec::Zero(space->dofs());
        }
    }

    /// Solve (1/dt + K_κ) v = r on the solenoidal space. `warm` is a
    /// solenoidal initial guess.
    VectorField solve(const std::vector<double>& kappa, const VectorField& r, const VectorField& warm, double tol,
                      StepStats& stats) {
        if (space) return solve_stream(kappa, r, tol, stats);
        return solve_projected(kappa, r, warm, tol, stats);
    }

    VectorField solve_stream(const std::vector<double>& kappa, const VectorField& r, double tol, StepStats& stats) {
        const SpMat& A = space->system(kappa, cfg.dt);
        const Vec b = space->load(r);
        if (b.norm() == 0.0) {
            psi.setZero();
            return space->velocity(psi);
        }
        auto factor = [&] {
            ldlt.compute(A);
            if (ldlt.info() != Eigen::Success) throw SolverError("sparse factorization failed", 0.0);
            factored = true;
            ++stats.factorizations;
        };
        if (!factored || last_pcg > 8) factor();
        // Normwise backward error ‖b - Ax‖∞ / (‖A‖∞‖x‖∞ + ‖b‖∞).
        double a_inf = 0.0;
        {
            Vec rows = Vec::Zero(A.rows());
            for (int c = 0; c < A.outerSize(); ++c)
                for (SpMat::InnerIterator e(A, c); e; ++e) rows[e.row()] += std::abs(e.value());
            a_inf = rows.maxCoeff();
        }
        const double b_inf = b.lpNorm<Eigen::Infinity>();
        auto backward = [&](const Vec& x, const Vec& r) {
            return r.lpNorm<Eigen::Infinity>() / (a_inf * x.lpNorm<Eigen::Infinity>() + b_inf);
        };
        // Preconditioned CG with the (possibly stale) factorization.
        Vec x = psi;
        Vec res = b - A * x;
        Vec z = ldlt.solve(res);
        Vec d = z;
        double rz = res.dot(z);
        int it = 0;
        const int cap = 25;
        // r·M⁻¹r estimates ‖x* - x‖²_A; x·b estimates ‖x*‖²_A.
        auto converged = [&] { return rz <= tol * tol * std::abs(x.dot(b)) && rz >= 0.0; };
        while (!converged() && it < cap) {
            const Vec Ad = A * d;
            const double a = rz / d.dot(Ad);
            x += a * d;
            res -= a * Ad;
            z = ldlt.solve(res);
            const double rz_new = res.dot(z);
            d = z + (rz_new / rz) * d;
            rz = rz_new;
            ++it;
        }
        stats.linear_iterations += it;
        last_pcg = it;
        if (!converged()) {
            // Refresh the factorization and take the direct solution plus one refinement sweep.
            factor();
            x = ldlt.solve(b);
            x += ldlt.solve(b - A * x);
            last_pcg = 0;
            const double err = backward(x, b - A * x);
            if (!(err <= 1e-12)) {
                throw SolverError("linear solve did not reach the tolerance", err);
            }
        }
        psi = x;
        return space->velocity(x);
    }

    VectorField unflat(const Vec& v) const {
        VectorField u(grid);
        int at = 0;
        for (int c = 0; c < grid.dims(); ++c)
            for (double& x : u.component(c).data) x = v[at++];
        return u;
    }

    /// Projection of a field of any magnitude; the absolute divergence
    /// tolerance is scaled by max(1, max|u| / h_min).
    std::pair<VectorField, ScalarField> project_scaled(const VectorField& u) const {
        double h = grid.spacing(0);
        for (int a = 1; a < grid.dims(); ++a) h = std::min(h, grid.spacing(a));
        const double scale = std::max(1.0, u.max_abs() / h);
        auto [v, phi] = projector.project((1.0 / scale) * u);
        v *= scale;
        phi *= scale;
        return {std::move(v), std::move(phi)};
    }

    VectorField apply_linear(const std::vector<double>& kappa, const VectorField& v) const {
        VectorField a = weighted_curl_curl(v, kappa);
        a.axpy(1.0 / cfg.dt, v);
        return a;
    }

    VectorField solve_projected(const std::vector<double>& kappa, const VectorField& r, const VectorField& warm,
                                double tol, StepStats& stats) {
        const VectorField b = project_scaled(r).first;
        const double bn = l2_norm(b);
        VectorField x = warm;
        if (bn == 0.0) return VectorField(grid);
        VectorField res = project_scaled(b - apply_linear(kappa, x)).first;
        VectorField d = res;
        double rr = inner(res, res);
        const int cap = 20 * static_cast<int>(grid.cell_count());
        int it = 0;
        while (std::sqrt(rr) > tol * bn) {
            if (it >= cap) throw SolverError("projected CG hit the iteration cap", std::sqrt(rr) / bn);
            const VectorField Ad = project_scaled(apply_linear(kappa, d)).first;
            const double a = rr / inner(d, Ad);
            x.axpy(a, d);
            res.axpy(-a, Ad);
            const double rr_new = inner(res, res);
            d *= rr_new / rr;
            d += res;
            rr = rr_new;
            ++it;
        }
        stats.linear_iterations += it;
        return x;
    }

    StepResult step(const VectorField& u, const VectorField& f, double t) {
        if (!(u.grid() == grid) || !(f.grid() == grid)) throw ArgumentError("step: field grid mismatch");
        const double div = divergence(u).max_abs();
        if (div > std::max(cfg.leray_tol, b_div_tol * std::max(1.0, u.max_abs() / grid.spacing(0)))) {
            throw PreconditionError("step: initial state is not divergence-free (max |div u| = " + fmt(div) + ")");
        }
        const double dt = cfg.dt;
        StepStats stats;
        const VectorField b_explicit =
            cfg.scheme == Scheme::semi_implicit ? apply_B(u, b_div_tol) : VectorField(grid);

        VectorField v = u;
        VectorField next(grid);
        std::vector<double> kappa;
        VectorField rhs(grid);
        bool done = false;
        double update = 0.0, prev_update = 1e-4;
        const int depth = cfg.anderson_depth;
        std::vector<Vec> dx, df;
        Vec x_prev, f_prev;
        for (int k = 1; k <= cfg.picard_max; ++k) {
            rhs = (1.0 / dt) * u;
            rhs += f;
            rhs -= cfg.scheme == Scheme::semi_implicit ? b_explicit : apply_B(v, b_div_tol);
            kappa = stress_coefficient(v, params, weights);
            // Inner solves only need to track the outer update until the last one.
            const double tol = std::max(cfg.linear_tol, std::min(1e-6, 1e-2 * prev_update));
            next = solve(kappa, rhs, v, tol, stats);
            if (!finite(next)) throw NumericError("step: non-finite values in the Picard iterate");
            auto measure = [&] {
                const double nn = l2_norm(next);
                const double dn = l2_norm(next - v);
                return nn > 0.0 ? dn / nn : dn;
            };
            update = measure();
            if (update < cfg.picard_tol && tol > cfg.linear_tol) {
                // Only a fully converged solve may be accepted.
                next = solve(kappa, rhs, next, cfg.linear_tol, stats);
                update = measure();
            }
            stats.updates.push_back(update);
            stats.picard_iterations = k;
            if (update < cfg.picard_tol || (next.max_abs() == 0.0 && v.max_abs() == 0.0)) {
                done = true;
                break;
            }
            // Damped iteration with Anderson mixing over the last `depth` residuals.
            const Vec x = flat(v);
            const Vec fk = flat(next) - x;
            if (update > 2.0 * prev_update) {
                dx.clear();
                df.clear();
            } else if (k > 1 && depth > 0) {
                dx.push_back(x - x_prev);
                df.push_back(fk - f_prev);
                if (static_cast<int>(dx.size()) > depth) {
                    dx.erase(dx.begin());
                    df.erase(df.begin());
                }
            }
            x_prev = x;
            f_prev = fk;
            prev_update = update;
            Vec xn = x + theta * fk;
            if (!df.empty()) {
                Eigen::MatrixXd F(fk.size(), static_cast<int>(df.size()));
                for (std::size_t c = 0; c < df.size(); ++c) F.col(static_cast<int>(c)) = df[c];
                const Vec gamma = F.colPivHouseholderQr().solve(fk);
                for (std::size_t c = 0; c < df.size(); ++c) xn -= gamma[static_cast<int>(c)] * (dx[c] + theta * df[c]);
            }
            v = unflat(xn);
        }
        if (!done) throw SolverError("Picard iteration did not converge within picard_max", update);

        // The multiplier: ∇q is the gradient part of the residual of the frozen system.
        VectorField resid = rhs - apply_linear(kappa, next);
        StepResult out{next, project_scaled(resid).second, {}, stats};

        const double C = params.coefficient();
        EnergyLedgerRow& row = out.row;
        row.t = t + dt;
        row.kinetic = 0.5 * inner(next, next);
        row.dissipation = dt * C * std::pow(v_norm(next, params, weights).value, params.p);
        row.work = dt * inner(f, next);
        const VectorField jump = next - u;
        row.scheme_dissipation = 0.5 * inner(jump, jump);
        row.balance_residual =
            row.kinetic + row.dissipation + row.scheme_dissipation - row.work - 0.5 * inner(u, u);
        row.picard_iterations = stats.picard_iterations;
        return out;
    }
};

Stepper::Stepper(const Grid& grid, const ModelParams& params, const SolverConfig& config) {
    config.validate();
    params.require_solver_range();
    impl_ = std::make_unique<Impl>(grid, params, config);
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

StepResult Stepper::step(const VectorField& u, const VectorField& f_next, double t) {
    return impl_->step(u, f_next, t);
}

VectorField Stepper::project(const VectorField& u) const { return impl_->projector(u); }

const Grid& Stepper::grid() const noexcept { return impl_->grid; }

StepResult step(const VectorField& u, const VectorField& f_next, const ModelParams& params,
                const SolverConfig& config) {
    Stepper s(u.grid(), params, config);
    return s.step(u, f_next);
}

std::string to_string(InitialData::Kind k) {
    switch (k) {
        case InitialData::Kind::taylor_green_2d: return "taylor_green_2d";
        case InitialData::Kind::random_bump_projected: return "random_bump_projected";
        case InitialData::Kind::file: return "file";
    }
    return "?";
}

InitialData::Kind initial_kind_from_string(const std::string& s) {
    for (auto k : {InitialData::Kind::taylor_green_2d, InitialData::Kind::random_bump_projected,
                   InitialData::Kind::file}) {
        if (to_string(k) == s) return k;
    }
    throw ArgumentError("unknown initial data kind '" + s + "'");
}

VectorField InitialData::sample(const Grid& grid) const {
    switch (kind) {
        case Kind::taylor_green_2d: {
            if (grid.dims() != 2) throw ArgumentError("taylor_green_2d initial data needs a 2D grid");
            const double lx = grid.domain().extents[0], ly = grid.domain().extents[1];
            const double A = amplitude;
            return VectorField::from_function(grid, [&](const Point& x) {
                const double a = pi * x[0] / lx, b = pi * x[1] / ly;
                return Point{A * std::sin(a) * std::cos(b), -A * std::cos(a) * std::sin(b), 0.0};
            });
        }
        case Kind::random_bump_projected: {
            FieldSampler sampler(grid, seed);
            VectorField u = sampler.next();
            u *= amplitude;
            return u;
        }
        case Kind::file: return read_vector_snapshot(grid, path);
    }
    throw ArgumentError("unknown initial data kind");
}

ForcingSpec ForcingSpec::zero() {
    return {[](const Grid& g, double) { return VectorField(g); }};
}

ForcingSpec ForcingSpec::steady(VectorField f) {
    return {[f = std::move(f)](const Grid& g, double) {
        if (!(f.grid() == g)) throw ArgumentError("steady forcing lives on a different grid");
        return f;
    }};
}

RunResult run(const Grid& grid, const InitialData& init, const ForcingSpec& forcing, const ModelParams& params,
              const SolverConfig& config) {
    config.validate();
    const double ratio = config.t_end / config.dt;
    const long long steps = std::llround(ratio);
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
        throw ArgumentError("run: t_end must be an integer multiple of dt");
    }
    Stepper stepper(grid, params, config);
    VectorField u = init.sample(grid);
    if (!finite(u)) throw NumericError("run: initial data is not finite");
    u = stepper.project(u);

    RunResult out{u, {}, {}, {}};
    out.ledger.kinetic0 = 0.5 * inner(u, u);
    auto keep = [&](int n, double t, const VectorField& s) {
        out.trajectory.steps.push_back(n);
        out.trajectory.times.push_back(t);
        out.trajectory.states.push_back(s);
    };
    keep(0, 0.0, u);
    out.trajectory.max_l2 = l2_norm(u);
    for (long long n = 1; n <= steps; ++n) {
        const double t = static_cast<double>(n - 1) * config.dt;
        StepResult r = stepper.step(u, forcing.at(grid, t + config.dt), t);
        r.row.step = static_cast<int>(n);
        out.ledger.rows.push_back(r.row);
        out.stats.push_back(std::move(r.stats));
        u = std::move(r.u);
        out.trajectory.max_l2 = std::max(out.trajectory.max_l2, l2_norm(u));
        if ((config.snapshot_every > 0 && n % config.snapshot_every == 0) || n == steps) {
            if (out.trajectory.steps.back() != n) keep(static_cast<int>(n), r.row.t, u);
        }
    }
    out.final_state = u;
    return out;
}

namespace {

struct Profile {
    double s, s1, s2, s3;
};

/// sin²(πt) and its first three derivatives in t.
Profile profile(double t) {
    return {std::pow(std::sin(pi * t), 2), pi * std::sin(2 * pi * t), 2 * pi * pi * std::cos(2 * pi * t),
            -4 * pi * pi * pi * std::sin(2 * pi * t)};
}

}  // namespace

VectorField ManufacturedSolution::velocity(const Grid& grid) const {
    if (grid.dims() != 2) throw ArgumentError("manufactured solution is two-dimensional");
    const double lx = grid.domain().extents[0], ly = grid.domain().extents[1];
    const double A = amplitude;
    return VectorField::from_function(grid, [&](const Point& x) {
        const Profile X = profile(x[0] / lx), Y = profile(x[1] / ly);
        return Point{A * X.s * Y.s1 / ly, -A * X.s1 / lx * Y.s, 0.0};
    });
}

double ManufacturedSolution::vorticity(const Domain& domain, const Point& x) const {
    const double lx = domain.extents[0], ly = domain.extents[1];
    const Profile X = profile(x[0] / lx), Y = profile(x[1] / ly);
    return -amplitude * (X.s2 / (lx * lx) * Y.s + X.s * Y.s2 / (ly * ly));
}

VectorField ManufacturedSolution::forcing(const Grid& grid, const ModelParams& params) const {
    if (grid.dims() != 2) throw ArgumentError("manufactured solution is two-dimensional");
    const Domain& dom = grid.domain();
    if (!(dom.wall_axes[0] && dom.wall_axes[1])) throw ArgumentError("manufactured solution needs walls on both axes");
    const double lx = dom.extents[0], ly = dom.extents[1];
    const double A = amplitude, C = params.coefficient(), p = params.p, alpha = params.alpha;
    if (params.mixing.variant != MixingLength::Variant::distance) {
        throw ArgumentError("manufactured forcing is implemented for l = d");
    }
    return VectorField::from_function(grid, [&](const Point& x) {
        const Profile X = profile(x[0] / lx), Y = profile(x[1] / ly);
        const double ux = A * X.s * Y.s1 / ly, uy = -A * X.s1 / lx * Y.s;
        const double w = -A * (X.s2 / (lx * lx) * Y.s + X.s * Y.s2 / (ly * ly));
        const double wx = -A * (X.s3 / (lx * lx * lx) * Y.s + X.s1 / lx * Y.s2 / (ly * ly));
        const double wy = -A * (X.s2 / (lx * lx) * Y.s1 / ly + X.s * Y.s3 / (ly * ly * ly));
        const double aw = std::abs(w);
        const double mag = (p == 2.0) ? 1.0 : (aw == 0.0 ? 0.0 : std::pow(aw, p - 2.0));
        // g = C d^α |ω|^{p-2} ω; ∇(|ω|^{p-2} ω) = (p-1)|ω|^{p-2} ∇ω.
        double gx = (p - 1.0) * mag * wx, gy = (p - 1.0) * mag * wy;
        if (alpha != 0.0) {
            const double cand[4] = {x[0], lx - x[0], x[1], ly - x[1]};
            const int m = static_cast<int>(std::min_element(cand, cand + 4) - cand);
            const double d = cand[m];
            const double dd = std::pow(d, alpha), ddd = alpha * std::pow(d, alpha - 1.0);
            const double nx = m == 0 ? 1.0 : (m == 1 ? -1.0 : 0.0);
            const double ny = m == 2 ? 1.0 : (m == 3 ? -1.0 : 0.0);
            gx = dd * gx + ddd * nx * mag * w;
            gy = dd * gy + ddd * ny * mag * w;
        }
        gx *= C;
        gy *= C;
        // curlᵀ g = (∂g/∂y, -∂g/∂x); ω × u = (-ω u_y, ω u_x).
        return Point{gy - w * uy, -gx + w * ux, 0.0};
    });
}

}  // namespace rotsmag
