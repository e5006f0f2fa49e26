#include "rotsmag/projection.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "rotsmag/discrete_ops.hpp"
#include "rotsmag/errors.hpp"

namespace rotsmag {

namespace {

/// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

struct LerayProjector::Impl {
    Grid grid;
    PoissonOptions opt;
    std::size_t n = 0;
    double* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<double> inv_eigen;  // includes FFT normalisation

    Impl(const Grid& g, PoissonOptions o) : grid(g), opt(o), n(g.cell_count()) {
        if (opt.max_iterations <= 0) opt.max_iterations = static_cast<int>(10 * n);
        if (opt.spectral_preconditioner) build_spectral();
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buffer) fftw_free(buffer);
    }

    void build_spectral() {
        const int d = grid.dims();
        // FFTW is row-major (last index fastest); Array3 has axis 0 fastest.
        int dims_rev[3];
        fftw_r2r_kind fwd[3], bwd[3];
        double norm = 1.0;
        for (int r = 0; r < d; ++r) {
            const int axis = d - 1 - r;
            dims_rev[r] = grid.cells(axis);
            if (grid.periodic(axis)) {
                fwd[r] = bwd[r] = FFTW_DHT;
                norm *= grid.cells(axis);
            } else {
                fwd[r] = FFTW_REDFT10;
                bwd[r] = FFTW_REDFT01;
                norm *= 2.0 * grid.cells(axis);
            }
        }
        {
            std::lock_guard lock(planner_mutex());
            buffer = static_cast<double*>(fftw_malloc(sizeof(double) * n));
            forward = fftw_plan_r2r(d, dims_rev, buffer, buffer, fwd, FFTW_ESTIMATE);
            backward = fftw_plan_r2r(d, dims_rev, buffer, buffer, bwd, FFTW_ESTIMATE);
        }
        std::array<std::vector<double>, 3> lam;
        for (int a = 0; a < 3; ++a) {
            const int m = grid.cells(a);
            lam[a].assign(m, 0.0);
            if (a >= d) continue;
            const double h2 = grid.spacing(a) * grid.spacing(a);
            const double period = grid.periodic(a) ? 2.0 : 1.0;
            for (int k = 0; k < m; ++k) {
                lam[a][k] = (2.0 - 2.0 * std::cos(period * std::numbers::pi * k / m)) / h2;
            }
        }
        inv_eigen.resize(n);
        const auto& c = grid.cells();
        std::size_t idx = 0;
        for (int k = 0; k < c[2]; ++k)
            for (int j = 0; j < c[1]; ++j)
                for (int i = 0; i < c[0]; ++i, ++idx) {
                    const double l = lam[0][i] + lam[1][j] + lam[2][k];
                    inv_eigen[idx] = l > 0.0 ? 1.0 / (l * norm) : 0.0;
                }
    }

    /// y = -div grad x on cell arrays.
    void apply_negative_laplacian(const std::vector<double>& x, std::vector<double>& y) const {
        ScalarField f(grid);
        f.component(0).data = x;
        ScalarField lap = divergence(gradient(f));
        y = std::move(lap.component(0).data);
        for (double& v : y) v = -v;
    }

    void precondition(const std::vector<double>& r, std::vector<double>& z) const {
        if (!forward) {
            z = r;
            return;
        }
        std::copy(r.begin(), r.end(), buffer);
        fftw_execute(forward);
        for (std::size_t i = 0; i < n; ++i) buffer[i] *= inv_eigen[i];
        fftw_execute(backward);
        z.assign(buffer, buffer + n);
        double mean = 0.0;
        for (double v : z) mean += v;
        mean /= static_cast<double>(n);
        for (double& v : z) v -= mean;
    }
};

LerayProjector::LerayProjector(const Grid& grid, PoissonOptions options)
    : impl_(std::make_unique<Impl>(grid, options)) {}
LerayProjector::~LerayProjector() = default;
LerayProjector::LerayProjector(LerayProjector&&) noexcept = default;
LerayProjector& LerayProjector::operator=(LerayProjector&&) noexcept = default;

const Grid& LerayProjector::grid() const noexcept { return impl_->grid; }
const PoissonOptions& LerayProjector::options() const noexcept { return impl_->opt; }

ScalarField LerayProjector::solve_poisson(const ScalarField& rhs, PoissonStats* stats) const {
    const Impl& m = *impl_;
    // Solve (-L) x = -rhs on mean-free cell vectors.
    std::vector<double> b = rhs.component(0).data;
    double mean = 0.0;
    for (double v : b) mean += v;
    mean /= static_cast<double>(b.size());
    for (double& v : b) v = -(v - mean);

    std::vector<double> x(m.n, 0.0), r = b, z, p, Ap;
    double res = max_abs(r);
    int it = 0;
    if (res > m.opt.tol) {
        m.precondition(r, z);
        p = z;
        double rz = dot(r, z);
        for (it = 1; it <= m.opt.max_iterations; ++it) {
            m.apply_negative_laplacian(p, Ap);
            const double pAp = dot(p, Ap);
            if (!(pAp > 0.0)) break;
            const double step = rz / pAp;
            for (std::size_t i = 0; i < m.n; ++i) {
                x[i] += step * p[i];
                r[i] -= step * Ap[i];
            }
            res = max_abs(r);
            if (res <= m.opt.tol) break;
            m.precondition(r, z);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < m.n; ++i) p[i] = z[i] + beta * p[i];
        }
        // Re-evaluate the true residual; recursion drift would hide stagnation.
        m.apply_negative_laplacian(x, Ap);
        res = 0.0;
        for (std::size_t i = 0; i < m.n; ++i) res = std::max(res, std::abs(b[i] - Ap[i]));
        if (res > m.opt.tol) {
            throw SolverError("Poisson CG did not reach tolerance within " +
                                  std::to_string(m.opt.max_iterations) + " iterations",
                              res);
        }
    }
    if (stats) *stats = {it, res};
    ScalarField phi(m.grid);
    phi.component(0).data = std::move(x);
    return phi;
}

std::pair<VectorField, ScalarField> LerayProjector::project(const VectorField& u,
                                                            PoissonStats* stats) const {
    ScalarField phi = solve_poisson(divergence(u), stats);
    VectorField out = u;
    out -= gradient(phi);
    return {std::move(out), std::move(phi)};
}

std::pair<VectorField, ScalarField> leray_project(const VectorField& u, double tol) {
    if (!(tol > 0.0)) throw ArgumentError("leray_project: tol must be > 0");
    PoissonOptions opt;
    opt.tol = tol;
    return LerayProjector(u.grid(), opt).project(u);
}

}  // namespace rotsmag
