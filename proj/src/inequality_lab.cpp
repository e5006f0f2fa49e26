#include "rotsmag/inequality_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "rotsmag/discrete_ops.hpp"
#include "rotsmag/errors.hpp"
#include "rotsmag/norms.hpp"
#include "rotsmag/operators.hpp"
#include "rotsmag/quadrature.hpp"
#include "rotsmag/weights.hpp"

namespace rotsmag {

namespace {

const MixingLength wall_distance{};

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * std::ldexp(static_cast<double>(rng() >> 11), -53);
}

/// Smooth bump supported in the unit ball.
double bump(double r) {
    if (r >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

struct Shape {
    enum class Form { bumps, polynomial };
    Form form = Form::bumps;
    struct Bump {
        Point centre{};
        double radius = 1.0;
        Point amp{};
    };
    std::vector<Bump> bumps;
    // polynomial: box [lo, hi] per axis and amplitudes
    Point lo{}, hi{}, amp{};
};

/// Coordinates of a box-shaped region in which shapes live, with axes
/// that wrap.
struct Region {
    int dims = 3;
    Point lo{}, hi{};
    std::array<bool, 3> periodic{};
    /// Minimum distance of the support from non-periodic faces.
    double margin = 0.0;
    double min_radius = 0.0;
};

Shape draw_shape(std::mt19937_64& rng, const Region& reg, TestFunctionFamily::Kind kind) {
    Shape s;
    double room = std::numeric_limits<double>::infinity();
    for (int a = 0; a < reg.dims; ++a) room = std::min(room, reg.hi[a] - reg.lo[a]);
    if (kind == TestFunctionFamily::Kind::tensor_polynomial) {
        s.form = Shape::Form::polynomial;
        for (int a = 0; a < 3; ++a) {
            if (a >= reg.dims) continue;
            const double lo = reg.periodic[a] ? reg.lo[a] : reg.lo[a] + reg.margin;
            const double hi = reg.periodic[a] ? reg.hi[a] : reg.hi[a] - reg.margin;
            const double len = hi - lo;
            const double wmin = std::max(0.4 * len, 2.0 * reg.min_radius);
            if (wmin > 0.9 * len) throw ArgumentError("test functions do not fit the grid");
            const double w = uniform(rng, wmin, 0.9 * len);
            s.lo[a] = uniform(rng, lo, hi - w);
            s.hi[a] = s.lo[a] + w;
        }
        for (int a = 0; a < 3; ++a) s.amp[a] = uniform(rng, -1.0, 1.0);
        return s;
    }
    const double rmax = std::max(reg.min_radius, 0.3 * room - reg.margin);
    for (int m = 0; m < 3; ++m) {
        Shape::Bump b;
        b.radius = uniform(rng, reg.min_radius, rmax);
        for (int a = 0; a < 3; ++a) {
            if (a >= reg.dims) {
                b.centre[a] = 0.0;
                b.amp[a] = 0.0;
                continue;
            }
            double lo = reg.lo[a], hi = reg.hi[a];
            if (!reg.periodic[a]) {
                lo += reg.margin + b.radius;
                hi -= reg.margin + b.radius;
                if (!(hi >= lo)) throw ArgumentError("test functions do not fit the grid");
            }
            b.centre[a] = uniform(rng, lo, hi);
            b.amp[a] = uniform(rng, -1.0, 1.0);
        }
        if (reg.dims == 2) b.amp[2] = uniform(rng, -1.0, 1.0);
        s.bumps.push_back(b);
    }
    return s;
}

/// Vector value of a shape at x; the scalar value is entry 2 in 2D and the
/// first entry otherwise.
Point eval_shape(const Shape& s, const Region& reg, const Point& x) {
    Point v{0.0, 0.0, 0.0};
    if (s.form == Shape::Form::polynomial) {
        double f = 1.0;
        for (int a = 0; a < reg.dims; ++a) {
            if (x[a] <= s.lo[a] || x[a] >= s.hi[a]) return v;
            const double t = (x[a] - s.lo[a]) * (s.hi[a] - x[a]) / std::pow(0.5 * (s.hi[a] - s.lo[a]), 2);
            f *= t * t * (1.0 + 0.5 * (x[a] - s.lo[a]) / (s.hi[a] - s.lo[a]));
        }
        for (int a = 0; a < 3; ++a) v[a] = s.amp[a] * f;
        return v;
    }
    for (const auto& b : s.bumps) {
        double r2 = 0.0;
        for (int a = 0; a < reg.dims; ++a) {
            double dx = x[a] - b.centre[a];
            if (reg.periodic[a]) {
                const double L = reg.hi[a] - reg.lo[a];
                dx -= L * std::round(dx / L);
            }
            r2 += dx * dx;
        }
        const double e = bump(std::sqrt(r2) / b.radius);
        for (int a = 0; a < 3; ++a) v[a] += b.amp[a] * e;
    }
    return v;
}

Region grid_region(const Grid& g, double margin_cells, double band_limit) {
    Region r;
    r.dims = g.dims();
    double hmax = 0.0;
    for (int a = 0; a < g.dims(); ++a) {
        r.lo[a] = g.origin()[a];
        r.hi[a] = g.origin()[a] + g.cells(a) * g.spacing(a);
        r.periodic[a] = g.periodic(a);
        hmax = std::max(hmax, g.spacing(a));
    }
    r.margin = margin_cells * hmax;
    r.min_radius = band_limit * hmax;
    return r;
}

EdgeField sample_potential(const Grid& g, const std::function<Point(const Point&)>& psi) {
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
    return e;
}

double pth_root(double v, double p) { return std::pow(v, 1.0 / p); }

void require(bool ok, const std::string& msg) {
    if (!ok) throw ArgumentError(msg);
}

void require_not_critical(double p, double alpha, const char* who) {
    if (std::abs(alpha - (p - 1.0)) < 1e-12) {
        throw PreconditionError(std::string(who) + ": alpha = p-1 is excluded");
    }
}

template <class Field>
double hardy_ratio_impl(const Field& f, double p, double alpha) {
    require(p > 1.0, "hardy_ratio: p must exceed 1");
    require_not_critical(p, alpha, "hardy_ratio");
    const Grid& g = f.grid();
    const double lhs = weighted_power_integral(f, power_samples(g, wall_distance, alpha - p), p);
    const double rhs = weighted_gradient_integral(f, power_samples(g, wall_distance, alpha), p);
    if (!(rhs > 0.0)) throw ArgumentError("hardy_ratio: gradient norm is zero");
    return pth_root(lhs, p) / pth_root(rhs, p);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string to_string(TestFunctionFamily::Kind kind) {
    switch (kind) {
        case TestFunctionFamily::Kind::random_bumps: return "random_bumps";
        case TestFunctionFamily::Kind::near_wall_concentrating: return "near_wall_concentrating";
        case TestFunctionFamily::Kind::tensor_polynomial: return "tensor_polynomial";
    }
    return "?";
}

TestFunctionFamily::Kind family_kind_from_string(const std::string& s) {
    for (auto k : {TestFunctionFamily::Kind::random_bumps, TestFunctionFamily::Kind::near_wall_concentrating,
                   TestFunctionFamily::Kind::tensor_polynomial}) {
        if (to_string(k) == s) return k;
    }
    throw ArgumentError("unknown test function family '" + s + "'");
}

void TestFunctionFamily::validate() const {
    require(count >= 1, "TestFunctionFamily: count must be >= 1");
    require(band_limit > 0.0, "TestFunctionFamily: band_limit must be > 0");
    require(concentration_levels >= 1, "TestFunctionFamily: concentration_levels must be >= 1");
    require(delta0 > 0.0 && level_ratio > 1.0, "TestFunctionFamily: delta0 > 0 and level_ratio > 1 required");
    require(window_cells >= 8, "TestFunctionFamily: window_cells must be >= 8");
}

std::vector<ScalarField> TestFunctionFamily::scalars(const Grid& grid) const {
    validate();
    const Region reg = grid_region(grid, 1.0, band_limit);
    std::mt19937_64 rng(seed);
    std::vector<ScalarField> out;
    for (int n = 0; n < count; ++n) {
        const Shape s = draw_shape(rng, reg, kind == Kind::tensor_polynomial ? kind : Kind::random_bumps);
        const int slot = grid.dims() == 2 && s.form == Shape::Form::bumps ? 2 : 0;
        out.push_back(ScalarField::from_function(grid, [&](const Point& x) { return eval_shape(s, reg, x)[slot]; }));
    }
    return out;
}

std::vector<VectorField> TestFunctionFamily::solenoidal(const Grid& grid) const {
    validate();
    const Region reg = grid_region(grid, 2.0, band_limit);
    std::mt19937_64 rng(seed);
    std::vector<VectorField> out;
    for (int n = 0; n < count; ++n) {
        const Shape s = draw_shape(rng, reg, kind == Kind::tensor_polynomial ? kind : Kind::random_bumps);
        out.push_back(potential_curl(sample_potential(grid, [&](const Point& x) { return eval_shape(s, reg, x); })));
    }
    return out;
}

double TestFunctionFamily::level_delta(int level) const { return delta0 * std::pow(level_ratio, -level); }

Grid TestFunctionFamily::level_grid(const Domain& domain, int level) const {
    validate();
    domain.validate();
    int wall = 0;
    while (!domain.wall_axes[wall]) ++wall;
    const double delta = level_delta(level);
    const double side = 4.0 * delta;
    Point origin{0.0, 0.0, 0.0};
    std::array<double, 3> ext{1.0, 1.0, 1.0};
    std::array<int, 3> cells{1, 1, 1};
    for (int a = 0; a < domain.dims(); ++a) {
        origin[a] = a == wall ? 0.0 : 0.5 * (domain.extents[a] - side);
        ext[a] = side;
        cells[a] = window_cells;
    }
    if (side > 0.5 * domain.extents[wall]) throw ArgumentError("TestFunctionFamily: delta0 too large for the domain");
    return Grid::window(domain, origin, ext, cells);
}

std::vector<VectorField> TestFunctionFamily::level_fields(const Domain& domain, int level) const {
    const Grid g = level_grid(domain, level);
    const double delta = level_delta(level);
    // Reference window [0, 4]^d; support kept two cells from every face.
    Region ref;
    ref.dims = domain.dims();
    for (int a = 0; a < ref.dims; ++a) {
        ref.lo[a] = 0.0;
        ref.hi[a] = 4.0;
    }
    const double h = 4.0 / window_cells;
    ref.margin = 2.0 * h;
    ref.min_radius = band_limit * h;
    std::mt19937_64 rng(seed);
    std::vector<VectorField> out;
    for (int n = 0; n < count; ++n) {
        const Shape s = draw_shape(rng, ref, kind == Kind::tensor_polynomial ? kind : Kind::random_bumps);
        out.push_back(potential_curl(sample_potential(g, [&](const Point& x) {
            Point xi{0.0, 0.0, 0.0};
            for (int a = 0; a < ref.dims; ++a) xi[a] = (x[a] - g.origin()[a]) / delta;
            Point v = eval_shape(s, ref, xi);
            for (double& c : v) c *= delta;
            return v;
        })));
    }
    return out;
}

double hardy_ratio(const ScalarField& f, double p, double alpha) { return hardy_ratio_impl(f, p, alpha); }
double hardy_ratio(const VectorField& f, double p, double alpha) { return hardy_ratio_impl(f, p, alpha); }

double hardy_sobolev_exponent(int n, double p, double alpha, double q) {
    return (q / p) * (n - p + alpha) - n;
}

double hardy_sobolev_ratio(const ScalarField& f, double p, double alpha, double q) {
    const Grid& g = f.grid();
    const int n = g.dims();
    require(p >= 1.0, "hardy_sobolev_ratio: constraint p >= 1 violated");
    require(p < n, "hardy_sobolev_ratio: constraint p < n violated");
    require(q >= p, "hardy_sobolev_ratio: constraint q >= p violated");
    require(q <= n * p / (n - p), "hardy_sobolev_ratio: constraint q <= np/(n-p) violated");
    require_not_critical(p, alpha, "hardy_sobolev_ratio");
    const double beta = hardy_sobolev_exponent(n, p, alpha, q);
    const double lhs = weighted_power_integral(f, power_samples(g, wall_distance, beta), q);
    const double rhs = weighted_gradient_integral(f, power_samples(g, wall_distance, alpha), p);
    if (!(rhs > 0.0)) throw ArgumentError("hardy_sobolev_ratio: gradient norm is zero");
    return pth_root(lhs, q) / pth_root(rhs, p);
}

double curl_grad_ratio(const VectorField& u, double p, double alpha) {
    require(p > 1.0, "curl_grad_ratio: p must exceed 1");
    require(alpha > -1.0 && alpha < p - 1.0, "curl_grad_ratio: constraint -1 < alpha < p-1 violated");
    const Grid& g = u.grid();
    const WeightSamples w = power_samples(g, wall_distance, alpha);
    const double den = weighted_power_integral(curl(u), w, p);
    if (!(den > 0.0)) throw ArgumentError("curl_grad_ratio: curl integral is zero");
    return weighted_gradient_integral(u, w, p) / den;
}

std::string to_string(EmbeddingTarget t) {
    switch (t) {
        case EmbeddingTarget::L1: return "L1";
        case EmbeddingTarget::Lq: return "Lq";
        case EmbeddingTarget::L2_from_V: return "L2_from_V";
    }
    return "?";
}

namespace {

template <class Field>
double lp_embedding(const Field& f, double p, double alpha, EmbeddingTarget target, double q) {
    require(p >= 1.0, "embedding_ratio: p must be >= 1");
    const Grid& g = f.grid();
    const double src = pth_root(weighted_power_integral(f, power_samples(g, wall_distance, alpha), p), p);
    if (!(src > 0.0)) throw ArgumentError("embedding_ratio: source norm is zero");
    const WeightSamples one = power_samples(g, wall_distance, 0.0);
    if (target == EmbeddingTarget::L1) return weighted_power_integral(f, one, 1.0) / src;
    require(q >= 1.0 && q < p / (1.0 + alpha), "embedding_ratio: constraint 1 <= q < p/(1+alpha) violated");
    return pth_root(weighted_power_integral(f, one, q), q) / src;
}

}  // namespace

double embedding_ratio(const ScalarField& f, double p, double alpha, EmbeddingTarget target, double q) {
    require(target != EmbeddingTarget::L2_from_V, "embedding_ratio: L2_from_V needs a vector field");
    return lp_embedding(f, p, alpha, target, q);
}

double embedding_ratio(const VectorField& u, double p, double alpha, EmbeddingTarget target, double q) {
    if (target != EmbeddingTarget::L2_from_V) return lp_embedding(u, p, alpha, target, q);
    require(p == 3.0, "embedding_ratio: L2_from_V requires p = 3");
    require(alpha >= 0.0 && alpha < 2.0, "embedding_ratio: L2_from_V requires 0 <= alpha < 2");
    const Grid& g = u.grid();
    const double vn = pth_root(weighted_power_integral(curl(u), power_samples(g, wall_distance, alpha), p), p);
    if (!(vn > 0.0)) throw ArgumentError("embedding_ratio: V-norm is zero");
    return std::sqrt(weighted_power_integral(u, power_samples(g, wall_distance, 0.0), 2.0)) / vn;
}

double b_bound_ratio(const VectorField& u, const VectorField& w, double p, double alpha) {
    const Grid& g = u.grid();
    const WeightSamples wt = power_samples(g, wall_distance, alpha);
    const double nu = pth_root(weighted_power_integral(curl(u), wt, p), p);
    const double nw = pth_root(weighted_power_integral(curl(w), wt, p), p);
    if (!(nu > 0.0 && nw > 0.0)) throw ArgumentError("b_bound_ratio: zero V-norm");
    return inner(apply_B(u, 1e-8), w) / (nu * nu * nw);
}

GradedMesh1D GradedMesh1D::geometric(double depth, double ratio) {
    require(depth > 0.0 && ratio > 1.0, "GradedMesh1D: depth > 0 and ratio > 1 required");
    const int m = static_cast<int>(std::ceil(depth / std::log(ratio)));
    GradedMesh1D mesh;
    mesh.nodes.push_back(0.0);
    for (int i = 0; i <= m; ++i) mesh.nodes.push_back(std::exp(-depth + depth * i / m));
    mesh.nodes.back() = 1.0;
    return mesh;
}

namespace {

/// Three-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr double gauss_x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double gauss_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

HardyConstant1D hardy_constant_1d(double p, double alpha, double depth, double ratio, double tol,
                                  int max_iterations) {
    require(p > 1.0, "hardy_constant_1d: p must exceed 1");
    require(alpha > -1.0, "hardy_constant_1d: alpha must exceed -1");
    const GradedMesh1D mesh = GradedMesh1D::geometric(depth, ratio);
    const int N = mesh.cells();
    const auto& x = mesh.nodes;
    // Quadrature offsets t - x_j and weights w·t^{α-p} per cell.
    std::vector<double> off(3 * N), a(3 * N), b(N), h(N);
    for (int j = 0; j < N; ++j) {
        h[j] = x[j + 1] - x[j];
        b[j] = (std::pow(x[j + 1], alpha + 1.0) - std::pow(x[j], alpha + 1.0)) / (alpha + 1.0);
        for (int m = 0; m < 3; ++m) {
            const double t = x[j] + 0.5 * h[j] * (1.0 + gauss_x[m]);
            off[3 * j + m] = t - x[j];
            a[3 * j + m] = 0.5 * h[j] * gauss_w[m] * std::pow(t, alpha - p);
        }
    }
    std::vector<double> g(N, 1.0), y(3 * N), z(N);
    auto normalize = [&] {
        double s = 0.0;
        for (int j = 0; j < N; ++j) s += b[j] * std::pow(g[j], p);
        const double c = std::pow(s, -1.0 / p);
        for (double& v : g) v *= c;
    };
    normalize();
    HardyConstant1D r;
    r.cells = N;
    r.depth = depth;
    double prev = 0.0;
    for (int it = 1; it <= max_iterations; ++it) {
        // y = a (A g)^{p-1}, num = Σ a (A g)^p
        double F = 0.0, num = 0.0;
        for (int j = 0; j < N; ++j) {
            for (int m = 0; m < 3; ++m) {
                const double v = F + g[j] * off[3 * j + m];
                const double vp = std::pow(v, p - 1.0);
                y[3 * j + m] = a[3 * j + m] * vp;
                num += a[3 * j + m] * vp * v;
            }
            F += g[j] * h[j];
        }
        const double value = std::pow(num, 1.0 / p);
        r.constant = value;
        r.iterations = it;
        if (it > 1 && std::abs(value - prev) <= tol * value) return r;
        prev = value;
        // z = Aᵀ y by a suffix sum.
        double tail = 0.0;
        for (int j = N - 1; j >= 0; --j) {
            double own = 0.0;
            for (int m = 0; m < 3; ++m) own += y[3 * j + m] * off[3 * j + m];
            z[j] = own + h[j] * tail;
            for (int m = 0; m < 3; ++m) tail += y[3 * j + m];
        }
        for (int j = 0; j < N; ++j) g[j] = std::pow(z[j] / b[j], 1.0 / (p - 1.0));
        normalize();
    }
    throw SolverError("hardy_constant_1d: power method did not settle", std::abs(r.constant - prev));
}

double embedding_l1_profile_1d(double p, double alpha, double depth, double ratio) {
    require(p > 1.0 && alpha >= 0.0, "embedding_l1_profile_1d: p > 1 and alpha >= 0 required");
    const GradedMesh1D mesh = GradedMesh1D::geometric(depth, ratio);
    const auto& x = mesh.nodes;
    const double gamma = alpha / (p - 1.0);
    double l1 = 0.0, lp = 0.0;
    for (int j = 1; j < mesh.cells(); ++j) {
        const double h = x[j + 1] - x[j];
        for (int m = 0; m < 3; ++m) {
            const double t = x[j] + 0.5 * h * (1.0 + gauss_x[m]);
            const double w = 0.5 * h * gauss_w[m];
            const double f = std::pow(t, -gamma);
            l1 += w * f;
            lp += w * std::pow(t, alpha) * std::pow(f, p);
        }
    }
    return l1 / std::pow(lp, 1.0 / p);
}

std::string SweepReport::verdict(const std::string& estimator, double p, double alpha) const {
    for (const auto& r : rows)
        if (r.estimator == estimator && r.p == p && r.alpha == alpha) return r.verdict;
    return {};
}

std::vector<double> SweepReport::values(const std::string& estimator, double p, double alpha) const {
    std::vector<std::pair<int, double>> v;
    for (const auto& r : rows)
        if (r.estimator == estimator && r.p == p && r.alpha == alpha) v.emplace_back(r.level, r.value);
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> out;
    for (const auto& [l, val] : v) out.push_back(val);
    return out;
}

void SweepReport::append(const SweepReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

void SweepReport::write_csv(std::ostream& os) const {
    os << "estimator,p,alpha,q,level,value,verdict,seed,cells\n";
    for (const auto& r : rows) {
        os << r.estimator << ',' << format_double(r.p) << ',' << format_double(r.alpha) << ','
           << format_double(r.q) << ',' << r.level << ',' << format_double(r.value) << ',' << r.verdict << ','
           << r.seed << ',' << r.cells << '\n';
    }
}

std::string classify_trend(const std::vector<double>& values, int min_levels, double grow, double bounded) {
    if (values.size() < 2) return "inconclusive";
    double fmin = std::numeric_limits<double>::infinity(), fmax = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double f = values[i] / values[i - 1];
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
    }
    if (static_cast<int>(values.size()) >= min_levels && fmin >= grow) return "growing";
    if (fmax < bounded) return "bounded";
    return "inconclusive";
}

SweepReport b_bound_sweep(const TestFunctionFamily& family, const std::vector<double>& p_grid,
                          const std::vector<double>& alpha_grid, const Domain& domain, const Grid* base) {
    family.validate();
    const bool nested = family.kind == TestFunctionFamily::Kind::near_wall_concentrating;
    if (!nested && base == nullptr) throw ArgumentError("b_bound_sweep: a base grid is required for this family");
    const int levels = nested ? family.concentration_levels : 1;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    // best[(p, α)][level]
    const std::size_t combos = p_grid.size() * alpha_grid.size();
    std::vector<std::vector<double>> best(combos, std::vector<double>(levels, 0.0));
    std::vector<long long> cells(levels);

    for (int level = 0; level < levels; ++level) {
        const Grid g = nested ? family.level_grid(domain, level) : *base;
        const std::vector<VectorField> fields = nested ? family.level_fields(domain, level) : family.solenoidal(g);
        cells[level] = static_cast<long long>(g.cell_count());
        const std::size_t n = fields.size();
        const std::size_t Q = corner::count(g);
        const double vol = corner::volume(g);

        // Pairings ⟨B u_m, u_k⟩ do not depend on (p, α).
        std::vector<double> pair(n * n);
        std::vector<std::vector<double>> vort(n, std::vector<double>(Q));
        for (std::size_t m = 0; m < n; ++m) {
            const VectorField bm = apply_B(fields[m], 1e-8);
            for (std::size_t k = 0; k < n; ++k) pair[m * n + k] = inner(bm, fields[k]);
            const EdgeField w = curl(fields[m]);
            corner::for_each(g, [&](int i, int j, int kk, int s, std::size_t q) {
                const auto om = corner::gather(w, i, j, kk, s);
                vort[m][q] = std::sqrt(om[0] * om[0] + om[1] * om[1] + om[2] * om[2]);
            });
        }
        const std::vector<double> dist = power_samples(g, wall_distance, 1.0).values;

        for (std::size_t ip = 0; ip < p_grid.size(); ++ip) {
            const double p = p_grid[ip];
            std::vector<std::vector<double>> vp(n, std::vector<double>(Q));
            for (std::size_t m = 0; m < n; ++m)
                for (std::size_t q = 0; q < Q; ++q) vp[m][q] = std::pow(vort[m][q], p);
            for (std::size_t ia = 0; ia < alpha_grid.size(); ++ia) {
                std::vector<double> wq(Q);
                for (std::size_t q = 0; q < Q; ++q) wq[q] = std::pow(dist[q], alpha_grid[ia]);
                std::vector<double> norm(n);
                for (std::size_t m = 0; m < n; ++m) {
                    double acc = 0.0;
                    for (std::size_t q = 0; q < Q; ++q) acc += wq[q] * vp[m][q];
                    norm[m] = std::pow(acc * vol, 1.0 / p);
                }
                double b = 0.0;
                for (std::size_t m = 0; m < n; ++m)
                    for (std::size_t k = 0; k < n; ++k) {
                        if (!(norm[m] > 0.0 && norm[k] > 0.0)) continue;
                        b = std::max(b, std::abs(pair[m * n + k]) / (norm[m] * norm[m] * norm[k]));
                    }
                best[ip * alpha_grid.size() + ia][level] = b;
            }
        }
    }

    SweepReport rep;
    for (std::size_t ip = 0; ip < p_grid.size(); ++ip)
        for (std::size_t ia = 0; ia < alpha_grid.size(); ++ia) {
            const double p = p_grid[ip], alpha = alpha_grid[ia];
            const auto& vals = best[ip * alpha_grid.size() + ia];
            std::string verdict;
            if (alpha >= p - 1.0 - 1e-12) {
                verdict = "precondition-violated";
            } else if (!nested) {
                verdict = "single-level";
            } else {
                verdict = classify_trend(vals);
            }
            for (int level = 0; level < levels; ++level) {
                rep.rows.push_back({"B_bound", p, alpha, nan, level, vals[level], verdict, family.seed, cells[level]});
            }
        }
    return rep;
}

SweepReport ap_sweep(const Grid& grid, double p, const std::vector<double>& alpha_grid, int levels,
                     int cube_sizes, int points) {
    require(levels >= 1, "ap_sweep: levels must be >= 1");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SweepReport rep;
    for (double alpha : alpha_grid) {
        std::vector<double> vals;
        for (int k = 0; k < levels; ++k) {
            const auto fam = CubeFamily::dyadic(grid.domain(), cube_sizes, points, 8 << k);
            vals.push_back(muckenhoupt_constant(grid, alpha, p, fam));
        }
        const std::string verdict = classify_trend(vals);
        for (int k = 0; k < levels; ++k) {
            rep.rows.push_back({"A_p", p, alpha, nan, k, vals[k], verdict, 0,
                                static_cast<long long>(grid.cell_count())});
        }
    }
    return rep;
}

SweepReport hardy_sweep_1d(double p, double alpha, int levels, double depth0) {
    require(levels >= 1, "hardy_sweep_1d: levels must be >= 1");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<HardyConstant1D> res;
    std::vector<double> vals;
    for (int k = 0; k < levels; ++k) {
        res.push_back(hardy_constant_1d(p, alpha, depth0 * std::ldexp(1.0, k)));
        vals.push_back(res.back().constant);
    }
    const std::string verdict = classify_trend(vals);
    SweepReport rep;
    for (int k = 0; k < levels; ++k) rep.rows.push_back({"hardy", p, alpha, nan, k, vals[k], verdict, 0, res[k].cells});
    return rep;
}

}  // namespace rotsmag
