#include "rotsmag/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "rotsmag/discrete_ops.hpp"
#include "rotsmag/errors.hpp"
#include "rotsmag/norms.hpp"
#include "rotsmag/quadrature.hpp"

namespace rotsmag {

namespace {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Adds `scale * v` to the face of each component adjacent to the corner.
void scatter(VectorField& out, const Vec3& v, double scale, int i, int j, int k, int s) {
    const Grid& g = out.grid();
    for (int c = 0; c < g.vector_components(); ++c) {
        out.component(c).data[corner::face_index(g, c, i, j, k, s)] += scale * v[c];
    }
}

}  // namespace

std::vector<double> stress_coefficient(const VectorField& u, const ModelParams& params,
                                       const WeightSamples& weights) {
    const Grid& g = u.grid();
    if (weights.location != SampleLocation::corner || weights.values.size() != corner::count(g)) {
        throw ArgumentError("stress_coefficient: weights do not match the grid quadrature");
    }
    const EdgeField w = curl(u);
    const double C = params.coefficient();
    const double half = 0.5 * (params.p - 2.0);
    const double eps2 = params.eps_reg * params.eps_reg;
    std::vector<double> kappa(corner::count(g));
    corner::for_each(g, [&](int i, int j, int k, int s, std::size_t q) {
        const Vec3 om = corner::gather(w, i, j, k, s);
        const double s2 = dot(om, om) + eps2;
        // |ω|^{p-2} at ω = 0 is 0 for p > 2 and 1 for p = 2.
        const double g_eps = (half == 0.0) ? 1.0 : (s2 == 0.0 ? 0.0 : std::pow(s2, half));
        kappa[q] = C * weights.values[q] * g_eps;
    });
    return kappa;
}

VectorField weighted_curl_curl(const VectorField& v, const std::vector<double>& kappa) {
    const Grid& g = v.grid();
    if (kappa.size() != corner::count(g)) throw ArgumentError("weighted_curl_curl: coefficient size mismatch");
    const EdgeField w = curl(v);
    EdgeField flux(g);
    const double vol = corner::volume(g);
    corner::for_each(g, [&](int i, int j, int k, int s, std::size_t q) {
        const Vec3 om = corner::gather(w, i, j, k, s);
        if (g.dims() == 2) {
            flux.component(0).data[corner::edge_index(g, 0, i, j, k, s)] += vol * kappa[q] * om[2];
            return;
        }
        for (int c = 0; c < 3; ++c) {
            flux.component(c).data[corner::edge_index(g, c, i, j, k, s)] += vol * kappa[q] * om[c];
        }
    });
    for (int c = 0; c < flux.components(); ++c) {
        Array3& arr = flux.component(c);
        for (int k = 0; k < arr.n[2]; ++k)
            for (int j = 0; j < arr.n[1]; ++j)
                for (int i = 0; i < arr.n[0]; ++i) arr(i, j, k) /= flux.edge_volume(c, i, j, k);
    }
    return curl_adjoint(flux);
}

VectorField apply_S(const VectorField& u, const ModelParams& params, const WeightSamples& weights) {
    return weighted_curl_curl(u, stress_coefficient(u, params, weights));
}

VectorField apply_S(const VectorField& u, const ModelParams& params) {
    return apply_S(u, params, weight_field(u.grid(), params.mixing, params.alpha));
}

VectorField apply_B(const VectorField& u, double div_tol, ConvectionForm form) {
    const Grid& g = u.grid();
    double hmin = g.spacing(0);
    for (int a = 1; a < g.dims(); ++a) hmin = std::min(hmin, g.spacing(a));
    const double div = divergence(u).max_abs();
    if (div > div_tol * std::max(1.0, u.max_abs() / hmin)) {
        throw PreconditionError("apply_B: velocity is not discretely divergence-free (max |div u| = " +
                                std::to_string(div) + ")");
    }
    const EdgeField w = curl(u);
    VectorField out(g);
    const double share = 1.0 / corner::per_cell(g);
    if (form == ConvectionForm::corner) {
        corner::for_each(g, [&](int i, int j, int k, int s, std::size_t) {
            scatter(out, cross(corner::gather(w, i, j, k, s), corner::gather(u, i, j, k, s)), share, i, j, k, s);
        });
    } else {
        // Average ω and u around every face first.
        VectorField om_avg[3] = {VectorField(g), VectorField(g), VectorField(g)};
        VectorField u_avg[3] = {VectorField(g), VectorField(g), VectorField(g)};
        corner::for_each(g, [&](int i, int j, int k, int s, std::size_t) {
            const Vec3 om = corner::gather(w, i, j, k, s);
            const Vec3 uu = corner::gather(u, i, j, k, s);
            for (int m = 0; m < 3; ++m) {
                scatter(om_avg[m], {om[m], om[m], om[m]}, share, i, j, k, s);
                scatter(u_avg[m], {uu[m], uu[m], uu[m]}, share, i, j, k, s);
            }
        });
        for (int c = 0; c < g.vector_components(); ++c) {
            auto& oc = out.component(c).data;
            for (std::size_t f = 0; f < oc.size(); ++f) {
                const Vec3 om{om_avg[0].component(c).data[f], om_avg[1].component(c).data[f],
                              om_avg[2].component(c).data[f]};
                const Vec3 uu{u_avg[0].component(c).data[f], u_avg[1].component(c).data[f],
                              u_avg[2].component(c).data[f]};
                oc[f] = cross(om, uu)[c];
            }
        }
    }
    out.enforce_walls();
    return out;
}

VectorField apply_A(const VectorField& u, const ModelParams& params, double div_tol, ConvectionForm form) {
    VectorField a = apply_S(u, params);
    a += apply_B(u, div_tol, form);
    return a;
}

FieldSampler::FieldSampler(const Grid& grid, std::uint64_t seed, int bumps)
    : grid_(grid), projector_(grid), rng_(seed), bumps_(bumps) {
    if (bumps < 1) throw ArgumentError("FieldSampler: at least one bump required");
}

double FieldSampler::uniform(double lo, double hi) {
    return lo + (hi - lo) * std::ldexp(static_cast<double>(rng_() >> 11), -53);
}

VectorField FieldSampler::next() {
    const Grid& g = grid_;
    const int d = g.dims();
    double lmin = g.domain().extents[0];
    for (int a = 1; a < d; ++a) lmin = std::min(lmin, g.domain().extents[a]);

    struct Bump {
        Point centre;
        Point amp;
        double width;
    };
    std::vector<Bump> bumps(bumps_);
    for (auto& b : bumps) {
        for (int a = 0; a < 3; ++a) {
            b.centre[a] = a < d ? g.origin()[a] + uniform(0.0, g.cells(a) * g.spacing(a)) : 0.0;
            b.amp[a] = a < d ? uniform(-1.0, 1.0) : 0.0;
        }
        b.width = uniform(0.08, 0.25) * lmin;
    }
    auto field = [&](const Point& x) {
        Point v{0.0, 0.0, 0.0};
        for (const auto& b : bumps) {
            double r2 = 0.0;
            for (int a = 0; a < d; ++a) {
                double dx = x[a] - b.centre[a];
                if (g.periodic(a)) {
                    const double L = g.cells(a) * g.spacing(a);
                    dx -= L * std::round(dx / L);
                }
                r2 += dx * dx;
            }
            const double e = std::exp(-r2 / (2.0 * b.width * b.width));
            for (int a = 0; a < d; ++a) v[a] += b.amp[a] * e;
        }
        return v;
    };
    return projector_(VectorField::from_function(g, field));
}

OperatorConditionReport check_conditions(const ModelParams& params, FieldSampler& sampler, int n,
                                         double div_tol) {
    if (n < 1) throw ArgumentError("check_conditions: n must be >= 1");
    const Grid& g = sampler.grid();
    const WeightSamples w = weight_field(g, params.mixing, params.alpha);
    OperatorConditionReport r;
    r.p = params.p;
    r.alpha = params.alpha;
    r.c1_hat = std::numeric_limits<double>::infinity();

    std::vector<VectorField> samples;
    std::vector<VectorField> images;
    for (int m = 0; m < n; ++m) {
        VectorField v = sampler.next();
        const double nv = v_norm(v, params, w).value;
        if (!(nv > 0.0)) {
            ++r.skipped;
            continue;
        }
        v *= 1.0 / nv;
        VectorField av = apply_S(v, params, w);
        av += apply_B(v, div_tol);
        r.c1_hat = std::min(r.c1_hat, inner(av, v));
        samples.push_back(std::move(v));
        images.push_back(std::move(av));
    }
    r.sample_count = static_cast<int>(samples.size());
    if (samples.empty()) {
        r.c1_hat = 0.0;
        return r;
    }
    // All samples have unit V-norm, so each ratio is a plain pairing.
    for (const auto& av : images)
        for (const auto& v : samples) r.c0_hat = std::max(r.c0_hat, std::abs(inner(av, v)));
    return r;
}

double monotonicity_product(const std::array<double, 3>& a, const std::array<double, 3>& b, double p,
                            double w) {
    auto flux = [&](const Vec3& v) {
        const double n = std::sqrt(dot(v, v));
        const double f = n == 0.0 ? 0.0 : w * std::pow(n, p - 2.0);
        return Vec3{f * v[0], f * v[1], f * v[2]};
    };
    const Vec3 fa = flux(a), fb = flux(b);
    return (fa[0] - fb[0]) * (a[0] - b[0]) + (fa[1] - fb[1]) * (a[1] - b[1]) + (fa[2] - fb[2]) * (a[2] - b[2]);
}

double monotonicity_gap(const VectorField& u, const VectorField& v, const ModelParams& params) {
    const Grid& g = u.grid();
    if (!(v.grid() == g)) throw ArgumentError("monotonicity_gap: fields live on different grids");
    const WeightSamples w = weight_field(g, params.mixing, params.alpha);
    const EdgeField wu = curl(u), wv = curl(v);
    double gap = std::numeric_limits<double>::infinity();
    corner::for_each(g, [&](int i, int j, int k, int s, std::size_t q) {
        gap = std::min(gap, monotonicity_product(corner::gather(wu, i, j, k, s), corner::gather(wv, i, j, k, s),
                                                 params.p, w.values[q]));
    });
    return gap;
}

void write_condition_csv_header(std::ostream& os) {
    os << "p,alpha,n,seed,c0_hat,c1_hat,skipped\n";
}

void write_condition_csv_row(std::ostream& os, const OperatorConditionReport& r, std::uint64_t seed) {
    const auto old = os.precision(17);
    os << r.p << ',' << r.alpha << ',' << r.sample_count << ',' << seed << ',' << r.c0_hat << ','
       << r.c1_hat << ',' << r.skipped << '\n';
    os.precision(old);
}

}  // namespace rotsmag
