#include "rotsmag/weights.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "rotsmag/errors.hpp"
#include "rotsmag/quadrature.hpp"

namespace rotsmag {

WeightSamples power_samples(const Grid& grid, const MixingLength& ml, double exponent,
                            SampleLocation location) {
    ml.validate();
    WeightSamples w;
    w.alpha = exponent;
    w.location = location;
    const Domain& dom = grid.domain();
    if (location == SampleLocation::corner) {
        w.values.resize(corner::count(grid));
        corner::for_each(grid, [&](int i, int j, int k, int s, std::size_t q) {
            w.values[q] = std::pow(mixing_length(ml, dom, corner::position(grid, i, j, k, s)), exponent);
        });
    } else {
        w.values.reserve(grid.cell_count());
        const auto& n = grid.cells();
        for (int k = 0; k < n[2]; ++k)
            for (int j = 0; j < n[1]; ++j)
                for (int i = 0; i < n[0]; ++i) {
                    Point x{grid.cell_center(0, i), grid.cell_center(1, j),
                            grid.dims() == 3 ? grid.cell_center(2, k) : 0.0};
                    w.values.push_back(std::pow(mixing_length(ml, dom, x), exponent));
                }
    }
    return w;
}

WeightSamples weight_field(const Grid& grid, const MixingLength& ml, double alpha,
                           SampleLocation location) {
    if (!(alpha >= 0.0)) throw ArgumentError("weight_field: alpha must be >= 0");
    return power_samples(grid, ml, alpha, location);
}

CubeFamily CubeFamily::dyadic(const Domain& domain, int sizes, int points, int wall_layers) {
    domain.validate();
    if (sizes < 1 || points < 1 || wall_layers < 0) {
        throw ArgumentError("CubeFamily::dyadic: sizes, points >= 1 and wall_layers >= 0 required");
    }
    int wall = 0;
    while (!domain.wall_axes[wall]) ++wall;
    double H = domain.extents[0];
    for (int a = 0; a < domain.dims(); ++a) H = std::min(H, domain.extents[a]);
    H *= 0.25;

    CubeFamily fam;
    fam.points = points;
    fam.wall_layers = wall_layers;
    for (int j = 0; j < sizes; ++j) {
        const double side = H / std::pow(2.0, j);
        Cube c;
        c.side = side;
        for (int a = 0; a < domain.dims(); ++a) c.lo[a] = 0.5 * (domain.extents[a] - side);
        c.lo[wall] = 0.0;
        fam.cubes.push_back(c);
        c.lo[wall] = side;
        fam.cubes.push_back(c);
    }
    Cube center;
    center.side = H;
    for (int a = 0; a < domain.dims(); ++a) center.lo[a] = 0.5 * (domain.extents[a] - H);
    fam.cubes.push_back(center);
    return fam;
}

namespace {

/// 1D composite midpoint rule on [lo, hi]: (node, weight) pairs.
std::vector<std::pair<double, double>> midpoint_rule(double lo, double hi, int points) {
    std::vector<std::pair<double, double>> r;
    const double h = (hi - lo) / points;
    for (int i = 0; i < points; ++i) r.emplace_back(lo + (i + 0.5) * h, h);
    return r;
}

/// Composite rule graded dyadically toward `wall_at_lo ? lo : hi`.
std::vector<std::pair<double, double>> graded_rule(double lo, double hi, bool wall_at_lo,
                                                   int points, int layers) {
    std::vector<std::pair<double, double>> r;
    const double len = hi - lo;
    auto map = [&](double t) { return wall_at_lo ? lo + t : hi - t; };
    double outer = len;
    for (int j = 0; j <= layers; ++j) {
        const double inner = (j == layers) ? 0.0 : outer * 0.5;
        for (auto [t, w] : midpoint_rule(inner, outer, points)) r.emplace_back(map(t), w);
        outer = inner;
    }
    return r;
}

std::vector<std::pair<double, double>> axis_rule(const Domain& dom, int axis, double lo, double hi,
                                                 int points, int layers) {
    if (!dom.wall_axes[axis] || layers == 0) return midpoint_rule(lo, hi, points);
    const double L = dom.extents[axis];
    const double tol = 1e-14 * L;
    const bool at_lo = lo <= tol;
    const bool at_hi = hi >= L - tol;
    if (at_lo && at_hi) {
        auto r = graded_rule(lo, 0.5 * (lo + hi), true, points, layers);
        auto s = graded_rule(0.5 * (lo + hi), hi, false, points, layers);
        r.insert(r.end(), s.begin(), s.end());
        return r;
    }
    if (at_lo) return graded_rule(lo, hi, true, points, layers);
    if (at_hi) return graded_rule(lo, hi, false, points, layers);
    return midpoint_rule(lo, hi, points);
}

}  // namespace

double muckenhoupt_cube(const Domain& dom, double alpha, double p, const Cube& cube, int points,
                        int wall_layers) {
    std::array<std::vector<std::pair<double, double>>, 3> rules;
    for (int a = 0; a < 3; ++a) {
        if (a >= dom.dims()) {
            rules[a] = {{0.0, 1.0}};
            continue;
        }
        double lo = cube.lo[a];
        double hi = cube.lo[a] + cube.side;
        if (dom.wall_axes[a]) {
            lo = std::max(lo, 0.0);
            hi = std::min(hi, dom.extents[a]);
        }
        if (!(hi > lo)) throw DomainError("cube does not intersect the domain");
        rules[a] = axis_rule(dom, a, lo, hi, points, wall_layers);
    }
    const double dual = alpha / (1.0 - p);
    double vol = 0.0, avg_w = 0.0, avg_dual = 0.0;
    for (const auto& [z, wz] : rules[2])
        for (const auto& [y, wy] : rules[1])
            for (const auto& [x, wx] : rules[0]) {
                const double wq = wx * wy * wz;
                const double d = distance(dom, {x, y, z});
                vol += wq;
                avg_w += wq * std::pow(d, alpha);
                avg_dual += wq * std::pow(d, dual);
            }
    avg_w /= vol;
    avg_dual /= vol;
    return avg_w * std::pow(avg_dual, p - 1.0);
}

double muckenhoupt_constant(const Grid& grid, double alpha, double p, const CubeFamily& family) {
    if (family.cubes.empty()) throw ArgumentError("muckenhoupt_constant: empty cube family");
    if (!(p > 1.0)) throw ArgumentError("muckenhoupt_constant: p must exceed 1");
    double best = 0.0;
    for (const Cube& c : family.cubes) {
        best = std::max(best, muckenhoupt_cube(grid.domain(), alpha, p, c, family.points,
                                               family.wall_layers));
    }
    return best;
}

}  // namespace rotsmag
