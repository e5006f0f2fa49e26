#include "rotsmag/norms.hpp"

#include <cmath>
#include <ostream>

#include "rotsmag/discrete_ops.hpp"
#include "rotsmag/errors.hpp"
#include "rotsmag/quadrature.hpp"

namespace rotsmag {

std::string to_string(NormReport::Kind kind) {
    switch (kind) {
        case NormReport::Kind::H: return "H";
        case NormReport::Kind::V: return "V";
        case NormReport::Kind::Lp_weighted: return "Lp_weighted";
        case NormReport::Kind::W1p_weighted: return "W1p_weighted";
    }
    return "?";
}

namespace {

void check_samples(const Grid& g, const WeightSamples& w) {
    if (w.location != SampleLocation::corner || w.values.size() != corner::count(g)) {
        throw ArgumentError("weight samples are not located at the corner quadrature points of this grid");
    }
}

double norm3(const std::array<double, 3>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

template <class Field>
double power_integral(const Field& f, const WeightSamples& w, double p) {
    const Grid& g = f.grid();
    check_samples(g, w);
    double acc = 0.0;
    corner::for_each(g, [&](int i, int j, int k, int s, std::size_t q) {
        acc += w.values[q] * std::pow(norm3(corner::gather(f, i, j, k, s)), p);
    });
    return acc * corner::volume(g);
}

void check_p(double p) {
    if (!(p >= 1.0)) throw ArgumentError("norm exponent p must be >= 1");
}

}  // namespace

double weighted_power_integral(const VectorField& f, const WeightSamples& w, double p) {
    return power_integral(f, w, p);
}

double weighted_power_integral(const EdgeField& f, const WeightSamples& w, double p) {
    return power_integral(f, w, p);
}

double weighted_power_integral(const ScalarField& f, const WeightSamples& w, double p) {
    const Grid& g = f.grid();
    check_samples(g, w);
    const int m = corner::per_cell(g);
    double acc = 0.0;
    corner::for_each(g, [&](int, int, int, int, std::size_t q) {
        acc += w.values[q] * std::pow(std::abs(f.component(0).data[q / m]), p);
    });
    return acc * corner::volume(g);
}

double weighted_gradient_integral(const VectorField& f, const WeightSamples& w, double p) {
    const Grid& g = f.grid();
    check_samples(g, w);
    double acc = 0.0;
    corner::for_each(g, [&](int i, int j, int k, int s, std::size_t q) {
        const auto G = corner::gradient(f, i, j, k, s);
        double fro = 0.0;
        for (const auto& row : G)
            for (double v : row) fro += v * v;
        acc += w.values[q] * std::pow(std::sqrt(fro), p);
    });
    return acc * corner::volume(g);
}

double weighted_gradient_integral(const ScalarField& f, const WeightSamples& w, double p) {
    const Grid& g = f.grid();
    check_samples(g, w);
    double acc = 0.0;
    corner::for_each(g, [&](int i, int j, int k, int s, std::size_t q) {
        acc += w.values[q] * std::pow(norm3(corner::gradient(f, i, j, k, s)), p);
    });
    return acc * corner::volume(g);
}

NormReport weighted_lp_norm(const VectorField& f, const WeightSamples& w, double p) {
    check_p(p);
    return {std::pow(weighted_power_integral(f, w, p), 1.0 / p), NormReport::Kind::Lp_weighted, p, w.alpha};
}

NormReport weighted_lp_norm(const EdgeField& f, const WeightSamples& w, double p) {
    check_p(p);
    return {std::pow(weighted_power_integral(f, w, p), 1.0 / p), NormReport::Kind::Lp_weighted, p, w.alpha};
}

NormReport weighted_lp_norm(const ScalarField& f, const WeightSamples& w, double p) {
    check_p(p);
    return {std::pow(weighted_power_integral(f, w, p), 1.0 / p), NormReport::Kind::Lp_weighted, p, w.alpha};
}

NormReport weighted_w1p_seminorm(const VectorField& f, const WeightSamples& w, double p) {
    check_p(p);
    return {std::pow(weighted_gradient_integral(f, w, p), 1.0 / p), NormReport::Kind::W1p_weighted, p,
            w.alpha};
}

NormReport h_norm(const VectorField& u) { return {l2_norm(u), NormReport::Kind::H, 2.0, 0.0}; }

NormReport v_norm(const VectorField& u, const ModelParams& params, const WeightSamples& w) {
    NormReport r = weighted_lp_norm(curl(u), w, params.p);
    r.kind = NormReport::Kind::V;
    return r;
}

NormReport v_norm(const VectorField& u, const ModelParams& params) {
    return v_norm(u, params, weight_field(u.grid(), params.mixing, params.alpha));
}

void write_norm_csv(std::ostream& os, const std::vector<std::pair<std::string, NormReport>>& rows) {
    os << "label,kind,p,alpha,value\n";
    os.precision(17);
    for (const auto& [label, r] : rows) {
        os << label << ',' << to_string(r.kind) << ',' << r.p << ',' << r.alpha << ',' << r.value << '\n';
    }
}

}  // namespace rotsmag
