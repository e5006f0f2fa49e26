#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rotsmag/fields.hpp"
#include "rotsmag/model.hpp"
#include "rotsmag/weights.hpp"

namespace rotsmag {

struct NormReport {
    enum class Kind { H, V, Lp_weighted, W1p_weighted };

    double value = 0.0;
    Kind kind = Kind::Lp_weighted;
    double p = 2.0;
    double alpha = 0.0;
};

std::string to_string(NormReport::Kind kind);

/// ∫ w |f|^p by corner quadrature. `w` must be corner-located samples of
/// the same grid; otherwise ArgumentError.
double weighted_power_integral(const VectorField& f, const WeightSamples& w, double p);
double weighted_power_integral(const EdgeField& f, const WeightSamples& w, double p);
double weighted_power_integral(const ScalarField& f, const WeightSamples& w, double p);

/// ∫ w |∇f|^p (Frobenius norm of the full gradient) by corner quadrature.
double weighted_gradient_integral(const VectorField& f, const WeightSamples& w, double p);
double weighted_gradient_integral(const ScalarField& f, const WeightSamples& w, double p);

/// (∫ w |f|^p)^{1/p}. Requires p >= 1.
NormReport weighted_lp_norm(const VectorField& f, const WeightSamples& w, double p);
NormReport weighted_lp_norm(const EdgeField& f, const WeightSamples& w, double p);
NormReport weighted_lp_norm(const ScalarField& f, const WeightSamples& w, double p);

/// (∫ w |∇f|^p)^{1/p}.
NormReport weighted_w1p_seminorm(const VectorField& f, const WeightSamples& w, double p);

/// ‖u‖_H = ‖u‖_{L²}.
NormReport h_norm(const VectorField& u);

/// ‖u‖_V = (∫ ℓ^α |curl u|^p)^{1/p}.
NormReport v_norm(const VectorField& u, const ModelParams& params);
/// Same, with precomputed ℓ^α samples.
NormReport v_norm(const VectorField& u, const ModelParams& params, const WeightSamples& w);

/// CSV rows "label,kind,p,alpha,value" with a header line.
void write_norm_csv(std::ostream& os, const std::vector<std::pair<std::string, NormReport>>& rows);

}  // namespace rotsmag
