#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "rotsmag/fields.hpp"
#include "rotsmag/model.hpp"
#include "rotsmag/projection.hpp"
#include "rotsmag/weights.hpp"

namespace rotsmag {

/// Per-quadrature-point stress coefficient C ℓ^α g_ε(|ω|) with
/// g_ε(s) = (s² + ε²)^{(p-2)/2}, evaluated on the curl of `u`.
/// `weights` are the ℓ^α corner samples.
std::vector<double> stress_coefficient(const VectorField& u, const ModelParams& params,
                                       const WeightSamples& weights);

/// curlᵀ(κ curl v) for a fixed corner coefficient κ. This is the
/// linearization used by the Picard iteration; with κ from
/// stress_coefficient(u) and v = u it is apply_S(u).
VectorField weighted_curl_curl(const VectorField& v, const std::vector<double>& kappa);

/// Riesz representer of ⟨S u, w⟩ = ∫ C ℓ^α g_ε(|curl u|) curl u · curl w.
VectorField apply_S(const VectorField& u, const ModelParams& params);
VectorField apply_S(const VectorField& u, const ModelParams& params, const WeightSamples& weights);

/// How (curl u) × u is brought back to faces.
enum class ConvectionForm {
    /// Product at each corner point, then the transpose of the corner
    /// gather. ⟨B u, u⟩ = 0 holds to round-off.
    corner,
    /// Arithmetic average of the corner values of curl u and u around
    /// each face, then the product. Not exactly skew.
    face_average,
};

/// Riesz representer of ⟨B u, w⟩ = ∫ (curl u × u)·w. Throws
/// PreconditionError when max |div u| exceeds div_tol · max(1, max|u| / h_min).
VectorField apply_B(const VectorField& u, double div_tol, ConvectionForm form = ConvectionForm::corner);

/// apply_S(u) + apply_B(u).
VectorField apply_A(const VectorField& u, const ModelParams& params, double div_tol,
                    ConvectionForm form = ConvectionForm::corner);

/// Random smooth solenoidal fields: a sum of Gaussian bumps with random
/// centres, widths and amplitudes, zeroed on walls and Leray-projected.
class FieldSampler {
public:
    FieldSampler(const Grid& grid, std::uint64_t seed, int bumps = 4);

    const Grid& grid() const noexcept { return grid_; }
    VectorField next();

private:
    double uniform(double lo, double hi);

    Grid grid_;
    LerayProjector projector_;
    std::mt19937_64 rng_;
    int bumps_;
};

struct OperatorConditionReport {
    /// max over samples v, w of ⟨A v, w⟩ / (‖w‖_V ‖v‖_V^{p-1}): a lower
    /// bound for the growth constant in ‖A v‖_{V*} <= c₀ ‖v‖_V^{p-1}.
    double c0_hat = 0.0;
    /// min over samples of ⟨A v, v⟩ / ‖v‖_V^p.
    double c1_hat = 0.0;
    int sample_count = 0;
    /// Samples with ‖v‖_V = 0, excluded from both estimates.
    int skipped = 0;
    double p = 0.0;
    double alpha = 0.0;
};

/// Draws n samples (each rescaled to ‖v‖_V = 1) and evaluates the growth
/// and coercivity ratios of A = S + B. Throws ArgumentError if n < 1.
OperatorConditionReport check_conditions(const ModelParams& params, FieldSampler& sampler, int n,
                                         double div_tol = 1e-8);

/// (w|a|^{p-2}a - w|b|^{p-2}b)·(a - b) for vectors a, b.
double monotonicity_product(const std::array<double, 3>& a, const std::array<double, 3>& b,
                            double p, double w);

/// Minimum over quadrature points of the pointwise monotonicity product of
/// curl u and curl v with weight ℓ^α (ε = 0).
double monotonicity_gap(const VectorField& u, const VectorField& v, const ModelParams& params);

/// CSV header and row keyed by (p, alpha, n, seed).
void write_condition_csv_header(std::ostream& os);
void write_condition_csv_row(std::ostream& os, const OperatorConditionReport& r, std::uint64_t seed);

}  // namespace rotsmag
