#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rotsmag/fields.hpp"
#include "rotsmag/grid.hpp"

namespace rotsmag {

/// Deterministic families of compactly supported test functions.
///
/// Every generated function vanishes within one cell of each wall (two
/// cells for the vector potential of a solenoidal field). Samples are
/// produced in a fixed order from `seed`, so a family with a larger
/// `count` extends a smaller one.
struct TestFunctionFamily {
    enum class Kind { random_bumps, near_wall_concentrating, tensor_polynomial };

    Kind kind = Kind::random_bumps;
    std::uint64_t seed = 1;
    int count = 8;
    /// Smallest bump radius in cell widths.
    double band_limit = 3.0;
    /// Number of levels of the near-wall sequence.
    int concentration_levels = 5;
    /// Wall distance of level 0 and the shrink factor between levels.
    double delta0 = 0.1;
    double level_ratio = 32.0;
    /// Cells per axis of each near-wall window.
    int window_cells = 16;

    void validate() const;

    /// Scalar samples on a grid (random_bumps or tensor_polynomial).
    std::vector<ScalarField> scalars(const Grid& grid) const;
    /// Solenoidal samples u = curl ψ with compact ψ.
    std::vector<VectorField> solenoidal(const Grid& grid) const;

    /// Near-wall window of level k: a cube of side 4δ_k resting on the
    /// lower face of the first wall axis, δ_k = delta0 / level_ratio^k.
    Grid level_grid(const Domain& domain, int level) const;
    double level_delta(int level) const;
    /// Solenoidal samples on level_grid(level). The same shapes are used on
    /// every level, rescaled to the window.
    std::vector<VectorField> level_fields(const Domain& domain, int level) const;
};

std::string to_string(TestFunctionFamily::Kind kind);
TestFunctionFamily::Kind family_kind_from_string(const std::string& s);

/// (∫ d^{α-p} |f|^p)^{1/p} / (∫ d^α |∇f|^p)^{1/p}. Throws PreconditionError
/// for α = p-1 and ArgumentError when the gradient integral vanishes.
double hardy_ratio(const ScalarField& f, double p, double alpha);
double hardy_ratio(const VectorField& f, double p, double alpha);

/// (∫ d^β |f|^q)^{1/q} / (∫ d^α |∇f|^p)^{1/p} with β = (q/p)(n-p+α) - n.
/// Requires 1 <= p < n, p <= q <= np/(n-p), α != p-1.
double hardy_sobolev_ratio(const ScalarField& f, double p, double alpha, double q);
/// The weight exponent β above.
double hardy_sobolev_exponent(int n, double p, double alpha, double q);

/// ∫ d^α |∇u|^p / ∫ d^α |curl u|^p. Requires -1 < α < p-1.
double curl_grad_ratio(const VectorField& u, double p, double alpha);

enum class EmbeddingTarget { L1, Lq, L2_from_V };
std::string to_string(EmbeddingTarget t);

/// Target norm over (∫ d^α |f|^p)^{1/p}. L1: ‖f‖₁. Lq: ‖f‖_q with
/// q < p/(1+α). L2_from_V (vector fields only): ‖u‖₂ over the V-norm
/// (∫ d^α |curl u|^p)^{1/p}, requiring p = 3 and α < 2.
double embedding_ratio(const ScalarField& f, double p, double alpha, EmbeddingTarget target, double q = 0.0);
double embedding_ratio(const VectorField& u, double p, double alpha, EmbeddingTarget target, double q = 0.0);

/// ⟨B u, w⟩ / (‖u‖_V² ‖w‖_V) with ℓ = d.
double b_bound_ratio(const VectorField& u, const VectorField& w, double p, double alpha);

/// Mesh on [0, 1]: the node 0, then e^{-depth} growing geometrically by
/// `ratio` up to 1.
struct GradedMesh1D {
    std::vector<double> nodes;
    static GradedMesh1D geometric(double depth, double ratio);
    int cells() const { return static_cast<int>(nodes.size()) - 1; }
};

struct HardyConstant1D {
    double constant = 0.0;
    int iterations = 0;
    int cells = 0;
    double depth = 0.0;
};

/// Largest ratio (∫ x^{α-p}|f|^p)^{1/p} / (∫ x^α|f'|^p)^{1/p} over
/// piecewise linear f with f(0) = 0 on the graded mesh, by the nonlinear
/// power method. Throws SolverError if it does not settle within the cap.
HardyConstant1D hardy_constant_1d(double p, double alpha, double depth, double ratio = 1.05,
                                  double tol = 1e-12, int max_iterations = 200000);

/// ‖f‖₁ / (∫ x^α |f|^p)^{1/p} on (0, 1) for the Hölder-extremal profile
/// f = x^{-α/(p-1)} on [e^{-depth}, 1], computed by Gauss quadrature on the
/// graded mesh.
double embedding_l1_profile_1d(double p, double alpha, double depth, double ratio = 1.05);

/// One output row; q is NaN when not applicable.
struct SweepRow {
    std::string estimator;
    double p = 0.0;
    double alpha = 0.0;
    double q = 0.0;
    int level = 0;
    double value = 0.0;
    std::string verdict;
    std::uint64_t seed = 0;
    long long cells = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;

    /// Verdict of the first row matching (estimator, p, alpha); empty if none.
    std::string verdict(const std::string& estimator, double p, double alpha) const;
    /// Values of the matching rows in level order.
    std::vector<double> values(const std::string& estimator, double p, double alpha) const;

    void append(const SweepReport& other);
    void write_csv(std::ostream& os) const;
};

/// Level-trend classification: "growing" when there are at least
/// `min_levels` values and every level-to-level factor is >= grow,
/// "bounded" when every factor is < bounded, else "inconclusive".
std::string classify_trend(const std::vector<double>& values, int min_levels = 4, double grow = 1.5,
                           double bounded = 1.2);

/// For each (p, α): per level, the max over ordered sample pairs of the
/// B-bound ratio on the family's near-wall windows, and the trend verdict.
/// α >= p-1 is reported as "precondition-violated". For families other than
/// near_wall_concentrating a single level on `base` is evaluated.
SweepReport b_bound_sweep(const TestFunctionFamily& family, const std::vector<double>& p_grid,
                          const std::vector<double>& alpha_grid, const Domain& domain,
                          const Grid* base = nullptr);

/// A_p estimates of d^α at near-wall refinement levels k = 0..levels-1
/// (8·2^k dyadic wall layers per cube).
SweepReport ap_sweep(const Grid& grid, double p, const std::vector<double>& alpha_grid, int levels,
                     int cube_sizes = 4, int points = 4);

/// Sharp Hardy constant estimates at depths depth0·2^k, k = 0..levels-1.
SweepReport hardy_sweep_1d(double p, double alpha, int levels, double depth0 = 8.0);

}  // namespace rotsmag
