#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rotsmag/fields.hpp"
#include "rotsmag/model.hpp"

namespace rotsmag {

enum class Scheme {
    implicit_euler,
    /// S implicit, B evaluated at the old state.
    semi_implicit,
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 0.1;
    Scheme scheme = Scheme::implicit_euler;
    /// Stop when ‖v_new - v_old‖ / ‖v_new‖ < picard_tol.
    double picard_tol = 1e-10;
    int picard_max = 200;
    /// Picard relaxation in (0, 1]. Unset selects 2/p, which bounds the
    /// frozen-coefficient iteration's contraction factor by (p-2)/p.
    std::optional<double> damping;
    /// Anderson acceleration depth on top of the damped iteration; 0 turns it off.
    int anderson_depth = 5;
    /// Max-norm divergence tolerance of every Leray projection.
    double leray_tol = 1e-10;
    /// Relative energy-norm error of each linear solve.
    double linear_tol = 1e-13;
    /// Keep every k-th state in the trajectory (0 keeps only the ends).
    int snapshot_every = 0;

    void validate() const;
    double damping_for(double p) const;
};

/// One row of the discrete energy balance
///   ½‖u⁺‖² + dt C‖u⁺‖_V^p + ½‖u⁺ - u‖² = ½‖u‖² + dt⟨f, u⁺⟩.
struct EnergyLedgerRow {
    int step = 0;
    double t = 0.0;
    double kinetic = 0.0;
    double dissipation = 0.0;
    double work = 0.0;
    double scheme_dissipation = 0.0;
    double balance_residual = 0.0;
    int picard_iterations = 0;
};

struct EnergyLedger {
    double kinetic0 = 0.0;
    std::vector<EnergyLedgerRow> rows;

    /// step,t,kinetic,dissipation_cum,work_cum,scheme_dissipation_cum,residual,picard_iters
    void write_csv(std::ostream& os) const;
};

/// |K_n + ΣD + ΣS - ΣW - K_0| / (K_0 + Σ|W|) over the first t_index steps;
/// 0 when numerator and denominator both vanish. t_index 0 is the
/// initial state. Throws ArgumentError for an index past the end.
double energy_residual(const EnergyLedger& ledger, std::size_t t_index);

struct StepStats {
    int picard_iterations = 0;
    /// Relative update of every Picard iterate.
    std::vector<double> updates;
    int linear_iterations = 0;
    int factorizations = 0;
};

struct StepResult {
    VectorField u;
    ScalarField q;
    EnergyLedgerRow row;
    StepStats stats;
};

/// Implicit time stepper for ∂_t u + S(u) + B(u) + ∇q = f, div u = 0.
///
/// Each Picard iterate freezes the coefficient C ℓ^α |curl v|^{p-2} at the
/// previous iterate and solves the resulting linear problem on the
/// discretely solenoidal space. In 2D that space is parametrized by a
/// nodal stream function and the systems are solved with a sparse
/// Cholesky factorization, reused as a preconditioner while the
/// coefficient changes little. In 3D the linear problems are solved by
/// conjugate gradients with a Leray projection every iteration.
///
/// Not thread-safe; one instance per time loop.
class Stepper {
public:
    Stepper(const Grid& grid, const ModelParams& params, const SolverConfig& config);
    ~Stepper();
    Stepper(Stepper&&) noexcept;
    Stepper& operator=(Stepper&&) noexcept;

    /// Advance one step of size config.dt from time t to t + dt.
    /// Throws SolverError when the Picard cap is hit and NumericError on
    /// non-finite values.
    StepResult step(const VectorField& u, const VectorField& f_next, double t = 0.0);

    /// Leray projection with the configured tolerance.
    VectorField project(const VectorField& u) const;

    const Grid& grid() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Single step with a throwaway Stepper.
StepResult step(const VectorField& u, const VectorField& f_next, const ModelParams& params,
                const SolverConfig& config);

struct InitialData {
    enum class Kind { taylor_green_2d, random_bump_projected, file };

    Kind kind = Kind::taylor_green_2d;
    double amplitude = 1.0;
    std::uint64_t seed = 1;
    /// Snapshot stem for Kind::file.
    std::filesystem::path path;

    /// Unprojected field. Taylor-Green: u = A(sin πx̂ cos πŷ, -cos πx̂ sin πŷ)
    /// with x̂ = x/L_x, ŷ = y/L_y (2D grids only).
    VectorField sample(const Grid& grid) const;
};

std::string to_string(InitialData::Kind k);
InitialData::Kind initial_kind_from_string(const std::string& s);

/// Time-dependent body force, evaluated at the new time level.
struct ForcingSpec {
    std::function<VectorField(const Grid&, double t)> at;

    static ForcingSpec zero();
    static ForcingSpec steady(VectorField f);
};

struct Trajectory {
    std::vector<int> steps;
    std::vector<double> times;
    std::vector<VectorField> states;
    /// max over steps of ‖u‖_{L²}.
    double max_l2 = 0.0;
};

struct RunResult {
    VectorField final_state;
    EnergyLedger ledger;
    Trajectory trajectory;
    std::vector<StepStats> stats;
};

/// Leray-projects the initial data and takes round(t_end/dt) steps.
/// Requires t_end/dt to be an integer within 1e-9 relative.
RunResult run(const Grid& grid, const InitialData& init, const ForcingSpec& forcing, const ModelParams& params,
              const SolverConfig& config);

/// Stationary manufactured solution on a 2D box with walls on both axes:
/// ψ = A sin²(πx̂) sin²(πŷ), u* = (∂ψ/∂y, -∂ψ/∂x), q* = 0 and
/// f = curlᵀ(C d^α |ω*|^{p-2} ω*) + ω* × u* from closed-form derivatives.
struct ManufacturedSolution {
    double amplitude = 0.1;

    VectorField velocity(const Grid& grid) const;
    VectorField forcing(const Grid& grid, const ModelParams& params) const;
    /// Analytic vorticity at a point.
    double vorticity(const Domain& domain, const Point& x) const;
};

}  // namespace rotsmag
