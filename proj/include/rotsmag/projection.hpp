#pragma once

#include <memory>
#include <utility>

#include "rotsmag/fields.hpp"

namespace rotsmag {

struct PoissonOptions {
    /// Absolute max-norm tolerance on the residual of div grad φ = b.
    double tol = 1e-10;
    /// Iteration cap; 0 selects 10 × number of cells.
    int max_iterations = 0;
    /// Precondition CG with the exact Fourier/cosine inverse of the
    /// constant-coefficient operator. Without it, plain CG.
    bool spectral_preconditioner = true;
};

struct PoissonStats {
    int iterations = 0;
    double residual = 0.0;
};

/// Discrete Leray projector P u = u - grad φ, div grad φ = div u, with
/// homogeneous Neumann conditions on Dirichlet axes and periodicity
/// elsewhere. The system is solved by conjugate gradients.
///
/// Holds FFT plans and scratch space, so one instance must not be used
/// from two threads at once.
class LerayProjector {
public:
    explicit LerayProjector(const Grid& grid, PoissonOptions options = {});
    ~LerayProjector();
    LerayProjector(LerayProjector&&) noexcept;
    LerayProjector& operator=(LerayProjector&&) noexcept;

    const Grid& grid() const noexcept;
    const PoissonOptions& options() const noexcept;

    /// Solve div grad φ = rhs (rhs mean removed; φ has zero mean).
    /// Throws SolverError when the iteration cap is hit.
    ScalarField solve_poisson(const ScalarField& rhs, PoissonStats* stats = nullptr) const;

    /// (u - grad φ, φ).
    std::pair<VectorField, ScalarField> project(const VectorField& u, PoissonStats* stats = nullptr) const;

    /// Projection discarding φ.
    VectorField operator()(const VectorField& u) const { return project(u).first; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot projection with the default options and the given tolerance.
std::pair<VectorField, ScalarField> leray_project(const VectorField& u, double tol);

}  // namespace rotsmag
