#pragma once

#include <string>
#include <vector>

#include "rotsmag/geometry.hpp"

namespace rotsmag {

/// Closure constants of the weighted curl-curl model
///   curl(C_α ℓ^α |ω|^{p-2} ω).
struct ModelParams {
    double alpha = 0.0;
    double p = 3.0;
    double C_alpha = 1.0;
    /// Regularization of |ω|^{p-2} as (|ω|² + ε²)^{(p-2)/2}; 0 disables it.
    double eps_reg = 0.0;
    MixingLength mixing{};

    /// Dimensional closure: the coefficient becomes C_α v*^θ with θ = 3 - p.
    bool dimensional_closure = false;
    double v_star = 1.0;
    double theta = 0.0;

    /// Effective prefactor of the stress.
    double coefficient() const;

    /// Violations for time-stepping use: p >= 3, 0 <= α < p-1, C_α > 0,
    /// ε >= 0, θ = 3-p when the dimensional closure is on. Empty when valid.
    std::vector<std::string> solver_violations() const;
    /// Violations for the inequality lab: only p > 1, C_α > 0, ε >= 0.
    std::vector<std::string> lab_violations() const;

    /// Throws PreconditionError listing solver_violations().
    void require_solver_range() const;
};

}  // namespace rotsmag
