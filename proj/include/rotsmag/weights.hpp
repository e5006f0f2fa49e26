#pragma once

#include <vector>

#include "rotsmag/geometry.hpp"
#include "rotsmag/grid.hpp"

namespace rotsmag {

/// Where a set of weight samples lives.
enum class SampleLocation { corner, cell };

/// ℓ(x)^α at the quadrature points of a grid. Samples are never clamped:
/// every point is interior so every value is strictly positive.
struct WeightSamples {
    double alpha = 0.0;
    SampleLocation location = SampleLocation::corner;
    std::vector<double> values;
};

/// ℓ^α at every quadrature point of `location`. Requires alpha >= 0.
WeightSamples weight_field(const Grid& grid, const MixingLength& ml, double alpha,
                           SampleLocation location = SampleLocation::corner);

/// Same sampling rule for any real exponent, including the negative powers
/// that appear in Hardy-type estimates.
WeightSamples power_samples(const Grid& grid, const MixingLength& ml, double exponent,
                            SampleLocation location = SampleLocation::corner);

/// Axis-aligned cube [lo, lo + side]^d, clipped to the domain on wall axes.
struct Cube {
    Point lo{0.0, 0.0, 0.0};
    double side = 1.0;
};

/// Finite cube family for the A_p estimator.
///
/// Each cube average is a composite midpoint rule: `points` midpoints per
/// axis, and on an axis where the cube touches a wall the interval is first
/// split into `wall_layers` dyadic layers [2^{-j-1}s, 2^{-j}s] plus the
/// innermost remainder, each carrying `points` midpoints. Raising
/// `wall_layers` is one near-wall refinement level.
struct CubeFamily {
    std::vector<Cube> cubes;
    int points = 4;
    int wall_layers = 0;

    /// Wall-touching cubes of sides H, H/2, ..., H/2^(sizes-1) on the lower
    /// face of the first wall axis, the same cubes lifted off the wall by
    /// one side length, and a centered interior cube. H is a quarter of
    /// the smallest extent.
    static CubeFamily dyadic(const Domain& domain, int sizes, int points, int wall_layers);
};

/// max over the family of (avg ρ)(avg ρ^{1/(1-p)})^{p-1} with ρ = d^α.
/// A lower bound for the A_p constant of d^α. Requires p > 1 and a
/// non-empty family.
double muckenhoupt_constant(const Grid& grid, double alpha, double p, const CubeFamily& family);

/// Value for a single cube.
double muckenhoupt_cube(const Domain& domain, double alpha, double p, const Cube& cube,
                        int points, int wall_layers);

}  // namespace rotsmag
