#pragma once

#include <array>
#include <string>

namespace rotsmag {

using Point = std::array<double, 3>;

/// Box or channel domain anchored at the origin. Axes flagged in
/// `wall_axes` carry homogeneous Dirichlet walls at 0 and extents[axis];
/// the others are periodic. In 2D the third axis is ignored.
struct Domain {
    enum class Kind { box3d, channel3d, box2d };

    Kind kind = Kind::channel3d;
    std::array<double, 3> extents{1.0, 1.0, 1.0};
    std::array<bool, 3> wall_axes{false, false, true};

    int dims() const noexcept { return kind == Kind::box2d ? 2 : 3; }

    /// Throws ArgumentError unless extents are positive and some axis is a wall.
    void validate() const;

    double volume() const noexcept;

    static Domain box3d(double lx, double ly, double lz);
    static Domain channel3d(double lx, double ly, double lz);
    /// 2D box; pass wall_y_only=true for a periodic-in-x channel.
    static Domain box2d(double lx, double ly, bool wall_y_only = false);
};

std::string to_string(Domain::Kind kind);
Domain::Kind domain_kind_from_string(const std::string& name);

/// Mixing-length law ℓ as a function of the wall distance d.
///   distance:   ℓ = d
///   obukhov:    ℓ = κ d
///   van_driest: ℓ = κ d (1 - exp(-d/A))
struct MixingLength {
    enum class Variant { distance, obukhov, van_driest };

    Variant variant = Variant::distance;
    double kappa = 0.41;
    double A = 0.05;
    double ell0 = 1.0;

    void validate() const;

    /// ℓ evaluated at wall distance d > 0.
    double of_distance(double d) const;
};

std::string to_string(MixingLength::Variant variant);
MixingLength::Variant mixing_variant_from_string(const std::string& name);

/// Euclidean distance from x to the nearest wall. Throws DomainError when
/// x lies outside the closed domain or on a wall (d = 0).
double distance(const Domain& domain, const Point& x);

/// ℓ(x) for the configured law. Same error behaviour as distance().
double mixing_length(const MixingLength& ml, const Domain& domain, const Point& x);

}  // namespace rotsmag
