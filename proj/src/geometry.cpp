#include "rotsmag/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rotsmag/errors.hpp"

namespace rotsmag {

void Domain::validate() const {
    bool any_wall = false;
    for (int a = 0; a < dims(); ++a) {
        if (!(extents[a] > 0.0) || !std::isfinite(extents[a])) {
            throw ArgumentError("domain extent along axis " + std::to_string(a) +
                                " must be strictly positive");
        }
        any_wall = any_wall || wall_axes[a];
    }
    if (!any_wall) {
        throw ArgumentError("domain needs at least one wall axis (distance is undefined otherwise)");
    }
}

double Domain::volume() const noexcept {
    double v = 1.0;
    for (int a = 0; a < dims(); ++a) v *= extents[a];
    return v;
}

Domain Domain::box3d(double lx, double ly, double lz) {
    return Domain{Kind::box3d, {lx, ly, lz}, {true, true, true}};
}

Domain Domain::channel3d(double lx, double ly, double lz) {
    return Domain{Kind::channel3d, {lx, ly, lz}, {false, false, true}};
}

Domain Domain::box2d(double lx, double ly, bool wall_y_only) {
    return Domain{Kind::box2d, {lx, ly, 1.0}, {!wall_y_only, true, false}};
}

std::string to_string(Domain::Kind kind) {
    switch (kind) {
        case Domain::Kind::box3d: return "box3d";
        case Domain::Kind::channel3d: return "channel3d";
        case Domain::Kind::box2d: return "box2d";
    }
    return "?";
}

Domain::Kind domain_kind_from_string(const std::string& name) {
    if (name == "box3d") return Domain::Kind::box3d;
    if (name == "channel3d") return Domain::Kind::channel3d;
    if (name == "box2d") return Domain::Kind::box2d;
    throw ArgumentError("unknown domain kind '" + name + "'");
}

void MixingLength::validate() const {
    if (!(kappa > 0.0)) throw ArgumentError("mixing length: kappa must be > 0");
    if (!(A > 0.0)) throw ArgumentError("mixing length: A must be > 0");
    if (!(ell0 > 0.0)) throw ArgumentError("mixing length: ell0 must be > 0");
}

double MixingLength::of_distance(double d) const {
    switch (variant) {
        case Variant::distance: return d;
        case Variant::obukhov: return kappa * d;
        case Variant::van_driest: return -kappa * d * std::expm1(-d / A);
    }
    return d;
}

std::string to_string(MixingLength::Variant variant) {
    switch (variant) {
        case MixingLength::Variant::distance: return "distance";
        case MixingLength::Variant::obukhov: return "obukhov";
        case MixingLength::Variant::van_driest: return "van_driest";
    }
    return "?";
}

MixingLength::Variant mixing_variant_from_string(const std::string& name) {
    if (name == "distance") return MixingLength::Variant::distance;
    if (name == "obukhov") return MixingLength::Variant::obukhov;
    if (name == "van_driest") return MixingLength::Variant::van_driest;
    throw ArgumentError("unknown mixing-length variant '" + name + "'");
}

double distance(const Domain& domain, const Point& x) {
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < domain.dims(); ++a) {
        if (!(x[a] >= 0.0 && x[a] <= domain.extents[a])) {
            throw DomainError("point outside domain along axis " + std::to_string(a));
        }
        if (domain.wall_axes[a]) d = std::min({d, x[a], domain.extents[a] - x[a]});
    }
    if (!(d > 0.0)) throw DomainError("point lies on a wall (d = 0)");
    return d;
}

double mixing_length(const MixingLength& ml, const Domain& domain, const Point& x) {
    return ml.of_distance(distance(domain, x));
}

}  // namespace rotsmag
