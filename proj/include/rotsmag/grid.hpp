#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rotsmag/geometry.hpp"

namespace rotsmag {

/// Dense 3-index array, first index fastest. 2D data uses n[2] == 1.
struct Array3 {
    std::array<int, 3> n{0, 0, 0};
    std::vector<double> data;

    Array3() = default;
    explicit Array3(std::array<int, 3> shape, double fill = 0.0)
        : n(shape), data(static_cast<std::size_t>(shape[0]) * shape[1] * shape[2], fill) {}

    std::size_t index(int i, int j, int k) const noexcept {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(n[0]) * (static_cast<std::size_t>(j) +
                                                 static_cast<std::size_t>(n[1]) * k);
    }
    double& operator()(int i, int j, int k) noexcept { return data[index(i, j, k)]; }
    double operator()(int i, int j, int k) const noexcept { return data[index(i, j, k)]; }
    std::size_t size() const noexcept { return data.size(); }

    bool operator==(const Array3&) const = default;
};

/// Structured MAC grid over a box-shaped window of a Domain.
///
/// Unknowns live at cell centers (scalars), face centers (velocity
/// components, normal to their face) and edges (curl components; nodes in
/// 2D). Along a periodic axis there are n nodes; along a Dirichlet axis
/// there are n+1, with boundary faces stored but held at zero.
///
/// A window that does not span a full periodic axis, or that stops short of
/// a wall, is closed by Dirichlet truncation: fields are zero-extended
/// there. The weight always uses the distance to the true walls of the
/// domain.
class Grid {
public:
    /// Grid covering the whole domain.
    static Grid uniform(const Domain& domain, std::array<int, 3> cells);

    /// Grid covering [origin, origin + extents] inside the domain.
    static Grid window(const Domain& domain, Point origin, std::array<double, 3> extents,
                       std::array<int, 3> cells);

    int dims() const noexcept { return domain_.dims(); }
    const Domain& domain() const noexcept { return domain_; }
    const std::array<int, 3>& cells() const noexcept { return n_; }
    int cells(int axis) const noexcept { return n_[axis]; }
    double spacing(int axis) const noexcept { return h_[axis]; }
    const std::array<double, 3>& spacing() const noexcept { return h_; }
    const Point& origin() const noexcept { return origin_; }
    bool periodic(int axis) const noexcept { return periodic_[axis]; }

    /// Number of node positions along an axis.
    int nodes(int axis) const noexcept { return periodic_[axis] ? n_[axis] : n_[axis] + 1; }

    std::size_t cell_count() const noexcept {
        return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2];
    }
    double cell_volume() const noexcept;
    double volume() const noexcept { return cell_volume() * static_cast<double>(cell_count()); }

    /// Number of vector (face) components: 2 or 3.
    int vector_components() const noexcept { return dims(); }
    /// Number of curl components: 1 in 2D (scalar vorticity), 3 in 3D.
    int curl_components() const noexcept { return dims() == 2 ? 1 : 3; }

    std::array<int, 3> cell_shape() const noexcept { return n_; }
    std::array<int, 3> face_shape(int component) const noexcept;
    std::array<int, 3> edge_shape(int component) const noexcept;

    double cell_center(int axis, int i) const noexcept { return origin_[axis] + (i + 0.5) * h_[axis]; }
    double node(int axis, int i) const noexcept { return origin_[axis] + i * h_[axis]; }

    bool operator==(const Grid& other) const noexcept;

private:
    Grid() = default;
    void validate() const;

    Domain domain_{};
    std::array<int, 3> n_{1, 1, 1};
    std::array<double, 3> h_{1.0, 1.0, 1.0};
    Point origin_{0.0, 0.0, 0.0};
    std::array<bool, 3> periodic_{false, false, false};
};

}  // namespace rotsmag
