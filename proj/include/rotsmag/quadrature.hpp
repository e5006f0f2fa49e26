#pragma once

#include <array>
#include <cstddef>

#include "rotsmag/fields.hpp"

namespace rotsmag {

/// Corner (sub-cell) quadrature shared by every weighted integral.
///
/// Each cell is split into 2^d sub-cells. The quadrature point of a
/// sub-cell is its centroid, a quarter cell from the nearest cell faces,
/// so no point ever sits on a wall. At the corner indexed by s ∈ {0,1}^d
/// every staggered quantity has exactly one adjacent storage location:
/// the face of each component on side s, the edge (node in 2D) at that
/// corner. Vector values are therefore assembled without interpolation
/// and pointwise identities such as (ω × u)·u = 0 hold exactly.
namespace corner {

inline int per_cell(const Grid& g) noexcept { return 1 << g.dims(); }
inline std::size_t count(const Grid& g) noexcept { return g.cell_count() * per_cell(g); }
inline double volume(const Grid& g) noexcept { return g.cell_volume() / per_cell(g); }
inline int bit(int s, int axis) noexcept { return (s >> axis) & 1; }

/// Flat quadrature index: cell-major, corner-minor.
inline std::size_t flat(const Grid& g, int i, int j, int k, int s) noexcept {
    const auto& n = g.cells();
    return (static_cast<std::size_t>(i) +
            static_cast<std::size_t>(n[0]) * (static_cast<std::size_t>(j) +
                                              static_cast<std::size_t>(n[1]) * k)) *
               per_cell(g) +
           s;
}

Point position(const Grid& g, int i, int j, int k, int s);

/// Storage index of face component c adjacent to corner s of cell (i,j,k).
std::size_t face_index(const Grid& g, int c, int i, int j, int k, int s);
/// Storage index of curl component c adjacent to the corner.
std::size_t edge_index(const Grid& g, int c, int i, int j, int k, int s);

/// Velocity vector at a corner (third entry zero in 2D).
std::array<double, 3> gather(const VectorField& u, int i, int j, int k, int s);
/// Curl vector at a corner; in 2D the scalar vorticity is returned as the
/// third (out-of-plane) entry.
std::array<double, 3> gather(const EdgeField& w, int i, int j, int k, int s);

/// Full velocity gradient ∂u_c/∂x_a at a corner, row c, column a.
std::array<std::array<double, 3>, 3> gradient(const VectorField& u, int i, int j, int k, int s);
/// Gradient of a cell-centered scalar (zero Dirichlet extension) at a corner.
std::array<double, 3> gradient(const ScalarField& f, int i, int j, int k, int s);

/// Invoke fn(i, j, k, s, q) for every quadrature point in flat order.
template <class Fn>
void for_each(const Grid& g, Fn&& fn) {
    const auto& n = g.cells();
    const int m = per_cell(g);
    std::size_t q = 0;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i)
                for (int s = 0; s < m; ++s, ++q) fn(i, j, k, s, q);
}

}  // namespace corner
}  // namespace rotsmag
