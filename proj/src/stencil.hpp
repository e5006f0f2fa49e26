#pragma once

#include <array>
#include <cstddef>

#include "rotsmag/grid.hpp"

namespace rotsmag::detail {

/// Cell index along an axis with periodic wrap or odd ghost reflection.
/// sign == -1 marks a reflected ghost value.
struct Tap {
    int index;
    double sign;
};

inline Tap cell_tap(const Grid& g, int axis, int m) noexcept {
    const int n = g.cells(axis);
    if (g.periodic(axis)) return {((m % n) + n) % n, 1.0};
    if (m < 0) return {0, -1.0};
    if (m >= n) return {n - 1, -1.0};
    return {m, 1.0};
}

inline int node_wrap(const Grid& g, int axis, int m) noexcept {
    if (!g.periodic(axis)) return m;
    const int n = g.cells(axis);
    return ((m % n) + n) % n;
}

inline bool boundary_node(const Grid& g, int axis, int m) noexcept {
    return !g.periodic(axis) && (m == 0 || m == g.cells(axis));
}

/// One coefficient of a linear stencil acting on a face field.
struct FaceTerm {
    int component;
    std::size_t index;
    double coef;
};

/// Stencil of curl component c (c = 2 in 2D) at edge (I0, I1, I2).
/// Returns the number of active terms (at most 4). Terms that would touch
/// a Dirichlet boundary face are dropped since those values are zero.
int curl_stencil(const Grid& g, const std::array<std::array<int, 3>, 3>& face_shapes, int c,
                 std::array<int, 3> I, std::array<FaceTerm, 4>& out);

}  // namespace rotsmag::detail
