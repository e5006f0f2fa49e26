#include "rotsmag/quadrature.hpp"

#include "stencil.hpp"

namespace rotsmag::corner {

namespace {

std::size_t linear(const std::array<int, 3>& shape, const std::array<int, 3>& idx) {
    return static_cast<std::size_t>(idx[0]) +
           static_cast<std::size_t>(shape[0]) *
               (static_cast<std::size_t>(idx[1]) + static_cast<std::size_t>(shape[1]) * idx[2]);
}

}  // namespace

Point position(const Grid& g, int i, int j, int k, int s) {
    const int idx[3] = {i, j, k};
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dims(); ++a) {
        x[a] = g.origin()[a] + (idx[a] + 0.25 + 0.5 * bit(s, a)) * g.spacing(a);
    }
    return x;
}

std::size_t face_index(const Grid& g, int c, int i, int j, int k, int s) {
    std::array<int, 3> idx{i, j, k};
    idx[c] = detail::node_wrap(g, c, idx[c] + bit(s, c));
    return linear(g.face_shape(c), idx);
}

std::size_t edge_index(const Grid& g, int c, int i, int j, int k, int s) {
    std::array<int, 3> idx{i, j, k};
    for (int a = 0; a < g.dims(); ++a) {
        if (g.dims() == 3 && a == c) continue;
        idx[a] = detail::node_wrap(g, a, idx[a] + bit(s, a));
    }
    return linear(g.edge_shape(c), idx);
}

std::array<double, 3> gather(const VectorField& u, int i, int j, int k, int s) {
    const Grid& g = u.grid();
    std::array<double, 3> v{0.0, 0.0, 0.0};
    for (int c = 0; c < g.vector_components(); ++c) {
        v[c] = u.component(c).data[face_index(g, c, i, j, k, s)];
    }
    return v;
}

std::array<double, 3> gather(const EdgeField& w, int i, int j, int k, int s) {
    const Grid& g = w.grid();
    if (g.dims() == 2) return {0.0, 0.0, w.component(0).data[edge_index(g, 0, i, j, k, s)]};
    std::array<double, 3> v{};
    for (int c = 0; c < 3; ++c) v[c] = w.component(c).data[edge_index(g, c, i, j, k, s)];
    return v;
}

std::array<std::array<double, 3>, 3> gradient(const VectorField& u, int i, int j, int k, int s) {
    const Grid& g = u.grid();
    std::array<std::array<double, 3>, 3> G{};
    const std::array<int, 3> cell{i, j, k};
    for (int c = 0; c < g.dims(); ++c) {
        const Array3& uc = u.component(c);
        for (int a = 0; a < g.dims(); ++a) {
            if (a == c) {
                std::array<int, 3> hi = cell;
                hi[c] = detail::node_wrap(g, c, cell[c] + 1);
                G[c][a] = (uc.data[linear(uc.n, hi)] - uc.data[linear(uc.n, cell)]) / g.spacing(c);
                continue;
            }
            std::array<int, 3> idx = cell;
            idx[c] = detail::node_wrap(g, c, cell[c] + bit(s, c));
            if (detail::boundary_node(g, c, idx[c])) continue;
            const int node_a = cell[a] + bit(s, a);
            const detail::Tap hi = detail::cell_tap(g, a, node_a);
            const detail::Tap lo = detail::cell_tap(g, a, node_a - 1);
            std::array<int, 3> ih = idx, il = idx;
            ih[a] = hi.index;
            il[a] = lo.index;
            G[c][a] = (hi.sign * uc.data[linear(uc.n, ih)] - lo.sign * uc.data[linear(uc.n, il)]) /
                      g.spacing(a);
        }
    }
    return G;
}

std::array<double, 3> gradient(const ScalarField& f, int i, int j, int k, int s) {
    const Grid& g = f.grid();
    const Array3& arr = f.component(0);
    std::array<double, 3> grad{0.0, 0.0, 0.0};
    const std::array<int, 3> cell{i, j, k};
    for (int a = 0; a < g.dims(); ++a) {
        const int node_a = cell[a] + bit(s, a);
        const detail::Tap hi = detail::cell_tap(g, a, node_a);
        const detail::Tap lo = detail::cell_tap(g, a, node_a - 1);
        std::array<int, 3> ih = cell, il = cell;
        ih[a] = hi.index;
        il[a] = lo.index;
        grad[a] = (hi.sign * arr.data[linear(arr.n, ih)] - lo.sign * arr.data[linear(arr.n, il)]) /
                  g.spacing(a);
    }
    return grad;
}

}  // namespace rotsmag::corner
