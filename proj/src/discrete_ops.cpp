#include "rotsmag/discrete_ops.hpp"

#include "stencil.hpp"

namespace rotsmag {

namespace detail {

int curl_stencil(const Grid& g, const std::array<std::array<int, 3>, 3>& face_shapes, int c,
                 std::array<int, 3> I, std::array<FaceTerm, 4>& out) {
    const int a = (c + 1) % 3;
    const int b = (c + 2) % 3;
    int count = 0;
    auto index_of = [&](int comp, const std::array<int, 3>& idx) {
        const auto& s = face_shapes[comp];
        return static_cast<std::size_t>(idx[0]) +
               static_cast<std::size_t>(s[0]) *
                   (static_cast<std::size_t>(idx[1]) + static_cast<std::size_t>(s[1]) * idx[2]);
    };
    // +∂_a u_b: u_b is cell-centered along a, face-indexed along b.
    if (!boundary_node(g, b, I[b])) {
        for (int side = 0; side < 2; ++side) {
            const Tap t = cell_tap(g, a, I[a] - side);
            std::array<int, 3> idx = I;
            idx[a] = t.index;
            const double coef = (side == 0 ? 1.0 : -1.0) * t.sign / g.spacing(a);
            out[count++] = {b, index_of(b, idx), coef};
        }
    }
    // -∂_b u_a
    if (!boundary_node(g, a, I[a])) {
        for (int side = 0; side < 2; ++side) {
            const Tap t = cell_tap(g, b, I[b] - side);
            std::array<int, 3> idx = I;
            idx[b] = t.index;
            const double coef = -(side == 0 ? 1.0 : -1.0) * t.sign / g.spacing(b);
            out[count++] = {a, index_of(a, idx), coef};
        }
    }
    return count;
}

}  // namespace detail

namespace {

std::array<std::array<int, 3>, 3> face_shapes(const Grid& g) {
    std::array<std::array<int, 3>, 3> s{};
    for (int c = 0; c < g.vector_components(); ++c) s[c] = g.face_shape(c);
    return s;
}

/// Curl component id in 3-space for storage slot `slot`.
int curl_axis(const Grid& g, int slot) { return g.dims() == 2 ? 2 : slot; }

template <class Fn>
void for_each_edge(const EdgeField& w, Fn&& fn) {
    for (int slot = 0; slot < w.components(); ++slot) {
        const Array3& arr = w.component(slot);
        for (int k = 0; k < arr.n[2]; ++k)
            for (int j = 0; j < arr.n[1]; ++j)
                for (int i = 0; i < arr.n[0]; ++i) fn(slot, i, j, k);
    }
}

}  // namespace

EdgeField curl(const VectorField& u) {
    const Grid& g = u.grid();
    EdgeField w(g);
    const auto shapes = face_shapes(g);
    std::array<detail::FaceTerm, 4> terms;
    for_each_edge(w, [&](int slot, int i, int j, int k) {
        const int n = detail::curl_stencil(g, shapes, curl_axis(g, slot), {i, j, k}, terms);
        double acc = 0.0;
        for (int t = 0; t < n; ++t) acc += terms[t].coef * u.component(terms[t].component).data[terms[t].index];
        w.component(slot)(i, j, k) = acc;
    });
    return w;
}

VectorField curl_adjoint(const EdgeField& w) {
    const Grid& g = w.grid();
    VectorField u(g);
    const auto shapes = face_shapes(g);
    const double inv_face_volume = 1.0 / g.cell_volume();
    std::array<detail::FaceTerm, 4> terms;
    for_each_edge(w, [&](int slot, int i, int j, int k) {
        const double v = w.component(slot)(i, j, k) * w.edge_volume(slot, i, j, k) * inv_face_volume;
        if (v == 0.0) return;
        const int n = detail::curl_stencil(g, shapes, curl_axis(g, slot), {i, j, k}, terms);
        for (int t = 0; t < n; ++t) u.component(terms[t].component).data[terms[t].index] += terms[t].coef * v;
    });
    return u;
}

ScalarField divergence(const VectorField& u) {
    const Grid& g = u.grid();
    ScalarField div(g);
    Array3& d = div.component(0);
    const auto& n = g.cells();
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                double acc = 0.0;
                const int idx[3] = {i, j, k};
                for (int c = 0; c < g.vector_components(); ++c) {
                    int hi[3] = {i, j, k};
                    hi[c] = detail::node_wrap(g, c, idx[c] + 1);
                    const Array3& uc = u.component(c);
                    acc += (uc(hi[0], hi[1], hi[2]) - uc(i, j, k)) / g.spacing(c);
                }
                d(i, j, k) = acc;
            }
    return div;
}

VectorField gradient(const ScalarField& phi) {
    const Grid& g = phi.grid();
    VectorField u(g);
    const Array3& p = phi.component(0);
    for (int c = 0; c < g.vector_components(); ++c) {
        Array3& uc = u.component(c);
        for (int k = 0; k < uc.n[2]; ++k)
            for (int j = 0; j < uc.n[1]; ++j)
                for (int i = 0; i < uc.n[0]; ++i) {
                    const int idx[3] = {i, j, k};
                    if (detail::boundary_node(g, c, idx[c])) continue;
                    int lo[3] = {i, j, k};
                    lo[c] = detail::cell_tap(g, c, idx[c] - 1).index;
                    uc(i, j, k) = (p(i, j, k) - p(lo[0], lo[1], lo[2])) / g.spacing(c);
                }
    }
    return u;
}

VectorField potential_curl(const EdgeField& psi) {
    const Grid& g = psi.grid();
    VectorField u(g);
    // Slot of curl component `axis`, or -1 when absent (2D in-plane).
    auto slot_of = [&](int axis) { return g.dims() == 2 ? (axis == 2 ? 0 : -1) : axis; };
    for (int c = 0; c < g.vector_components(); ++c) {
        const int a = (c + 1) % 3;
        const int b = (c + 2) % 3;
        Array3& uc = u.component(c);
        for (int k = 0; k < uc.n[2]; ++k)
            for (int j = 0; j < uc.n[1]; ++j)
                for (int i = 0; i < uc.n[0]; ++i) {
                    double acc = 0.0;
                    // +∂_a ψ_b: ψ_b is node-indexed along a.
                    if (const int sb = slot_of(b); sb >= 0 && a < g.dims()) {
                        int hi[3] = {i, j, k};
                        hi[a] = detail::node_wrap(g, a, hi[a] + 1);
                        const Array3& p = psi.component(sb);
                        acc += (p(hi[0], hi[1], hi[2]) - p(i, j, k)) / g.spacing(a);
                    }
                    // -∂_b ψ_a
                    if (const int sa = slot_of(a); sa >= 0 && b < g.dims()) {
                        int hi[3] = {i, j, k};
                        hi[b] = detail::node_wrap(g, b, hi[b] + 1);
                        const Array3& p = psi.component(sa);
                        acc -= (p(hi[0], hi[1], hi[2]) - p(i, j, k)) / g.spacing(b);
                    }
                    uc(i, j, k) = acc;
                }
    }
    u.enforce_walls();
    return u;
}

}  // namespace rotsmag
