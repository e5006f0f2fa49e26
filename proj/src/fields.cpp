#include "rotsmag/fields.hpp"

#include <cmath>

namespace rotsmag {

namespace {

std::vector<Array3> face_arrays(const Grid& g) {
    std::vector<Array3> v;
    for (int c = 0; c < g.vector_components(); ++c) v.emplace_back(g.face_shape(c));
    return v;
}

std::vector<Array3> edge_arrays(const Grid& g) {
    std::vector<Array3> v;
    for (int c = 0; c < g.curl_components(); ++c) v.emplace_back(g.edge_shape(c));
    return v;
}

}  // namespace

VectorField::VectorField(const Grid& g) : StaggeredField(g, face_arrays(g)) {}

Point VectorField::face_position(int c, int i, int j, int k) const {
    const Grid& g = grid();
    const int idx[3] = {i, j, k};
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dims(); ++a) {
        x[a] = (a == c) ? g.node(a, idx[a]) : g.cell_center(a, idx[a]);
    }
    return x;
}

VectorField VectorField::from_function(const Grid& g,
                                       const std::function<Point(const Point&)>& f) {
    VectorField u(g);
    for (int c = 0; c < g.vector_components(); ++c) {
        Array3& arr = u.component(c);
        for (int k = 0; k < arr.n[2]; ++k)
            for (int j = 0; j < arr.n[1]; ++j)
                for (int i = 0; i < arr.n[0]; ++i) arr(i, j, k) = f(u.face_position(c, i, j, k))[c];
    }
    u.enforce_walls();
    return u;
}

void VectorField::enforce_walls() {
    const Grid& g = grid();
    for (int c = 0; c < g.vector_components(); ++c) {
        if (g.periodic(c)) continue;
        Array3& arr = component(c);
        const int last = g.cells(c);
        for (int k = 0; k < arr.n[2]; ++k)
            for (int j = 0; j < arr.n[1]; ++j)
                for (int i = 0; i < arr.n[0]; ++i) {
                    const int idx[3] = {i, j, k};
                    if (idx[c] == 0 || idx[c] == last) arr(i, j, k) = 0.0;
                }
    }
}

EdgeField::EdgeField(const Grid& g) : StaggeredField(g, edge_arrays(g)) {}

Point EdgeField::edge_position(int c, int i, int j, int k) const {
    const Grid& g = grid();
    const int idx[3] = {i, j, k};
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dims(); ++a) {
        const bool along = g.dims() == 3 && a == c;
        x[a] = along ? g.cell_center(a, idx[a]) : g.node(a, idx[a]);
    }
    return x;
}

double EdgeField::edge_volume(int c, int i, int j, int k) const {
    const Grid& g = grid();
    const int idx[3] = {i, j, k};
    double v = g.cell_volume();
    for (int a = 0; a < g.dims(); ++a) {
        const bool node_axis = !(g.dims() == 3 && a == c);
        if (node_axis && !g.periodic(a) && (idx[a] == 0 || idx[a] == g.cells(a))) v *= 0.5;
    }
    return v;
}

ScalarField::ScalarField(const Grid& g) : StaggeredField(g, {Array3(g.cell_shape())}) {}

Point ScalarField::cell_position(int i, int j, int k) const {
    const Grid& g = grid();
    const int idx[3] = {i, j, k};
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dims(); ++a) x[a] = g.cell_center(a, idx[a]);
    return x;
}

ScalarField ScalarField::from_function(const Grid& g,
                                       const std::function<double(const Point&)>& f) {
    ScalarField s(g);
    Array3& arr = s.component(0);
    for (int k = 0; k < arr.n[2]; ++k)
        for (int j = 0; j < arr.n[1]; ++j)
            for (int i = 0; i < arr.n[0]; ++i) arr(i, j, k) = f(s.cell_position(i, j, k));
    return s;
}

void ScalarField::remove_mean() {
    auto& d = component(0).data;
    double sum = 0.0;
    for (double v : d) sum += v;
    const double mean = sum / static_cast<double>(d.size());
    for (double& v : d) v -= mean;
}

double inner(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    for (int c = 0; c < a.components(); ++c) {
        const auto& x = a.component(c).data;
        const auto& y = b.component(c).data;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    }
    return s * a.grid().cell_volume();
}

double inner(const EdgeField& a, const EdgeField& b) {
    double s = 0.0;
    for (int c = 0; c < a.components(); ++c) {
        const Array3& x = a.component(c);
        const Array3& y = b.component(c);
        for (int k = 0; k < x.n[2]; ++k)
            for (int j = 0; j < x.n[1]; ++j)
                for (int i = 0; i < x.n[0]; ++i)
                    s += a.edge_volume(c, i, j, k) * x(i, j, k) * y(i, j, k);
    }
    return s;
}

double inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    const auto& x = a.component(0).data;
    const auto& y = b.component(0).data;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s * a.grid().cell_volume();
}

double l2_norm(const VectorField& u) { return std::sqrt(inner(u, u)); }

}  // namespace rotsmag
