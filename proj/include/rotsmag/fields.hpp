#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "rotsmag/grid.hpp"

namespace rotsmag {

/// Common storage for the three field kinds: one Array3 per component.
template <class Derived>
class StaggeredField {
public:
    const Grid& grid() const noexcept { return grid_; }
    int components() const noexcept { return static_cast<int>(comp_.size()); }
    Array3& component(int c) noexcept { return comp_[c]; }
    const Array3& component(int c) const noexcept { return comp_[c]; }

    Derived& operator+=(const Derived& o) {
        for (int c = 0; c < components(); ++c) {
            auto& a = comp_[c].data;
            const auto& b = o.comp_[c].data;
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        }
        return self();
    }
    Derived& operator-=(const Derived& o) {
        for (int c = 0; c < components(); ++c) {
            auto& a = comp_[c].data;
            const auto& b = o.comp_[c].data;
            for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
        }
        return self();
    }
    Derived& operator*=(double s) {
        for (auto& arr : comp_)
            for (double& v : arr.data) v *= s;
        return self();
    }
    /// this += a * x
    void axpy(double a, const Derived& x) {
        for (int c = 0; c < components(); ++c) {
            auto& y = comp_[c].data;
            const auto& xv = x.comp_[c].data;
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * xv[i];
        }
    }

    friend Derived operator+(Derived a, const Derived& b) { return a += b; }
    friend Derived operator-(Derived a, const Derived& b) { return a -= b; }
    friend Derived operator*(double s, Derived a) { return a *= s; }

    double max_abs() const noexcept {
        double m = 0.0;
        for (const auto& arr : comp_)
            for (double v : arr.data) m = std::max(m, std::abs(v));
        return m;
    }
    bool all_finite() const noexcept {
        for (const auto& arr : comp_)
            for (double v : arr.data)
                if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const StaggeredField& o) const { return grid_ == o.grid_ && comp_ == o.comp_; }

protected:
    StaggeredField(const Grid& g, std::vector<Array3> comps) : grid_(g), comp_(std::move(comps)) {}

private:
    Derived& self() { return static_cast<Derived&>(*this); }

    Grid grid_;
    std::vector<Array3> comp_;
};

/// Velocity-like field; component c sits on faces normal to axis c.
class VectorField : public StaggeredField<VectorField> {
public:
    explicit VectorField(const Grid& g);

    /// Fill every unknown face from an analytic vector function; boundary
    /// faces of Dirichlet axes stay zero.
    static VectorField from_function(const Grid& g, const std::function<Point(const Point&)>& f);

    /// Zero the normal component on Dirichlet boundary faces.
    void enforce_walls();

    /// Position of face (i,j,k) of component c.
    Point face_position(int c, int i, int j, int k) const;
};

/// Curl-type field: 3D components on edges, 2D scalar on nodes.
class EdgeField : public StaggeredField<EdgeField> {
public:
    explicit EdgeField(const Grid& g);

    Point edge_position(int c, int i, int j, int k) const;

    /// Dual control-volume size of an edge (node in 2D), clipped to the grid:
    /// halved per Dirichlet boundary node index.
    double edge_volume(int c, int i, int j, int k) const;
};

/// Cell-centered scalar field.
class ScalarField : public StaggeredField<ScalarField> {
public:
    explicit ScalarField(const Grid& g);

    static ScalarField from_function(const Grid& g, const std::function<double(const Point&)>& f);

    Point cell_position(int i, int j, int k) const;

    /// Subtract the volume mean (fixes the additive constant of a potential).
    void remove_mean();
};

/// L²(Ω) inner products in the midpoint quadrature of each location.
double inner(const VectorField& a, const VectorField& b);
double inner(const EdgeField& a, const EdgeField& b);
double inner(const ScalarField& a, const ScalarField& b);

double l2_norm(const VectorField& u);

}  // namespace rotsmag
