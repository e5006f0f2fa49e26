#include "rotsmag/grid.hpp"

#include <cmath>
#include <string>

#include "rotsmag/errors.hpp"

namespace rotsmag {

Grid Grid::uniform(const Domain& domain, std::array<int, 3> cells) {
    domain.validate();
    Grid g;
    g.domain_ = domain;
    if (domain.dims() == 2) cells[2] = 1;
    g.n_ = cells;
    for (int a = 0; a < 3; ++a) {
        if (a < domain.dims()) {
            if (cells[a] <= 0) throw ArgumentError("cell count must be positive on every axis");
            g.h_[a] = domain.extents[a] / cells[a];
            g.periodic_[a] = !domain.wall_axes[a];
        } else {
            g.h_[a] = 1.0;
            g.periodic_[a] = true;
        }
    }
    g.validate();
    return g;
}

Grid Grid::window(const Domain& domain, Point origin, std::array<double, 3> extents,
                  std::array<int, 3> cells) {
    domain.validate();
    Grid g;
    g.domain_ = domain;
    if (domain.dims() == 2) cells[2] = 1;
    g.n_ = cells;
    for (int a = 0; a < 3; ++a) {
        if (a >= domain.dims()) {
            g.h_[a] = 1.0;
            g.periodic_[a] = true;
            g.origin_[a] = 0.0;
            continue;
        }
        if (cells[a] <= 0) throw ArgumentError("cell count must be positive on every axis");
        if (!(extents[a] > 0.0)) throw ArgumentError("window extent must be positive");
        const double tol = 1e-12 * domain.extents[a];
        if (origin[a] < -tol || origin[a] + extents[a] > domain.extents[a] + tol) {
            throw DomainError("grid window leaves the domain along axis " + std::to_string(a));
        }
        g.origin_[a] = origin[a];
        g.h_[a] = extents[a] / cells[a];
        const bool full = std::abs(origin[a]) <= tol &&
                          std::abs(extents[a] - domain.extents[a]) <= tol;
        g.periodic_[a] = !domain.wall_axes[a] && full;
    }
    g.validate();
    return g;
}

void Grid::validate() const {
    for (int a = 0; a < dims(); ++a) {
        if (!periodic_[a] && n_[a] < 4) {
            throw ArgumentError("at least 4 cells are required along Dirichlet axis " +
                                std::to_string(a));
        }
    }
}

double Grid::cell_volume() const noexcept {
    double v = 1.0;
    for (int a = 0; a < dims(); ++a) v *= h_[a];
    return v;
}

std::array<int, 3> Grid::face_shape(int component) const noexcept {
    std::array<int, 3> s = n_;
    s[component] = nodes(component);
    return s;
}

std::array<int, 3> Grid::edge_shape(int component) const noexcept {
    if (dims() == 2) return {nodes(0), nodes(1), 1};
    std::array<int, 3> s{nodes(0), nodes(1), nodes(2)};
    s[component] = n_[component];
    return s;
}

bool Grid::operator==(const Grid& o) const noexcept {
    return domain_.kind == o.domain_.kind && domain_.extents == o.domain_.extents &&
           domain_.wall_axes == o.domain_.wall_axes && n_ == o.n_ && h_ == o.h_ &&
           origin_ == o.origin_ && periodic_ == o.periodic_;
}

}  // namespace rotsmag
