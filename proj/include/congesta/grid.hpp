#pragma once

#include "congesta/errors.hpp"
#include "congesta/vec.hpp"

namespace congesta {

/// Node-centered uniform rectangular grid. Quadrature runs over the
/// (nx-1) x (ny-1) cells between nodes; contouring runs on the nodes.
/// One-dimensional problems use ny = 1 (a single row of nodes at x2 = 0).
struct GridSpec {
    Vec2 lo{-3.0, -3.0};
    Vec2 hi{3.0, 3.0};
    int nx = 256;
    int ny = 256;

    double hx() const { return (hi.x - lo.x) / (nx - 1); }
    double hy() const { return ny > 1 ? (hi.y - lo.y) / (ny - 1) : 0.0; }

    Vec2 node(int i, int j) const {
        return {lo.x + i * hx(), ny > 1 ? lo.y + j * hy() : 0.0};
    }
    Vec2 cell_center(int i, int j) const {
        return {lo.x + (i + 0.5) * hx(), ny > 1 ? lo.y + (j + 0.5) * hy() : 0.0};
    }
    int cells_x() const { return nx - 1; }
    int cells_y() const { return ny > 1 ? ny - 1 : 1; }
    double cell_area() const { return ny > 1 ? hx() * hy() : hx(); }

    void validate() const {
        if (nx < 8 || (ny != 1 && ny < 8))
            fail(errc::config, "grid resolution too small");
        if (!(hi.x > lo.x) || (ny > 1 && !(hi.y > lo.y)))
            fail(errc::config, "grid bounding box is empty");
    }
};

} // namespace congesta
