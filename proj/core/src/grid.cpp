#include "rdfront/grid.hpp"

#include <algorithm>
#include <cmath>

namespace rdfront {

namespace {

int node_count(double a, double b, double h) {
    double n = (b - a) / h;
    int ni = int(std::lround(n));
    if (ni < 1 || std::abs(n - ni) > 1e-9 * std::max(1.0, std::abs(n)))
        throw ConfigFault("grid: extent not an integer multiple of spacing");
    return ni + 1;
}

} // namespace

Grid Grid::make_1d(double a0, double b0, double h0, BC lo, BC hi) {
    Grid g;
    g.dim = 1;
    g.a[0] = a0;
    g.b[0] = b0;
    g.h[0] = h0;
    g.n[0] = node_count(a0, b0, h0);
    g.n[1] = 1;
    g.bc[face_x_lo] = lo;
    g.bc[face_x_hi] = hi;
    return g;
}

Grid Grid::make_2d(double ax, double bx, double hx, double ay, double by,
                   double hy, BC xlo, BC xhi, BC ylo, BC yhi) {
    Grid g;
    g.dim = 2;
    g.a[0] = ax; g.b[0] = bx; g.h[0] = hx;
    g.a[1] = ay; g.b[1] = by; g.h[1] = hy;
    g.n[0] = node_count(ax, bx, hx);
    g.n[1] = node_count(ay, by, hy);
    g.bc[face_x_lo] = xlo;
    g.bc[face_x_hi] = xhi;
    g.bc[face_y_lo] = ylo;
    g.bc[face_y_hi] = yhi;
    return g;
}

bool Grid::same_layout(const Grid& o) const {
    if (dim != o.dim) return false;
    for (int k = 0; k < dim; ++k)
        if (n[k] != o.n[k] || std::abs(a[k] - o.a[k]) > 1e-12 ||
            std::abs(h[k] - o.h[k]) > 1e-14)
            return false;
    return true;
}

Grid Grid::shifted(Vec2 delta) const {
    Grid g = *this;
    g.a[0] += delta.x;
    g.b[0] += delta.x;
    if (dim == 2) {
        g.a[1] += delta.y;
        g.b[1] += delta.y;
    }
    return g;
}

double Field::min() const {
    double m = v.empty() ? 0.0 : v[0];
    for (double x : v) m = std::min(m, x);
    return m;
}

double Field::max() const {
    double m = v.empty() ? 0.0 : v[0];
    for (double x : v) m = std::max(m, x);
    return m;
}

} // namespace rdfront
