#ifndef RDFRONT_GRID_HPP
#define RDFRONT_GRID_HPP

#include <cstddef>
#include <vector>

#include "rdfront/errors.hpp"
#include "rdfront/vec.hpp"

namespace rdfront {

/** Per-face boundary treatment for the truncated box. */
enum class BC { clamped, zero_flux };

/** Face order used by Grid::bc: x_lo, x_hi, y_lo, y_hi. */
enum Face { face_x_lo = 0, face_x_hi = 1, face_y_lo = 2, face_y_hi = 3 };

/**
 * Uniform node-centered box grid. Nodes sit at a + i*h inclusive of both
 * ends; values are stored row-major with y as the slow index.
 */
struct Grid {
    int dim = 2;
    double a[2] = {0.0, 0.0};
    double b[2] = {1.0, 1.0};
    double h[2] = {0.1, 0.1};
    int n[2] = {11, 1};
    BC bc[4] = {BC::zero_flux, BC::zero_flux, BC::zero_flux, BC::zero_flux};

    static Grid make_1d(double a0, double b0, double h0, BC lo, BC hi);
    static Grid make_2d(double ax, double bx, double hx, double ay, double by,
                        double hy, BC xlo, BC xhi, BC ylo, BC yhi);

    int nx() const { return n[0]; }
    int ny() const { return dim == 2 ? n[1] : 1; }
    std::size_t size() const { return std::size_t(nx()) * ny(); }
    std::size_t index(int i, int j) const { return std::size_t(j) * nx() + i; }
    Vec2 point(int i, int j) const {
        return {a[0] + i * h[0], dim == 2 ? a[1] + j * h[1] : 0.0};
    }
    bool same_layout(const Grid& o) const;

    // Translate the window by whole-period multiples (co-moving frames).
    Grid shifted(Vec2 delta) const;
};

/** Values on a grid at one instant. */
struct Field {
    Grid grid;
    std::vector<double> v;
    double t = 0.0;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0, double time = 0.0)
        : grid(g), v(g.size(), fill), t(time) {}

    double& at(int i, int j) { return v[grid.index(i, j)]; }
    double at(int i, int j) const { return v[grid.index(i, j)]; }

    double min() const;
    double max() const;
};

/** Fill a field by sampling a function of absolute coordinates. */
template <class F>
Field sample_field(const Grid& g, F&& f, double t = 0.0) {
    Field u(g, 0.0, t);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            u.at(i, j) = f(g.point(i, j));
    return u;
}

} // namespace rdfront

#endif
