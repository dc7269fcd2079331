#ifndef RDFRONT_VEC_HPP
#define RDFRONT_VEC_HPP

#include <cmath>

namespace rdfront {

/** Point or direction in the plane. One-dimensional problems use x only. */
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
    Vec2 normalized() const {
        double n = norm();
        return {x / n, y / n};
    }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/** Symmetric 2x2 matrix; a12 is the off-diagonal entry. */
struct SymMat2 {
    double a11 = 1.0;
    double a12 = 0.0;
    double a22 = 1.0;

    double quad(const Vec2& v) const {
        return a11 * v.x * v.x + 2.0 * a12 * v.x * v.y + a22 * v.y * v.y;
    }
    // Eigenvalues of the symmetric matrix, smallest first.
    void eigenvalues(double& lo, double& hi) const {
        double tr = a11 + a22;
        double disc = std::sqrt((a11 - a22) * (a11 - a22) + 4.0 * a12 * a12);
        lo = 0.5 * (tr - disc);
        hi = 0.5 * (tr + disc);
    }
};

inline SymMat2 identity_mat() { return {1.0, 0.0, 1.0}; }

} // namespace rdfront

#endif
