#ifndef RDFRONT_PROFILE_HPP
#define RDFRONT_PROFILE_HPP

#include <functional>
#include <memory>
#include <vector>

#include "rdfront/errors.hpp"
#include "rdfront/vec.hpp"

namespace rdfront {

/**
 * Front profile sampled on a uniform xi-grid times a periodic cell lattice.
 * Values are stored xi-major; cell index runs fastest. cells = {1,1} means
 * a cell-independent profile.
 */
struct ProfileTable {
    double xi0 = 0.0;
    double dxi = 0.0;
    int n_xi = 0;
    int dim = 1;         // medium dimension; fixes the cell measure
    int cells[2] = {1, 1};
    Vec2 cell_h{0.0, 0.0};
    Vec2 periods{1.0, 1.0};
    std::vector<double> U;

    int cell_count() const { return cells[0] * cells[1]; }
    double xi(int k) const { return xi0 + k * dxi; }
    double& at(int k, int ci, int cj) {
        return U[(std::size_t(k) * cells[1] + cj) * cells[0] + ci];
    }
    double at(int k, int ci, int cj) const {
        return U[(std::size_t(k) * cells[1] + cj) * cells[0] + ci];
    }
    double cell_mean(int k) const;
    double cell_max(int k) const;
    double cell_min(int k) const;
    bool empty() const { return n_xi == 0; }
};

/** Natural cubic spline on a uniform grid; C2 evaluation with derivatives. */
class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(double x0, double dx, std::vector<double> y);
    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;
    double x_min() const { return x0_; }
    double x_max() const { return x0_ + dx_ * (double(y_.size()) - 1.0); }

  private:
    void locate(double x, int& j, double& s) const;
    double x0_ = 0.0, dx_ = 1.0;
    std::vector<double> y_, ypp_;
};

/**
 * Smooth evaluator of a monotone front profile with limits 1 and 0.
 * Inside the resolved range it is a cubic spline (cell-resolved profiles
 * interpolate linearly across the cell lattice); beyond it the exact limits
 * extend the table, and extension hits are counted.
 */
class ProfileFun {
  public:
    ProfileFun() = default;

    // Cell-independent profile from spline data.
    static ProfileFun from_samples(double xi0, double dxi, std::vector<double> values);
    // Cell-resolved profile: one spline per cell node, linear across the cell.
    static ProfileFun from_table(const ProfileTable& table);

    double value(double xi, Vec2 cell = {}) const;
    double d1(double xi, Vec2 cell = {}) const;
    double d2(double xi, Vec2 cell = {}) const;

    double xi_min() const;
    double xi_max() const;
    long tail_hits() const { return tail_hits_; }
    bool valid() const { return !splines_.empty(); }

  private:
    std::vector<CubicSpline> splines_; // one per cell node, cell index fastest
    int cells_[2] = {1, 1};
    Vec2 cell_h_{0, 0};
    Vec2 periods_{1, 1};
    mutable long tail_hits_ = 0;
};

/** Result of the planar traveling-wave boundary-value solve. */
struct PlanarWave {
    double speed = 0.0;
    ProfileFun profile;  // decreasing, limits 1 and 0, residual <= tol
    double residual = 0.0;
    double xi_lo = 0.0, xi_hi = 0.0;
};

/**
 * Solves a U'' * a + c U' + f(U) = 0 with U(-inf)=1, U(+inf)=0 by Newton
 * collocation on [-half_width, half_width], pinning U = 1/2 at the origin.
 * This refines a measured (speed, profile) pair for effectively
 * one-dimensional media to solver-grade accuracy.
 */
PlanarWave solve_planar_wave(const std::function<double(double)>& f,
                             const std::function<double(double)>& fu,
                             double a_eff, double speed_guess,
                             double half_width = 45.0, int nodes = 9001);

} // namespace rdfront

#endif
