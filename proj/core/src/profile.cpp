#include "rdfront/profile.hpp"

#include <algorithm>
#include <cmath>

namespace rdfront {

double ProfileTable::cell_mean(int k) const {
    double s = 0.0;
    for (int c = 0; c < cell_count(); ++c)
        s += U[std::size_t(k) * cell_count() + c];
    return s / cell_count();
}

double ProfileTable::cell_max(int k) const {
    double s = -1e300;
    for (int c = 0; c < cell_count(); ++c)
        s = std::max(s, U[std::size_t(k) * cell_count() + c]);
    return s;
}

double ProfileTable::cell_min(int k) const {
    double s = 1e300;
    for (int c = 0; c < cell_count(); ++c)
        s = std::min(s, U[std::size_t(k) * cell_count() + c]);
    return s;
}

CubicSpline::CubicSpline(double x0, double dx, std::vector<double> y)
    : x0_(x0), dx_(dx), y_(std::move(y)) {
    const int n = int(y_.size());
    ypp_.assign(n, 0.0);
    if (n < 3) return;
    // Natural spline, uniform grid: tridiagonal sweep for second derivatives.
    std::vector<double> u(n, 0.0);
    const double sig = 0.5;
    for (int i = 1; i + 1 < n; ++i) {
        double p = sig * ypp_[i - 1] + 2.0;
        ypp_[i] = (sig - 1.0) / p;
        double rhs = 3.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (dx_ * dx_);
        u[i] = (rhs - sig * u[i - 1]) / p;
    }
    for (int i = n - 2; i >= 1; --i) ypp_[i] = ypp_[i] * ypp_[i + 1] + u[i];
}

void CubicSpline::locate(double x, int& j, double& s) const {
    double r = (x - x0_) / dx_;
    j = int(std::floor(r));
    j = std::clamp(j, 0, int(y_.size()) - 2);
    s = r - j;
}

double CubicSpline::value(double x) const {
    int j; double s;
    locate(x, j, s);
    double a = 1.0 - s, b = s;
    return a * y_[j] + b * y_[j + 1] +
           ((a * a * a - a) * ypp_[j] + (b * b * b - b) * ypp_[j + 1]) *
               (dx_ * dx_) / 6.0;
}

double CubicSpline::d1(double x) const {
    int j; double s;
    locate(x, j, s);
    double a = 1.0 - s, b = s;
    return (y_[j + 1] - y_[j]) / dx_ +
           dx_ / 6.0 *
               ((3.0 * b * b - 1.0) * ypp_[j + 1] - (3.0 * a * a - 1.0) * ypp_[j]);
}

double CubicSpline::d2(double x) const {
    int j; double s;
    locate(x, j, s);
    return (1.0 - s) * ypp_[j] + s * ypp_[j + 1];
}

ProfileFun ProfileFun::from_samples(double xi0, double dxi, std::vector<double> values) {
    ProfileFun f;
    f.splines_.emplace_back(xi0, dxi, std::move(values));
    f.cells_[0] = f.cells_[1] = 1;
    return f;
}

ProfileFun ProfileFun::from_table(const ProfileTable& table) {
    ProfileFun f;
    f.cells_[0] = table.cells[0];
    f.cells_[1] = table.cells[1];
    f.cell_h_ = table.cell_h;
    f.periods_ = table.periods;
    f.splines_.reserve(table.cell_count());
    for (int cj = 0; cj < table.cells[1]; ++cj)
        for (int ci = 0; ci < table.cells[0]; ++ci) {
            std::vector<double> col(table.n_xi);
            for (int k = 0; k < table.n_xi; ++k) col[k] = table.at(k, ci, cj);
            f.splines_.emplace_back(table.xi0, table.dxi, std::move(col));
        }
    return f;
}

double ProfileFun::xi_min() const { return splines_.front().x_min(); }
double ProfileFun::xi_max() const { return splines_.front().x_max(); }

namespace {
// Periodic linear weights for a cell coordinate.
inline void cell_weights(double coord, double period, int count, int& i0, int& i1,
                         double& w1) {
    double r = coord / period;
    r -= std::floor(r);
    double g = r * count;
    i0 = int(std::floor(g)) % count;
    i1 = (i0 + 1) % count;
    w1 = g - std::floor(g);
}
} // namespace

template <class Eval>
static double eval_cellwise(const std::vector<CubicSpline>& splines, const int cells[2],
                            Vec2 cell_h, Vec2 periods, double xi, Vec2 cell, Eval ev) {
    (void)cell_h;
    if (splines.size() == 1) return ev(splines[0], xi);
    int i0, i1, j0, j1;
    double wx, wy;
    cell_weights(cell.x, periods.x, cells[0], i0, i1, wx);
    cell_weights(cell.y, periods.y, cells[1], j0, j1, wy);
    auto at = [&](int ci, int cj) { return ev(splines[std::size_t(cj) * cells[0] + ci], xi); };
    return (1 - wx) * (1 - wy) * at(i0, j0) + wx * (1 - wy) * at(i1, j0) +
           (1 - wx) * wy * at(i0, j1) + wx * wy * at(i1, j1);
}

double ProfileFun::value(double xi, Vec2 cell) const {
    if (xi < xi_min()) { ++tail_hits_; return 1.0; }
    if (xi > xi_max()) { ++tail_hits_; return 0.0; }
    return eval_cellwise(splines_, cells_, cell_h_, periods_, xi, cell,
                         [](const CubicSpline& s, double x) { return s.value(x); });
}

double ProfileFun::d1(double xi, Vec2 cell) const {
    if (xi < xi_min() || xi > xi_max()) { ++tail_hits_; return 0.0; }
    return eval_cellwise(splines_, cells_, cell_h_, periods_, xi, cell,
                         [](const CubicSpline& s, double x) { return s.d1(x); });
}

double ProfileFun::d2(double xi, Vec2 cell) const {
    if (xi < xi_min() || xi > xi_max()) { ++tail_hits_; return 0.0; }
    return eval_cellwise(splines_, cells_, cell_h_, periods_, xi, cell,
                         [](const CubicSpline& s, double x) { return s.d2(x); });
}

namespace {

// Thomas solve of a tridiagonal system; diagonals are overwritten.
void tridiag_solve(std::vector<double>& lower, std::vector<double>& diag,
                   std::vector<double>& upper, std::vector<double>& rhs) {
    const int n = int(diag.size());
    for (int i = 1; i < n; ++i) {
        double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

} // namespace

PlanarWave solve_planar_wave(const std::function<double(double)>& f,
                             const std::function<double(double)>& fu,
                             double a_eff, double speed_guess, double half_width,
                             int nodes) {
    const int m = nodes - 1;           // intervals
    const double L = half_width;
    const double h = 2.0 * L / m;
    const int mid = m / 2;
    std::vector<double> U(nodes);
    double width = std::sqrt(2.0 * std::max(a_eff, 1e-12));
    for (int j = 0; j < nodes; ++j) {
        double xi = -L + j * h;
        U[j] = 1.0 / (1.0 + std::exp(std::clamp(xi / width, -500.0, 500.0)));
    }
    U[0] = 1.0;
    U[nodes - 1] = 0.0;
    double c = speed_guess;

    const int n_int = nodes - 2;
    std::vector<double> lo(n_int), di(n_int), up(n_int), r1(n_int), r2(n_int);
    double fnorm = 0.0;
    for (int iter = 0; iter < 60; ++iter) {
        fnorm = 0.0;
        for (int j = 1; j <= n_int; ++j) {
            double res = a_eff * (U[j + 1] - 2.0 * U[j] + U[j - 1]) / (h * h) +
                         c * (U[j + 1] - U[j - 1]) / (2.0 * h) + f(U[j]);
            fnorm = std::max(fnorm, std::abs(res));
            r1[j - 1] = -res;
            r2[j - 1] = -(U[j + 1] - U[j - 1]) / (2.0 * h); // minus dF/dc
        }
        double phase = U[mid] - 0.5;
        if (fnorm < 1e-12 && std::abs(phase) < 1e-12) break;
        for (int j = 1; j <= n_int; ++j) {
            lo[j - 1] = a_eff / (h * h) - c / (2.0 * h);
            di[j - 1] = -2.0 * a_eff / (h * h) + fu(U[j]);
            up[j - 1] = a_eff / (h * h) + c / (2.0 * h);
        }
        // Bordered tridiagonal: solve for the state update and speed update.
        auto lo2 = lo, di2 = di, up2 = up;
        tridiag_solve(lo, di, up, r1);   // T z1 = -F
        tridiag_solve(lo2, di2, up2, r2); // T z2 = -dF/dc
        double z1m = r1[mid - 1], z2m = r2[mid - 1];
        if (std::abs(z2m) < 1e-300) throw NumericsFault("planar wave: singular bordering");
        double dc = (z1m + phase) / z2m;
        for (int j = 1; j <= n_int; ++j) U[j] += r1[j - 1] - dc * r2[j - 1];
        c -= dc;
        for (int j = 1; j <= n_int; ++j) U[j] = std::clamp(U[j], -0.2, 1.2);
    }
    if (!(fnorm < 1e-9))
        throw NumericsFault("planar wave: Newton collocation did not converge");

    PlanarWave wave;
    wave.speed = c;
    wave.residual = fnorm;
    wave.xi_lo = -L;
    wave.xi_hi = L;
    wave.profile = ProfileFun::from_samples(-L, h, std::move(U));
    return wave;
}

} // namespace rdfront
