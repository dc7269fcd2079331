#include "rdfront/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace rdfront {

namespace {

double harmonic(double x, double y) {
    if (x * y > 0.0) {
        double s = (x < 0 ? -1.0 : 1.0);
        return s * 2.0 * std::abs(x) * std::abs(y) / (std::abs(x) + std::abs(y));
    }
    return 0.5 * (x + y); // arithmetic fallback for signed entries
}

std::string node_str(const Grid& g, int i, int j, double t) {
    std::ostringstream os;
    Vec2 p = g.point(i, j);
    os << "node (" << i << "," << j << ") = (" << p.x << "," << p.y << ") at t=" << t;
    return os.str();
}

} // namespace

double stable_dt(const Grid& grid, const PeriodicMedium& medium, Scheme scheme) {
    if (scheme == Scheme::imex)
        return 0.9 / (2.0 * std::max(medium.max_reaction_slope, 1e-12));
    double diff = 1.0 / (grid.h[0] * grid.h[0]);
    if (grid.dim == 2) diff += 1.0 / (grid.h[1] * grid.h[1]);
    return 0.9 / (2.0 * medium.lambda2 * diff + medium.max_reaction_slope);
}

void check_lattice_alignment(const Grid& grid, const PeriodicMedium& medium) {
    for (int k = 0; k < grid.dim; ++k) {
        double L = k == 0 ? medium.periods.x : medium.periods.y;
        double ratio = L / grid.h[k];
        if (std::abs(ratio - std::lround(ratio)) > 1e-9)
            throw ConfigFault("grid spacing does not divide the medium period on axis " +
                              std::to_string(k));
    }
}

struct Stepper::Impl {
    PeriodicMedium medium;
    Grid grid;
    SolverConfig cfg;
    double dt = 0.0;

    std::vector<double> cE; // x-face coefficients / hx^2, index of left node
    std::vector<double> cN; // y-face coefficients / hy^2, index of lower node
    std::vector<double> a12x, a12y; // off-diagonal entries at x-/y-faces
    bool offdiag = false;

    bool cubic = false;
    std::vector<double> theta;   // cubic fast path, per node
    std::vector<Vec2> wrapped;   // generic path, per node (cell coordinates)

    mutable std::vector<double> rhs, scratch, cg_r, cg_p, cg_q;

    Impl(const PeriodicMedium& med, const Grid& g, const SolverConfig& c)
        : medium(med), grid(g), cfg(c) {
        double bound = stable_dt(g, med, c.scheme);
        dt = c.dt > 0.0 ? c.dt : bound;
        if (c.enforce_bounds && dt > bound * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "dt=" << dt << " above the monotone bound " << bound;
            throw ConfigFault(os.str());
        }
        bool any_clamped = false;
        for (int f = 0; f < 4; ++f)
            if (g.bc[f] == BC::clamped) any_clamped = true;
        if (any_clamped && !c.boundary)
            throw ConfigFault("clamped faces configured without a boundary function");

        const int nx = g.nx(), ny = g.ny();
        cE.assign(g.size(), 0.0);
        cN.assign(g.size(), 0.0);
        std::vector<SymMat2> A(g.size());
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                A[g.index(i, j)] = medium.diffusion(medium.wrap(g.point(i, j)));
        double hx2 = g.h[0] * g.h[0];
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i + 1 < nx; ++i)
                cE[g.index(i, j)] =
                    harmonic(A[g.index(i, j)].a11, A[g.index(i + 1, j)].a11) / hx2;
        if (g.dim == 2) {
            double hy2 = g.h[1] * g.h[1];
            for (int j = 0; j + 1 < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    cN[g.index(i, j)] =
                        harmonic(A[g.index(i, j)].a22, A[g.index(i, j + 1)].a22) / hy2;
        }
        for (const auto& m : A)
            if (std::abs(m.a12) > 1e-15) offdiag = true;
        if (offdiag) {
            a12x.assign(g.size(), 0.0);
            a12y.assign(g.size(), 0.0);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i + 1 < nx; ++i)
                    a12x[g.index(i, j)] =
                        harmonic(A[g.index(i, j)].a12, A[g.index(i + 1, j)].a12);
            for (int j = 0; j + 1 < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    a12y[g.index(i, j)] =
                        harmonic(A[g.index(i, j)].a12, A[g.index(i, j + 1)].a12);
        }

        cubic = medium.cubic_theta.has_value();
        if (cubic) {
            theta.resize(g.size());
            const auto& th = *medium.cubic_theta;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    theta[g.index(i, j)] = th(medium.wrap(g.point(i, j)));
        } else {
            wrapped.resize(g.size());
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    wrapped[g.index(i, j)] = medium.wrap(g.point(i, j));
        }
        rhs.assign(g.size(), 0.0);
        scratch.assign(g.size(), 0.0);
    }

    inline double reaction_at(std::size_t idx, double u) const {
        if (cubic) {
            double th = theta[idx];
            if (u < 0.0) return -th * u;
            if (u > 1.0) return -(1.0 - th) * (u - 1.0);
            return u * (1.0 - u) * (u - th);
        }
        return medium.reaction(wrapped[idx], u);
    }

    // out = div(A grad u); every node, zero-coefficient closure at the box
    // boundary (zero-flux), clamped faces handled by the caller.
    void diffusion(const std::vector<double>& u, std::vector<double>& out) const {
        const int nx = grid.nx(), ny = grid.ny();
        auto run_rows = [&](int j0, int j1) {
            for (int j = j0; j < j1; ++j) {
                const std::size_t r = grid.index(0, j);
                for (int i = 0; i < nx; ++i) {
                    std::size_t k = r + i;
                    double acc = 0.0;
                    if (i + 1 < nx) acc += cE[k] * (u[k + 1] - u[k]);
                    if (i > 0) acc -= cE[k - 1] * (u[k] - u[k - 1]);
                    if (j + 1 < ny) acc += cN[k] * (u[k + nx] - u[k]);
                    if (j > 0) acc -= cN[k - nx] * (u[k] - u[k - nx]);
                    out[k] = acc;
                }
            }
        };
        if (cfg.workers > 1 && ny >= 64) {
            int w = std::min(cfg.workers, ny);
            std::vector<std::thread> pool;
            for (int b = 0; b < w; ++b)
                pool.emplace_back(run_rows, ny * b / w, ny * (b + 1) / w);
            for (auto& th : pool) th.join();
        } else {
            run_rows(0, ny);
        }
        if (offdiag && grid.dim == 2) {
            // Mixed derivative terms, strict interior only.
            double hx = grid.h[0], hy = grid.h[1];
            for (int j = 1; j + 1 < ny; ++j) {
                for (int i = 1; i + 1 < nx; ++i) {
                    std::size_t k = grid.index(i, j);
                    double uyE = (u[k + 1 + nx] + u[k + nx] - u[k + 1 - nx] - u[k - nx]) / (4.0 * hy);
                    double uyW = (u[k + nx] + u[k - 1 + nx] - u[k - nx] - u[k - 1 - nx]) / (4.0 * hy);
                    double uxN = (u[k + nx + 1] + u[k + 1] - u[k + nx - 1] - u[k - 1]) / (4.0 * hx);
                    double uxS = (u[k + 1] + u[k - nx + 1] - u[k - 1] - u[k - nx - 1]) / (4.0 * hx);
                    out[k] += (a12x[k] * uyE - a12x[k - 1] * uyW) / hx +
                              (a12y[k] * uxN - a12y[k - nx] * uxS) / hy;
                }
            }
        }
    }

    void clamp_faces(Field& u, double t) const {
        const int nx = grid.nx(), ny = grid.ny();
        if (grid.bc[face_x_lo] == BC::clamped)
            for (int j = 0; j < ny; ++j) u.at(0, j) = cfg.boundary(t, grid.point(0, j));
        if (grid.bc[face_x_hi] == BC::clamped)
            for (int j = 0; j < ny; ++j)
                u.at(nx - 1, j) = cfg.boundary(t, grid.point(nx - 1, j));
        if (grid.dim == 2 && grid.bc[face_y_lo] == BC::clamped)
            for (int i = 0; i < nx; ++i) u.at(i, 0) = cfg.boundary(t, grid.point(i, 0));
        if (grid.dim == 2 && grid.bc[face_y_hi] == BC::clamped)
            for (int i = 0; i < nx; ++i)
                u.at(i, ny - 1) = cfg.boundary(t, grid.point(i, ny - 1));
    }

    void check_divergence(const Field& u) const {
        for (std::size_t k = 0; k < u.v.size(); ++k) {
            double x = u.v[k];
            if (!std::isfinite(x) || x < -cfg.divergence_guard ||
                x > cfg.divergence_guard) {
                int i = int(k % grid.nx()), j = int(k / grid.nx());
                throw NumericsFault("divergence: u=" + std::to_string(x) + " at " +
                                    node_str(grid, i, j, u.t));
            }
        }
    }

    void advance_explicit(Field& u) const {
        diffusion(u.v, rhs);
        double* uv = u.v.data();
        const double* rv = rhs.data();
        const std::size_t n = u.v.size();
        for (std::size_t k = 0; k < n; ++k)
            uv[k] += dt * (rv[k] + reaction_at(k, uv[k]));
        u.t += dt;
        clamp_faces(u, u.t);
        check_divergence(u);
    }

    bool pinned(std::size_t k) const {
        const int nx = grid.nx(), ny = grid.ny();
        int i = int(k % nx), j = int(k / nx);
        if (i == 0 && grid.bc[face_x_lo] == BC::clamped) return true;
        if (i == nx - 1 && grid.bc[face_x_hi] == BC::clamped) return true;
        if (grid.dim == 2 && j == 0 && grid.bc[face_y_lo] == BC::clamped) return true;
        if (grid.dim == 2 && j == ny - 1 && grid.bc[face_y_hi] == BC::clamped) return true;
        return false;
    }

    // (I - dt D) x = b via conjugate gradients, clamped nodes eliminated.
    void advance_imex(Field& u) const {
        const std::size_t n = u.v.size();
        double tnew = u.t + dt;
        std::vector<double>& b = scratch;
        for (std::size_t k = 0; k < n; ++k)
            b[k] = u.v[k] + dt * reaction_at(k, u.v[k]);

        // Dirichlet elimination: known clamped values contribute to the rhs.
        std::vector<double> z(n, 0.0);
        bool any_pin = false;
        for (std::size_t k = 0; k < n; ++k)
            if (pinned(k)) {
                int i = int(k % grid.nx()), j = int(k / grid.nx());
                z[k] = cfg.boundary(tnew, grid.point(i, j));
                any_pin = true;
            }
        if (any_pin) {
            cg_q.assign(n, 0.0);
            diffusion(z, cg_q);
            for (std::size_t k = 0; k < n; ++k)
                if (!pinned(k)) b[k] += dt * cg_q[k];
        }

        auto matvec = [&](const std::vector<double>& x, std::vector<double>& y) {
            diffusion(x, y);
            for (std::size_t k = 0; k < n; ++k)
                y[k] = pinned(k) ? 0.0 : x[k] - dt * y[k];
        };

        std::vector<double>& x = u.v;
        for (std::size_t k = 0; k < n; ++k)
            if (pinned(k)) x[k] = 0.0;
        cg_r.assign(n, 0.0);
        cg_p.assign(n, 0.0);
        cg_q.assign(n, 0.0);
        matvec(x, cg_q);
        double bn = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (pinned(k)) continue;
            cg_r[k] = b[k] - cg_q[k];
            bn += b[k] * b[k];
        }
        cg_p = cg_r;
        double rr = 0.0;
        for (double v : cg_r) rr += v * v;
        double tol2 = cfg.inner_tol * cfg.inner_tol * std::max(bn, 1e-30);
        int max_iter = int(10 * std::sqrt(double(n))) + 200;
        for (int it = 0; it < max_iter && rr > tol2; ++it) {
            matvec(cg_p, cg_q);
            double pq = 0.0;
            for (std::size_t k = 0; k < n; ++k) pq += cg_p[k] * cg_q[k];
            double alpha = rr / pq;
            for (std::size_t k = 0; k < n; ++k) {
                x[k] += alpha * cg_p[k];
                cg_r[k] -= alpha * cg_q[k];
            }
            double rr_new = 0.0;
            for (double v : cg_r) rr_new += v * v;
            double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t k = 0; k < n; ++k) cg_p[k] = cg_r[k] + beta * cg_p[k];
        }
        if (rr > tol2)
            throw NumericsFault("imex diffusion solve did not reach tolerance");
        for (std::size_t k = 0; k < n; ++k)
            if (pinned(k)) x[k] = z[k];
        u.t = tnew;
        check_divergence(u);
    }
};

Stepper::Stepper(const PeriodicMedium& medium, const Grid& grid, const SolverConfig& cfg)
    : impl_(std::make_unique<Impl>(medium, grid, cfg)) {}
Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

void Stepper::advance(Field& u) const {
    if (!u.grid.same_layout(impl_->grid))
        throw ConfigFault("stepper: field grid does not match");
    if (impl_->cfg.scheme == Scheme::imex)
        impl_->advance_imex(u);
    else
        impl_->advance_explicit(u);
}

double Stepper::dt() const { return impl_->dt; }

void Stepper::apply_boundary(Field& u) const { impl_->clamp_faces(u, u.t); }

void Stepper::check_state(const Field& u) const { impl_->check_divergence(u); }

void Stepper::apply_operator(const Field& u, Field& out) const {
    out.grid = u.grid;
    out.t = u.t;
    out.v.assign(u.v.size(), 0.0);
    impl_->diffusion(u.v, out.v);
    const int nx = u.grid.nx(), ny = u.grid.ny();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            std::size_t k = u.grid.index(i, j);
            bool ring = i == 0 || i == nx - 1 || (u.grid.dim == 2 && (j == 0 || j == ny - 1));
            if (ring)
                out.v[k] = 0.0;
            else
                out.v[k] += impl_->reaction_at(k, u.v[k]);
        }
}

Field step(const PeriodicMedium& medium, const Field& state, const SolverConfig& cfg) {
    Stepper st(medium, state.grid, cfg);
    st.check_state(state);
    Field u = state;
    st.advance(u);
    return u;
}

Trajectory solve_cauchy(const PeriodicMedium& medium, const Field& u0,
                        const SolverConfig& cfg) {
    if (!cfg.allow_range_override) {
        if (u0.min() < -1e-12 || u0.max() > 1.0 + 1e-12)
            throw ValidationFault("solve_cauchy: initial data outside [0,1]");
    }
    Stepper st(medium, u0.grid, cfg);
    double dt = st.dt();
    long n_steps = long(std::ceil(cfg.T / dt - 1e-9));
    long stride = cfg.snapshot_dt > 0 ? std::max(1L, long(std::lround(cfg.snapshot_dt / dt)))
                                      : n_steps;
    Trajectory traj;
    traj.dt = dt;
    Field u = u0;
    st.apply_boundary(u); // clamped faces start consistent with the boundary data
    traj.snapshots.push_back(u);
    for (long s = 1; s <= n_steps; ++s) {
        st.advance(u);
        if (s % stride == 0 || s == n_steps) traj.snapshots.push_back(u);
    }
    return traj;
}

Field residual(const PeriodicMedium& medium, const Field& before,
               const Field& middle, const Field& after) {
    if (!before.grid.same_layout(middle.grid) || !middle.grid.same_layout(after.grid))
        throw ConfigFault("residual: snapshots on mismatched grids");
    double d1 = middle.t - before.t, d2 = after.t - middle.t;
    if (std::abs(d1 - d2) > 1e-9 * std::max(d1, d2))
        throw ConfigFault("residual: snapshots not equally spaced in time");
    SolverConfig cfg;
    cfg.dt = 1e-3; // placeholder; only the operator tables are used
    cfg.enforce_bounds = false;
    Stepper st(medium, middle.grid, cfg);
    Field op(middle.grid);
    st.apply_operator(middle, op);
    Field res(middle.grid, 0.0, middle.t);
    const int nx = middle.grid.nx(), ny = middle.grid.ny();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            bool ring = i == 0 || i == nx - 1 ||
                        (middle.grid.dim == 2 && (j == 0 || j == ny - 1));
            if (ring) continue;
            std::size_t k = middle.grid.index(i, j);
            res.v[k] = (after.v[k] - before.v[k]) / (d1 + d2) - op.v[k];
        }
    return res;
}

ComparisonReport check_comparison(const PeriodicMedium& medium, const Field& u0_low,
                                  const Field& u0_high, const SolverConfig& cfg) {
    if (!u0_low.grid.same_layout(u0_high.grid))
        throw ConfigFault("check_comparison: grids differ");
    for (std::size_t k = 0; k < u0_low.v.size(); ++k)
        if (u0_low.v[k] > u0_high.v[k] + 1e-12)
            throw ValidationFault("check_comparison: initial data not ordered");
    Stepper st(medium, u0_low.grid, cfg);
    Field lo = u0_low, hi = u0_high;
    ComparisonReport rep;
    rep.min_gap = 1e300;
    long n_steps = long(std::ceil(cfg.T / st.dt() - 1e-9));
    auto scan = [&](double t) {
        for (std::size_t k = 0; k < lo.v.size(); ++k) {
            double gap = hi.v[k] - lo.v[k];
            if (gap < rep.min_gap) {
                rep.min_gap = gap;
                rep.t_worst = t;
                rep.where = lo.grid.point(int(k % lo.grid.nx()), int(k / lo.grid.nx()));
            }
        }
    };
    scan(lo.t);
    for (long s = 0; s < n_steps; ++s) {
        try {
            st.advance(lo);
            st.advance(hi);
        } catch (const NumericsFault&) {
            rep.min_gap = std::min(rep.min_gap, -1.0);
            break;
        }
        scan(lo.t);
    }
    rep.pass = rep.min_gap >= -1e-10;
    return rep;
}

} // namespace rdfront
