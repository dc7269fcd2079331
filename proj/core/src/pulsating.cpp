#include "rdfront/pulsating.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rdfront {

namespace {

struct LevelScan {
    double mean = 0.0;
    int count = 0;
};

// Crossings of u = 1/2 on grid edges, projected onto e. When `central` is
// set only crossings inside the central quarter-radius window count, which
// keeps zero-flux wall layers out of tilted-direction measurements.
LevelScan scan_level(const Field& u, Vec2 e, bool central) {
    const Grid& g = u.grid;
    const int nx = g.nx(), ny = g.ny();
    Vec2 center{0.5 * (g.a[0] + g.b[0]), g.dim == 2 ? 0.5 * (g.a[1] + g.b[1]) : 0.0};
    double radius = 0.25 * (g.b[0] - g.a[0]);
    if (g.dim == 2) radius = 0.25 * std::min(g.b[0] - g.a[0], g.b[1] - g.a[1]);
    LevelScan out;
    double acc = 0.0;
    auto consider = [&](Vec2 p) {
        if (central && (p - center).norm() > radius) return;
        acc += p.dot(e);
        ++out.count;
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            double u0 = u.at(i, j) - 0.5, u1 = u.at(i + 1, j) - 0.5;
            if (u0 == 0.0) consider(g.point(i, j));
            if (u0 * u1 < 0.0) {
                double fr = u0 / (u0 - u1);
                Vec2 p = g.point(i, j);
                consider({p.x + fr * g.h[0], p.y});
            }
        }
    if (g.dim == 2)
        for (int j = 0; j + 1 < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                double u0 = u.at(i, j) - 0.5, u1 = u.at(i, j + 1) - 0.5;
                if (u0 * u1 < 0.0) {
                    double fr = u0 / (u0 - u1);
                    Vec2 p = g.point(i, j);
                    consider({p.x, p.y + fr * g.h[1]});
                }
            }
    if (out.count) out.mean = acc / out.count;
    return out;
}

SpeedFit fit_line(const std::vector<double>& t, const std::vector<double>& p) {
    SpeedFit fit;
    const int n = int(t.size());
    fit.points = n;
    if (n < 2) return fit;
    double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
    double pm = std::accumulate(p.begin(), p.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (t[i] - tm) * (t[i] - tm);
        sxy += (t[i] - tm) * (p[i] - pm);
    }
    fit.c = sxy / sxx;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = p[i] - pm - fit.c * (t[i] - tm);
        ss += r * r;
    }
    if (n > 2) fit.stderr_ = std::sqrt(ss / (n - 2) / sxx);
    return fit;
}

bool is_axis(Vec2 e) {
    return std::abs(e.x) > 1.0 - 1e-12 || std::abs(e.y) > 1.0 - 1e-12;
}

// Accumulates (xi, cell-node) bin sums for profile extraction.
struct ProfileBinner {
    double dxi = 0.0, xi_min = 0.0;
    int n_bins = 0;
    int cells[2] = {1, 1};
    std::vector<double> sum;
    std::vector<long> cnt;

    ProfileBinner(double dxi_, double xi_lo, double xi_hi, int cx, int cy) {
        dxi = dxi_;
        xi_min = xi_lo;
        n_bins = int(std::ceil((xi_hi - xi_lo) / dxi)) + 1;
        cells[0] = cx;
        cells[1] = cy;
        sum.assign(std::size_t(n_bins) * cx * cy, 0.0);
        cnt.assign(sum.size(), 0);
    }

    void add(const Field& u, Vec2 e, double c, const PeriodicMedium& medium) {
        const Grid& g = u.grid;
        const int nx = g.nx(), ny = g.ny();
        int px = int(std::lround(medium.periods.x / g.h[0]));
        int py = g.dim == 2 ? int(std::lround(medium.periods.y / g.h[1])) : 1;
        int ring = 2;
        for (int j = 0; j < ny; ++j) {
            if (g.dim == 2 && (j < ring || j >= ny - ring)) continue;
            for (int i = ring; i < nx - ring; ++i) {
                Vec2 p = g.point(i, j);
                double xi = p.dot(e) - c * u.t;
                int k = int(std::lround((xi - xi_min) / dxi));
                if (k < 0 || k >= n_bins) continue;
                int ci = cells[0] == 1 ? 0 : ((i % px) * cells[0]) / px;
                int cj = cells[1] == 1 ? 0 : ((j % py) * cells[1]) / py;
                std::size_t idx = (std::size_t(k) * cells[1] + cj) * cells[0] + ci;
                sum[idx] += u.at(i, j);
                cnt[idx] += 1;
            }
        }
    }

    // Pool-adjacent-violators projection onto nonincreasing columns.
    static void isotonic_decreasing(std::vector<double>& v, std::vector<double>& w) {
        const int n = int(v.size());
        std::vector<double> val, wt;
        std::vector<int> len;
        for (int i = 0; i < n; ++i) {
            val.push_back(v[i]);
            wt.push_back(w[i]);
            len.push_back(1);
            while (val.size() > 1 && val[val.size() - 2] < val.back()) {
                double W = wt[wt.size() - 2] + wt.back();
                double V = (val[val.size() - 2] * wt[wt.size() - 2] +
                            val.back() * wt.back()) / W;
                int L = len[len.size() - 2] + len.back();
                val.pop_back(); wt.pop_back(); len.pop_back();
                val.back() = V; wt.back() = W; len.back() = L;
            }
        }
        int pos = 0;
        for (std::size_t b = 0; b < val.size(); ++b)
            for (int r = 0; r < len[b]; ++r) v[pos++] = val[b];
    }

    ProfileTable finish(const PeriodicMedium& medium, double h) const {
        // Keep the longest contiguous range where every cell bin is populated;
        // stray bins at the sweep edges are sampled only at extreme times.
        std::vector<char> full(n_bins, 1);
        for (int k = 0; k < n_bins; ++k)
            for (int c = 0; c < cells[0] * cells[1]; ++c)
                if (cnt[std::size_t(k) * cells[0] * cells[1] + c] == 0) full[k] = 0;
        int lo = 0, hi = -1;
        for (int k = 0, run_start = 0; k <= n_bins; ++k) {
            if (k < n_bins && full[k]) continue;
            if (k - run_start > hi - lo + 1) {
                lo = run_start;
                hi = k - 1;
            }
            run_start = k + 1;
        }
        if (hi - lo < 10) throw NumericsFault("profile extraction: bin coverage too thin");
        // The run must reach both resolved tails.
        auto mean_at = [&](int k) {
            double s = 0.0;
            long n = 0;
            for (int c = 0; c < cells[0] * cells[1]; ++c) {
                s += sum[std::size_t(k) * cells[0] * cells[1] + c];
                n += cnt[std::size_t(k) * cells[0] * cells[1] + c];
            }
            return s / double(std::max(n, 1L));
        };
        if (mean_at(lo) < 1.0 - 2e-3 || mean_at(hi) > 2e-3) {
            std::ostringstream gaps;
            gaps << " [" << xi_min << ", " << xi_min + lo * dxi << ") and ("
                 << xi_min + hi * dxi << ", " << xi_min + (n_bins - 1) * dxi << "]";
            throw NumericsFault(
                "profile extraction: empty xi-ranges leave the tails unresolved:" +
                gaps.str());
        }

        ProfileTable tab;
        tab.dxi = dxi;
        tab.xi0 = xi_min + lo * dxi;
        tab.n_xi = hi - lo + 1;
        tab.dim = medium.dim;
        tab.cells[0] = cells[0];
        tab.cells[1] = cells[1];
        tab.periods = medium.periods;
        tab.cell_h = {medium.periods.x / cells[0], medium.periods.y / cells[1]};
        tab.U.assign(std::size_t(tab.n_xi) * cells[0] * cells[1], 0.0);
        const int cc = cells[0] * cells[1];
        for (int k = 0; k < tab.n_xi; ++k)
            for (int c = 0; c < cc; ++c) {
                std::size_t src = (std::size_t(k + lo)) * cc + c;
                tab.U[std::size_t(k) * cc + c] = sum[src] / double(cnt[src]);
            }
        // Monotonize each cell column; large raw violations mean the data
        // was not a traveling profile at all.
        double worst = 0.0;
        for (int c = 0; c < cc; ++c) {
            std::vector<double> col(tab.n_xi), wt(tab.n_xi);
            for (int k = 0; k < tab.n_xi; ++k) {
                col[k] = tab.U[std::size_t(k) * cc + c];
                wt[k] = double(cnt[(std::size_t(k + lo)) * cc + c]);
            }
            for (int k = 0; k + 1 < tab.n_xi; ++k)
                worst = std::max(worst, col[k + 1] - col[k]);
            isotonic_decreasing(col, wt);
            for (int k = 0; k < tab.n_xi; ++k) tab.U[std::size_t(k) * cc + c] = col[k];
        }
        if (worst > 1e-2)
            throw NumericsFault("profile extraction: monotonicity violated by " +
                                std::to_string(worst));
        (void)h;
        return tab;
    }
};

} // namespace

bool lattice_commensurate(const PeriodicMedium& medium, Vec2 e, int max_index) {
    if (medium.dim == 1) return true;
    for (int p = -max_index; p <= max_index; ++p)
        for (int q = -max_index; q <= max_index; ++q) {
            if (p == 0 && q == 0) continue;
            Vec2 v{p * medium.periods.x, q * medium.periods.y};
            if (v.dot(e) <= 0) continue;
            double cross = v.x * e.y - v.y * e.x;
            if (std::abs(cross) < 1e-9 * v.norm()) return true;
        }
    return false;
}

std::vector<double> level_positions(const Trajectory& traj, Vec2 e) {
    std::vector<double> pos;
    for (const Field& u : traj.snapshots) {
        LevelScan s = scan_level(u, e, u.grid.dim == 2 && !is_axis(e));
        if (s.count == 0)
            throw NumericsFault("level set exits the box; enlarge the domain");
        pos.push_back(s.mean);
    }
    return pos;
}

SpeedFit measure_speed(const Trajectory& traj, Vec2 e) {
    if (traj.snapshots.size() < 10)
        throw ValidationFault("measure_speed: need at least 10 snapshots");
    std::vector<double> pos = level_positions(traj, e);
    std::vector<double> t;
    for (const Field& u : traj.snapshots) t.push_back(u.t);
    std::size_t start = std::max<std::size_t>(t.size() / 2, t.size() - 40);
    if (t.size() - start < 10) start = t.size() - 10;
    std::vector<double> tw(t.begin() + start, t.end());
    std::vector<double> pw(pos.begin() + start, pos.end());
    return fit_line(tw, pw);
}

ProfileTable extract_profile(const PeriodicMedium& medium, const Trajectory& traj,
                             Vec2 e, double c, double stderr_) {
    if (traj.snapshots.empty())
        throw ValidationFault("extract_profile: empty trajectory");
    if (stderr_ > 0 && std::abs(c) > 0 && stderr_ >= 0.01 * std::abs(c))
        throw ValidationFault("extract_profile: speed stderr above 1% of |c|");
    const Grid& g = traj.snapshots.front().grid;
    check_lattice_alignment(g, medium);
    ValidationReport vr = validate_medium(medium, 8);
    int cx = vr.homogeneous ? 1 : int(std::lround(medium.periods.x / g.h[0]));
    int cy = (vr.homogeneous || g.dim == 1)
                 ? 1
                 : int(std::lround(medium.periods.y / g.h[1]));
    double xi_lo = 1e300, xi_hi = -1e300;
    for (const Field& u : traj.snapshots) {
        for (Vec2 corner : {Vec2{u.grid.a[0], u.grid.a[1]}, Vec2{u.grid.b[0], u.grid.a[1]},
                            Vec2{u.grid.a[0], u.grid.b[1]}, Vec2{u.grid.b[0], u.grid.b[1]}}) {
            if (g.dim == 1) corner.y = 0.0;
            double xi = corner.dot(e) - c * u.t;
            xi_lo = std::min(xi_lo, xi);
            xi_hi = std::max(xi_hi, xi);
        }
    }
    ProfileBinner binner(0.5 * g.h[0], xi_lo, xi_hi, cx, cy);
    for (const Field& u : traj.snapshots) binner.add(u, e, c, medium);
    return binner.finish(medium, g.h[0]);
}

PulsatingFront normalize_shift(PulsatingFront front) {
    ProfileTable& tab = front.table;
    if (tab.empty()) throw ValidationFault("normalize_shift: no profile table");
    if (tab.cell_mean(0) < 1.0 - 1e-3 || tab.cell_mean(tab.n_xi - 1) > 1e-3)
        throw NumericsFault("normalize_shift: tails unresolved; extend the xi-range");
    double cell_vol = tab.periods.x * (tab.dim == 2 ? tab.periods.y : 1.0);

    // I(s) = integral over {xi > 0} of mean-cell U(xi + s)^2 * cell volume,
    // trapezoid rule on the table with exact-limit extensions.
    auto mass_from = [&](double lower) {
        // integral of cell-mean U^2 over [lower, +inf) against the table
        double xi_end = tab.xi(tab.n_xi - 1);
        if (lower >= xi_end) return 0.0;
        double total = 0.0;
        if (lower < tab.xi0) {
            total += (tab.xi0 - lower) * 1.0;
            lower = tab.xi0;
        }
        int k0 = int(std::ceil((lower - tab.xi0) / tab.dxi - 1e-12));
        double first_xi = tab.xi(k0);
        auto m2 = [&](int k) {
            double s = 0.0;
            for (int c = 0; c < tab.cell_count(); ++c) {
                double v = tab.U[std::size_t(k) * tab.cell_count() + c];
                s += v * v;
            }
            return s / tab.cell_count();
        };
        if (first_xi > lower && k0 > 0) {
            double frac = (first_xi - lower) / tab.dxi; // weight toward node k0-1
            double va = m2(k0 - 1) * frac + m2(k0) * (1.0 - frac);
            total += 0.5 * (va + m2(k0)) * (first_xi - lower);
        }
        for (int k = k0; k + 1 < tab.n_xi; ++k)
            total += 0.5 * (m2(k) + m2(k + 1)) * tab.dxi;
        return total;
    };
    auto I = [&](double s) { return cell_vol * mass_from(s); };

    double lo = tab.xi0 - 1.0 / std::max(cell_vol, 1e-12) - 2.0;
    double hi = tab.xi(tab.n_xi - 1);
    if (I(lo) < 1.0)
        throw NumericsFault("normalize_shift: target mass unreachable; extend the xi-range");
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (I(mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    double s = 0.5 * (lo + hi);
    double Is = I(s);
    if (std::abs(Is - 1.0) > 1e-6)
        throw NumericsFault("normalize_shift: root finding failed to reach 1e-6");
    tab.xi0 -= s;
    front.shift += s;
    front.norm_value = Is;
    return front;
}

void estimate_decay(PulsatingFront& front) {
    const ProfileTable& tab = front.table;
    if (tab.empty()) throw ValidationFault("estimate_decay: no profile table");
    std::vector<double> xi, d;
    for (int k = 1; k + 1 < tab.n_xi; ++k) {
        double slope = 0.0;
        for (int c = 0; c < tab.cell_count(); ++c) {
            double v = (tab.U[std::size_t(k + 1) * tab.cell_count() + c] -
                        tab.U[std::size_t(k - 1) * tab.cell_count() + c]) /
                       (2.0 * tab.dxi);
            slope = std::max(slope, std::abs(v));
        }
        xi.push_back(tab.xi(k));
        d.push_back(slope);
    }
    auto fit_tail = [&](bool right, double& mu, double& C, double& r2, int& npts) {
        std::vector<double> fx, fy;
        for (std::size_t k = 0; k < xi.size(); ++k) {
            double u = tab.cell_mean(int(k) + 1);
            bool in = right ? (u >= 1e-5 && u <= 0.05) : (u >= 0.95 && u <= 1.0 - 1e-5);
            if (in && d[k] > 0.0) {
                fx.push_back(std::abs(xi[k]));
                fy.push_back(std::log(d[k]));
            }
        }
        npts = int(fx.size());
        mu = 0.0; C = 0.0; r2 = 0.0;
        if (npts < 4) return;
        double xm = std::accumulate(fx.begin(), fx.end(), 0.0) / npts;
        double ym = std::accumulate(fy.begin(), fy.end(), 0.0) / npts;
        double sxx = 0, sxy = 0, syy = 0;
        for (int i = 0; i < npts; ++i) {
            sxx += (fx[i] - xm) * (fx[i] - xm);
            sxy += (fx[i] - xm) * (fy[i] - ym);
            syy += (fy[i] - ym) * (fy[i] - ym);
        }
        double slope = sxy / sxx;
        mu = -slope;
        C = std::exp(ym - slope * xm);
        r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 0.0;
    };
    double muR, CR, r2R, muL, CL, r2L;
    int nR, nL;
    fit_tail(true, muR, CR, r2R, nR);
    fit_tail(false, muL, CL, r2L, nL);
    if (nR < 4 || nL < 4 || muR <= 0 || muL <= 0) {
        front.decay_ok = false;
        front.decay_mu = std::max(0.0, std::min(muR, muL));
        front.decay_r2 = 0.0;
        return;
    }
    if (muR <= muL) {
        front.decay_mu = muR;
        front.decay_C = CR;
    } else {
        front.decay_mu = muL;
        front.decay_C = CL;
    }
    front.decay_r2 = std::min(r2R, r2L);
    front.decay_ok = front.decay_r2 >= 0.9;
}

void interior_bounds(PulsatingFront& front, double R) {
    const ProfileTable& tab = front.table;
    if (tab.empty()) throw ValidationFault("interior_bounds: no profile table");
    if (R < 0 || -R < tab.xi0 - 1e-12 || R > tab.xi(tab.n_xi - 1) + 1e-12)
        throw ValidationFault("interior_bounds: R beyond the profile table");
    double delta = 1e300, r = 1e300;
    bool any = false;
    for (int k = 0; k < tab.n_xi; ++k) {
        if (std::abs(tab.xi(k)) > R + 0.5 * tab.dxi) continue;
        any = true;
        delta = std::min({delta, tab.cell_min(k), 1.0 - tab.cell_max(k)});
        int km = std::max(0, k - 1), kp = std::min(tab.n_xi - 1, k + 1);
        for (int c = 0; c < tab.cell_count(); ++c) {
            double slope = (tab.U[std::size_t(kp) * tab.cell_count() + c] -
                            tab.U[std::size_t(km) * tab.cell_count() + c]) /
                           ((kp - km) * tab.dxi);
            r = std::min(r, -slope);
        }
    }
    if (!any) throw ValidationFault("interior_bounds: window contains no table nodes");
    if (r <= 0.0)
        throw NumericsFault("interior_bounds: profile not strictly decreasing on the window");
    front.delta = delta;
    front.interior_r = r;
}

PulsatingFront compute_front(const PeriodicMedium& medium, Vec2 e,
                             const FrontRunConfig& cfg) {
    if (medium.dim == 1) e = {e.x >= 0 ? 1.0 : -1.0, 0.0};
    else e = e.normalized();

    PulsatingFront front;
    front.direction = e;

    ValidationReport vr = validate_medium(medium, 8);
    const bool homogeneous = vr.homogeneous;
    const bool axis = medium.dim == 1 || is_axis(e);

    // Domain and boundary layout. Axis runs clamp the limits behind/ahead;
    // tilted runs use zero-flux walls and a central measurement window.
    Grid grid;
    double Lrun = cfg.strip_length;
    if (medium.dim == 1) {
        grid = Grid::make_1d(0.0, Lrun, cfg.h, BC::clamped, BC::clamped);
    } else if (axis) {
        double w = cfg.width > 0 ? cfg.width : 2.0 * medium.periods.y;
        if (std::abs(e.x) > 0.5)
            grid = Grid::make_2d(0.0, Lrun, cfg.h, 0.0, w, cfg.h, BC::clamped,
                                 BC::clamped, BC::zero_flux, BC::zero_flux);
        else
            grid = Grid::make_2d(0.0, cfg.width > 0 ? cfg.width : 2.0 * medium.periods.x,
                                 cfg.h, 0.0, Lrun, cfg.h, BC::zero_flux, BC::zero_flux,
                                 BC::clamped, BC::clamped);
    } else {
        grid = Grid::make_2d(0.0, Lrun, cfg.h, 0.0, Lrun, cfg.h, BC::zero_flux,
                             BC::zero_flux, BC::zero_flux, BC::zero_flux);
    }
    check_lattice_alignment(grid, medium);

    Vec2 center{0.5 * (grid.a[0] + grid.b[0]),
                medium.dim == 2 ? 0.5 * (grid.a[1] + grid.b[1]) : 0.0};
    double travel_budget = 0.5 * (axis ? Lrun : 0.5 * Lrun);
    double s0 = center.dot(e) - 0.5 * travel_budget;

    SolverConfig scfg;
    scfg.T = cfg.T_max;
    scfg.snapshot_dt = cfg.snapshot_dt;
    scfg.workers = cfg.workers;
    scfg.boundary = [e, s0](double, Vec2 p) {
        return p.dot(e) - s0 < 0 ? 1.0 : 0.0;
    };
    Stepper st(medium, grid, scfg);
    double dt = st.dt();
    long stride = std::max(1L, long(std::lround(cfg.snapshot_dt / dt)));

    Field u = sample_field(grid, [&](Vec2 p) {
        double z = (p.dot(e) - s0) / std::sqrt(2.0);
        return 1.0 / (1.0 + std::exp(std::clamp(z, -500.0, 500.0)));
    });
    st.apply_boundary(u);

    std::vector<double> times, pos;
    const bool central = medium.dim == 2 && !axis;
    auto record = [&]() -> bool {
        LevelScan s = scan_level(u, e, central);
        if (s.count == 0) return false;
        times.push_back(u.t);
        pos.push_back(s.mean);
        return true;
    };
    record();

    // Spatial repeat length along e: the front's instantaneous level speed
    // wobbles with the cell phase, so slope windows must span whole periods.
    double lambda_e = medium.periods.x;
    if (medium.dim == 2) {
        double best = 1e300;
        for (int p = -6; p <= 6; ++p)
            for (int q = -6; q <= 6; ++q) {
                if (p == 0 && q == 0) continue;
                Vec2 v{p * medium.periods.x, q * medium.periods.y};
                if (v.dot(e) <= 0) continue;
                if (std::abs(v.x * e.y - v.y * e.x) < 1e-9 * v.norm())
                    best = std::min(best, v.norm());
            }
        if (best < 1e300) lambda_e = best;
    }

    auto window_slope = [&](int end, int W) {
        std::vector<double> tw(times.begin() + end - W, times.begin() + end);
        std::vector<double> pw(pos.begin() + end - W, pos.begin() + end);
        return fit_line(tw, pw).c;
    };
    bool stationary = false;
    double c_est = 0.0;
    long max_steps = long(std::ceil(cfg.T_max / dt));
    long s_count = 0;
    while (s_count < max_steps) {
        for (long k = 0; k < stride && s_count < max_steps; ++k, ++s_count) st.advance(u);
        if (!record()) { stationary = false; break; }
        double travelled = std::abs(pos.back() - pos.front());
        if (travelled > travel_budget) break;
        int n = int(times.size());
        if (n < 12) continue;
        int W = 10;
        double rough = window_slope(n, W);
        if (std::abs(rough) > 1e-6) {
            double period_snaps = lambda_e / (std::abs(rough) * cfg.snapshot_dt);
            W = std::max(10, int(std::ceil(period_snaps)) + 1);
        }
        if (n < W + 2) continue;
        double s1 = window_slope(n, W), s2 = window_slope(n - 1, W),
               s3 = window_slope(n - 2, W);
        c_est = s1;
        double spread = std::max({s1, s2, s3}) - std::min({s1, s2, s3});
        if (spread <= std::max(cfg.stationary_rel_tol * std::abs(s1), 1e-5)) {
            stationary = true;
            break;
        }
    }

    if (!stationary) {
        front.outcome = FrontOutcome::no_front;
        if (times.size() >= 12)
            front.speed = window_slope(int(times.size()), 10);
        return front;
    }
    if (std::abs(c_est) < 1e-3) {
        front.outcome = FrontOutcome::near_stationary;
        front.speed = c_est;
        std::vector<double> tw(times.end() - 10, times.end());
        std::vector<double> pw(pos.end() - 10, pos.end());
        front.speed_stderr = fit_line(tw, pw).stderr_;
        return front;
    }

    // Phase B: keep evolving while binning the profile against the settled
    // speed; the final speed is refit over this window.
    bool extract = cfg.want_profile && (homogeneous || lattice_commensurate(medium, e));
    double span = std::max(grid.b[0] - grid.a[0],
                           medium.dim == 2 ? grid.b[1] - grid.a[1] : 0.0);
    double budget_left = travel_budget - std::abs(pos.back() - pos.front());
    double T_bin = std::min(budget_left / std::max(std::abs(c_est), 1e-9),
                            std::max(10.0, 10.0 * lambda_e / std::abs(c_est)));
    T_bin = std::max(T_bin, 5.0);

    int cx = 1, cy = 1;
    if (!homogeneous) {
        cx = int(std::lround(medium.periods.x / grid.h[0]));
        cy = medium.dim == 2 ? int(std::lround(medium.periods.y / grid.h[1])) : 1;
    }
    double xi_center = pos.back() - c_est * u.t;
    ProfileBinner binner(0.5 * cfg.h, xi_center - span, xi_center + span, cx, cy);

    std::vector<double> tb, pb;
    long bin_steps = long(std::ceil(T_bin / dt));
    for (long s = 0; s < bin_steps;) {
        for (long k = 0; k < stride && s < bin_steps; ++k, ++s) st.advance(u);
        if (!record()) break;
        tb.push_back(u.t);
        pb.push_back(pos.back());
        if (extract) binner.add(u, e, c_est, medium);
    }
    SpeedFit fit = fit_line(tb, pb);
    front.speed = fit.c;
    front.speed_stderr = fit.stderr_;
    front.outcome = FrontOutcome::converged;

    if (extract && tb.size() >= 5) {
        front.table = binner.finish(medium, cfg.h);
        front = normalize_shift(std::move(front));
        estimate_decay(front);
        double R = std::min(cfg.interior_R,
                            std::min(-front.table.xi0, front.table.xi(front.table.n_xi - 1)));
        interior_bounds(front, R);
    }
    return front;
}

} // namespace rdfront
