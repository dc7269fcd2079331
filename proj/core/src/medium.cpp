#include "rdfront/medium.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rdfront {

namespace {

double wrap1(double v, double L) {
    double w = std::fmod(v, L);
    if (w < 0) w += L;
    return w;
}

std::vector<Vec2> cell_lattice(const PeriodicMedium& m, int density) {
    std::vector<Vec2> pts;
    int nx = density;
    int ny = m.dim == 2 ? density : 1;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            pts.push_back({m.periods.x * i / nx,
                           m.dim == 2 ? m.periods.y * j / ny : 0.0});
    return pts;
}

std::string point_str(Vec2 p) {
    std::ostringstream os;
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

} // namespace

Vec2 PeriodicMedium::wrap(Vec2 p) const {
    Vec2 w{wrap1(p.x, periods.x), 0.0};
    if (dim == 2) w.y = wrap1(p.y, periods.y);
    return w;
}

PeriodicMedium make_cubic_medium(const ScalarField& theta_field,
                                 const MatrixField& diffusion_field,
                                 Vec2 periods, int dim, int sampling_density) {
    if (dim != 1 && dim != 2) throw ValidationFault("medium: dim must be 1 or 2");
    if (periods.x <= 0 || (dim == 2 && periods.y <= 0))
        throw ValidationFault("medium: periods must be positive");

    PeriodicMedium m;
    m.dim = dim;
    m.periods = periods;

    double theta_min = 1.0, theta_max = 0.0;
    double eig_min = 1e300, eig_max = -1e300;
    for (const Vec2& p : cell_lattice(m, sampling_density)) {
        double th = theta_field(p);
        if (!(th > 0.0 && th < 1.0))
            throw ValidationFault("medium: theta outside (0,1) at " + point_str(p));
        theta_min = std::min(theta_min, th);
        theta_max = std::max(theta_max, th);

        SymMat2 A = diffusion_field(p);
        double lo, hi;
        A.eigenvalues(lo, hi);
        if (dim == 1) { lo = A.a11; hi = A.a11; }
        if (lo <= 0.0)
            throw ValidationFault("medium: diffusion not positive definite at " +
                                  point_str(p));
        eig_min = std::min(eig_min, lo);
        eig_max = std::max(eig_max, hi);
    }

    m.kappa = 0.5 * std::min(theta_min, 1.0 - theta_max);

    // Fringe half-width: largest sigma with f_u <= -kappa on [0,sigma] and
    // [1-sigma,1]. The cubic's f_u = -3u^2 + 2(1+theta)u - theta crosses
    // -kappa at the roots of 3u^2 - 2(1+theta)u + theta - kappa.
    double sigma = 0.49;
    for (double th : {theta_min, theta_max}) {
        double b = 1.0 + th;
        double disc = b * b - 3.0 * (th - m.kappa);
        double root = std::sqrt(disc);
        double r_lo = (b - root) / 3.0;
        double r_hi = (b + root) / 3.0;
        sigma = std::min({sigma, r_lo, 1.0 - r_hi});
    }
    m.sigma = sigma;

    ScalarField theta = theta_field;
    m.cubic_theta = theta;
    m.reaction = [theta](Vec2 p, double u) {
        double th = theta(p);
        if (u < 0.0) return -th * u;
        if (u > 1.0) return -(1.0 - th) * (u - 1.0);
        return u * (1.0 - u) * (u - th);
    };
    m.reaction_du = [theta](Vec2 p, double u) {
        double th = theta(p);
        if (u < 0.0) return -th;
        if (u > 1.0) return -(1.0 - th);
        return -3.0 * u * u + 2.0 * (1.0 + th) * u - th;
    };
    m.diffusion = diffusion_field;
    m.lambda1 = eig_min * (1.0 - 1e-12);
    m.lambda2 = eig_max * (1.0 + 1e-12);

    double slope = 0.0, fmax = 0.0;
    for (const Vec2& p : cell_lattice(m, sampling_density)) {
        for (int k = 0; k <= 200; ++k) {
            double u = -0.5 + 2.0 * k / 200.0;
            slope = std::max(slope, std::abs(m.reaction_du(p, u)));
            if (u >= 0.0 && u <= 1.0)
                fmax = std::max(fmax, std::abs(m.reaction(p, u)));
        }
    }
    m.max_reaction_slope = slope;
    m.max_reaction = fmax;
    return m;
}

namespace {

// Bisection for the bistable zero of f(x,.) in (0,1), to 1e-12.
double locate_theta(const PeriodicMedium& m, Vec2 p) {
    double lo = 1e-9, hi = 1.0 - 1e-9;
    if (m.reaction(p, lo) >= 0 || m.reaction(p, hi) <= 0) return -1.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (m.reaction(p, mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

ValidationReport validate_medium(const PeriodicMedium& medium, int sampling_density) {
    if (sampling_density < 8)
        throw ValidationFault("validate_medium: sampling_density must be >= 8");
    ValidationReport rep;
    auto lattice = cell_lattice(medium, sampling_density);

    // A2: periodicity of f and A under integer period shifts.
    {
        std::mt19937_64 rng(0x5eedULL);
        std::uniform_real_distribution<double> ux(-3.0 * medium.periods.x,
                                                  3.0 * medium.periods.x);
        std::uniform_real_distribution<double> uy(-3.0 * medium.periods.y,
                                                  3.0 * medium.periods.y);
        std::uniform_int_distribution<int> ki(-3, 3);
        std::uniform_real_distribution<double> uu(0.0, 1.0);
        double worst = 0.0;
        Vec2 witness{};
        for (int s = 0; s < 500; ++s) {
            Vec2 p{ux(rng), medium.dim == 2 ? uy(rng) : 0.0};
            Vec2 q{p.x + ki(rng) * medium.periods.x,
                   medium.dim == 2 ? p.y + ki(rng) * medium.periods.y : 0.0};
            double u = uu(rng);
            double df = std::abs(medium.reaction(p, u) - medium.reaction(q, u));
            SymMat2 Ap = medium.diffusion(p), Aq = medium.diffusion(q);
            double dA = std::max({std::abs(Ap.a11 - Aq.a11),
                                  std::abs(Ap.a12 - Aq.a12),
                                  std::abs(Ap.a22 - Aq.a22)});
            double d = std::max(df, dA);
            if (d > worst) { worst = d; witness = p; }
        }
        rep.checks.push_back({"A2 periodicity", worst <= 1e-12, 1e-12 - worst,
                              witness, ""});
    }

    // A3: exact zeros at 0 and 1, single sign change at theta_x in (0,1).
    {
        bool pass = true;
        double worst = 0.0;
        Vec2 witness{};
        std::string note;
        for (const Vec2& p : lattice) {
            if (medium.reaction(p, 0.0) != 0.0 || medium.reaction(p, 1.0) != 0.0) {
                pass = false;
                witness = p;
                note = "f(x,0) or f(x,1) nonzero";
                break;
            }
            double th = locate_theta(medium, p);
            if (th <= 0.0 || th >= 1.0) {
                pass = false;
                witness = p;
                note = "no bistable zero located";
                break;
            }
            rep.theta_samples.push_back(th);
            int sign_changes = 0;
            double prev = medium.reaction(p, 0.002);
            for (int k = 2; k <= 499; ++k) {
                double u = k / 500.0;
                double v = medium.reaction(p, u);
                if (prev < 0 && v > 0) ++sign_changes;
                if (prev > 0 && v < 0) ++sign_changes;
                if (v != 0.0) prev = v;
            }
            if (sign_changes != 1) {
                pass = false;
                witness = p;
                note = "sign pattern not bistable";
                break;
            }
            worst = std::max(worst, std::abs(medium.reaction(p, th)));
        }
        rep.checks.push_back({"A3 bistable sign pattern", pass && worst <= 1e-10,
                              1e-10 - worst, witness, note});
    }

    // A3 fringe: f_u <= -kappa on [-0.5,sigma] and [1-sigma,1.5].
    {
        double worst = -1e300;
        Vec2 witness{};
        for (const Vec2& p : lattice) {
            for (int k = 0; k <= 100; ++k) {
                double u1 = -0.5 + (medium.sigma + 0.5) * k / 100.0;
                double u2 = 1.0 - medium.sigma + (medium.sigma + 0.5) * k / 100.0;
                for (double u : {u1, u2}) {
                    double fu = medium.reaction_du(p, u);
                    if (fu + medium.kappa > worst) {
                        worst = fu + medium.kappa;
                        witness = p;
                    }
                }
            }
        }
        rep.checks.push_back({"A3 fringe slope", worst <= 1e-12, -worst, witness, ""});
    }

    // A4: eigenvalues of A within [lambda1, lambda2], lambda1 > 0.
    {
        double worst = 1e300;
        Vec2 witness{};
        bool bounds_ok = true;
        for (const Vec2& p : lattice) {
            SymMat2 A = medium.diffusion(p);
            double lo, hi;
            A.eigenvalues(lo, hi);
            if (medium.dim == 1) { lo = A.a11; hi = A.a11; }
            if (lo < worst) { worst = lo; witness = p; }
            if (lo < medium.lambda1 - 1e-12 || hi > medium.lambda2 + 1e-12)
                bounds_ok = false;
        }
        rep.checks.push_back({"A4 uniform ellipticity", worst > 0.0 && bounds_ok,
                              worst, witness, ""});
    }

    // H1: sign of the integral of f over cell x [0,1]. Simpson in u (exact
    // for cubics), midpoint rule over the periodic cell.
    {
        const int nu = 64;
        double total = 0.0;
        for (const Vec2& p : lattice) {
            double acc = 0.0;
            for (int k = 0; k <= nu; ++k) {
                double u = double(k) / nu;
                double w = (k == 0 || k == nu) ? 1.0 : (k % 2 ? 4.0 : 2.0);
                acc += w * medium.reaction(p, u);
            }
            total += acc / (3.0 * nu);
        }
        double cell_measure = medium.periods.x * (medium.dim == 2 ? medium.periods.y : 1.0);
        rep.h1_integral = total / double(lattice.size()) * cell_measure;
        rep.h1_boundary = std::abs(rep.h1_integral) <= 1e-10;
        rep.h1_positive = rep.h1_integral > 0.0 && !rep.h1_boundary;
    }

    // Homogeneity detection (enables closed-form profile refinement paths).
    {
        double spread = 0.0;
        Vec2 p0 = lattice.front();
        SymMat2 A0 = medium.diffusion(p0);
        for (const Vec2& p : lattice) {
            for (double u : {0.1, 0.3, 0.5, 0.7, 0.9})
                spread = std::max(spread, std::abs(medium.reaction(p, u) -
                                                   medium.reaction(p0, u)));
            SymMat2 A = medium.diffusion(p);
            spread = std::max({spread, std::abs(A.a11 - A0.a11),
                               std::abs(A.a12 - A0.a12), std::abs(A.a22 - A0.a22)});
        }
        rep.homogeneous = spread <= 1e-12;
    }

    return rep;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks)
        os << (c.pass ? "[pass] " : "[FAIL] ") << c.name << "  margin=" << c.margin
           << (c.note.empty() ? "" : "  " + c.note) << "\n";
    os << "H1 integral of f over cell x [0,1]: " << h1_integral
       << (h1_boundary ? "  (boundary case: balanced medium)"
                       : (h1_positive ? "  (> 0)" : "  (< 0)"))
       << "\n";
    os << "homogeneous: " << (homogeneous ? "yes" : "no") << "\n";
    return os.str();
}

PeriodicMedium make_preset_medium(const std::string& preset, double theta0,
                                  double contrast, double a0, Vec2 periods,
                                  int dim) {
    if (preset == "cubic-homogeneous") {
        return make_cubic_medium([theta0](Vec2) { return theta0; },
                                 [a0](Vec2) { return SymMat2{a0, 0.0, a0}; },
                                 periods, dim);
    }
    if (preset == "cubic-striped") {
        double Lx = periods.x;
        return make_cubic_medium(
            [theta0, contrast, Lx](Vec2 p) {
                return theta0 + contrast * std::sin(2.0 * M_PI * p.x / Lx);
            },
            [a0](Vec2) { return SymMat2{a0, 0.0, a0}; }, periods, dim);
    }
    if (preset == "checkerboard-diffusion") {
        double Lx = periods.x, Ly = periods.y;
        return make_cubic_medium(
            [theta0](Vec2) { return theta0; },
            [a0, contrast, Lx, Ly, dim](Vec2 p) {
                double s = std::cos(2.0 * M_PI * p.x / Lx);
                if (dim == 2) s *= std::cos(2.0 * M_PI * p.y / Ly);
                double a = a0 * (1.0 + contrast * s);
                return SymMat2{a, 0.0, a};
            },
            periods, dim);
    }
    throw ConfigFault("unknown medium preset: " + preset);
}

} // namespace rdfront
