#include "rdfront/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rdfront {

namespace {

double polar_angle(Vec2 e) { return std::atan2(e.y, e.x); }

double point_ray_distance(Vec2 p, Vec2 dir) {
    // dir is unit; ray from the origin
    double t = std::max(0.0, p.dot(dir));
    Vec2 q = dir * t;
    return (p - q).norm();
}

} // namespace

double PolytopeSpec::min_support(Vec2 p) const {
    double m = 1e300;
    for (const Vec2& e : facets) m = std::min(m, p.dot(e));
    return m;
}

double PolytopeSpec::dist_boundary(Vec2 p) const {
    if (n() == 1) return std::abs(p.dot(facets[0]));
    double lo, hi;
    cap_range(lo, hi);
    // boundary rays sit at the cap endpoints rotated by +-90 degrees
    Vec2 ray_a{std::cos(lo + M_PI / 2.0), std::sin(lo + M_PI / 2.0)};
    Vec2 ray_b{std::cos(hi - M_PI / 2.0), std::sin(hi - M_PI / 2.0)};
    return std::min(point_ray_distance(p, ray_a), point_ray_distance(p, ray_b));
}

double PolytopeSpec::dist_ridge(Vec2 p) const {
    if (!has_ridge) return std::numeric_limits<double>::infinity();
    return p.norm();
}

void PolytopeSpec::cap_range(double& lo, double& hi) const {
    double bmin = 1e300, bmax = -1e300;
    for (const Vec2& e : facets) {
        double b = polar_angle(e);
        bmin = std::min(bmin, b);
        bmax = std::max(bmax, b);
    }
    lo = bmax - M_PI / 2.0;
    hi = bmin + M_PI / 2.0;
}

bool PolytopeSpec::in_cap(Vec2 e, double tol) const {
    double lo, hi;
    cap_range(lo, hi);
    double g = polar_angle(e.normalized());
    return g >= lo - tol && g <= hi + tol;
}

PolytopeSpec build_polytope(Vec2 e0, const std::vector<Vec2>& facet_normals) {
    if (facet_normals.empty())
        throw ValidationFault("polytope: needs at least one facet");
    PolytopeSpec poly;
    poly.e0 = e0.normalized();
    // rotation taking e0 to (0,1): frame = R * world
    poly.rot_cos = poly.e0.y;
    poly.rot_sin = poly.e0.x;

    for (Vec2 e : facet_normals) {
        Vec2 f = poly.to_frame(e.normalized());
        if (f.y <= 0.0)
            throw ValidationFault(
                "polytope: condition (i) violated, facet not tilted toward e0");
        poly.facets.push_back(f);
    }
    for (std::size_t i = 0; i < poly.facets.size(); ++i)
        for (std::size_t j = i + 1; j < poly.facets.size(); ++j)
            if ((poly.facets[i] - poly.facets[j]).norm() < 1e-12)
                throw ValidationFault(
                    "polytope: condition (i) violated, duplicate facet directions");

    for (const Vec2& f : poly.facets) {
        double st = f.y;
        double ct = std::abs(f.x);
        poly.sin_t.push_back(st);
        poly.cos_t.push_back(ct);
        poly.nu.push_back(f.x >= 0.0 ? 1.0 : -1.0);
    }

    double bmin = 1e300, bmax = -1e300;
    int imin = 0, imax = 0;
    for (int i = 0; i < poly.n(); ++i) {
        double b = polar_angle(poly.facets[i]);
        if (b < bmin) { bmin = b; imin = i; }
        if (b > bmax) { bmax = b; imax = i; }
    }
    poly.extremal = {imin};
    if (imax != imin) poly.extremal.push_back(imax);
    poly.has_ridge = poly.n() >= 2 && imax != imin;
    return poly;
}

PolytopeSpec build_polytope_from_angles(Vec2 e0, const std::vector<double>& degrees) {
    std::vector<Vec2> dirs;
    Vec2 e0n = e0.normalized();
    PolytopeSpec frame_helper;
    frame_helper.rot_cos = e0n.y;
    frame_helper.rot_sin = e0n.x;
    for (double d : degrees) {
        double rad = d * M_PI / 180.0;
        dirs.push_back(frame_helper.from_frame({std::cos(rad), std::sin(rad)}));
    }
    return build_polytope(e0, dirs);
}

SurfaceEval surface_height(const PolytopeSpec& poly, double x, double alpha) {
    if (alpha <= 0.0) throw ValidationFault("surface: alpha must be positive");
    const int n = poly.n();
    SurfaceEval ev;
    ev.x = x;
    ev.alpha = alpha;
    const double z = alpha * x;

    // t_i = z nu_i cos theta_i; solve sum exp(-(t_i + Y s_i)) = 1 for Y.
    std::vector<double> ti(n);
    double y_lo = -1e300, smin = 1.0;
    for (int i = 0; i < n; ++i) {
        ti[i] = z * poly.nu[i] * poly.cos_t[i];
        y_lo = std::max(y_lo, -ti[i] / poly.sin_t[i]);
        smin = std::min(smin, poly.sin_t[i]);
    }
    double y_hi = y_lo + std::log(double(std::max(n, 2))) / smin + 1e-9;

    auto G = [&](double Y, double& dG) {
        double s = 0.0;
        dG = 0.0;
        for (int i = 0; i < n; ++i) {
            double w = std::exp(-(ti[i] + Y * poly.sin_t[i]));
            s += w;
            dG -= poly.sin_t[i] * w;
        }
        return s - 1.0;
    };

    double dG;
    double Y = 0.5 * (y_lo + y_hi);
    double g = G(Y, dG);
    for (int it = 0; it < 200; ++it) {
        if (std::abs(g) <= 1e-13) break;
        if (g > 0)
            y_lo = Y;
        else
            y_hi = Y;
        double step = g / dG;
        double Yn = Y - step;
        if (!(Yn > y_lo && Yn < y_hi)) Yn = 0.5 * (y_lo + y_hi);
        Y = Yn;
        g = G(Y, dG);
    }
    if (std::abs(g) > 1e-12)
        throw NumericsFault("surface: defining-sum root not found to 1e-13");

    ev.phi = Y;
    ev.phi_scaled = Y / alpha;
    ev.residual = g;
    ev.qhat.resize(n);
    std::vector<double> w(n);
    double S0 = 0.0, Gx = 0.0;
    for (int i = 0; i < n; ++i) {
        ev.qhat[i] = ti[i] + Y * poly.sin_t[i];
        w[i] = std::exp(-ev.qhat[i]);
        S0 += w[i] * poly.sin_t[i];
        Gx += w[i] * poly.nu[i] * poly.cos_t[i];
    }
    ev.dphi = -Gx / S0;
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double di = poly.nu[i] * poly.cos_t[i] + poly.sin_t[i] * ev.dphi;
        d2 += w[i] * di * di;
    }
    ev.d2phi = d2 / S0;
    ev.slope_norm = std::sqrt(1.0 + ev.dphi * ev.dphi);
    double sw2 = 0.0;
    for (int i = 0; i < n; ++i) sw2 += w[i] * w[i];
    ev.h = 1.0 - sw2; // = sum_{j != k} w_j w_k since sum w_i = 1
    ev.normal = Vec2{-ev.dphi, 1.0} * (1.0 / ev.slope_norm);
    ev.tau.resize(n);
    for (int i = 0; i < n; ++i) ev.tau[i] = w[i] / (ev.slope_norm * S0);
    return ev;
}

double interaction_h(const PolytopeSpec& poly, double x, double alpha) {
    if (poly.n() == 1) return 0.0;
    return surface_height(poly, x, alpha).h;
}

Vec2 normal_e(const PolytopeSpec& poly, double x, double alpha,
              std::vector<double>* tau) {
    SurfaceEval ev = surface_height(poly, x, alpha);
    if (tau) *tau = ev.tau;
    return ev.normal;
}

double moving_coordinate(const PolytopeSpec& poly, double t, double x, double y,
                         double cbar, double alpha, FrameSide side) {
    if (side == FrameSide::upper) {
        SurfaceEval ev = surface_height(poly, x, alpha);
        return (y - cbar * t - ev.phi_scaled) / ev.slope_norm;
    }
    SurfaceEval ev = surface_height(poly, -x, alpha);
    return (y - cbar * t + ev.phi_scaled) / ev.slope_norm;
}

ShiftedPolytope shifted_polytope(const PolytopeSpec& poly, int facet, double lambda) {
    if (facet < 0 || facet >= poly.n())
        throw ValidationFault("shifted polytope: facet index out of range");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ValidationFault("shifted polytope: lambda must lie in (0,1)");
    ShiftedPolytope out;
    out.facet = facet;
    out.lambda = lambda;
    const Vec2 ei = poly.facets[facet];
    std::vector<Vec2> dirs;
    double spread = 0.0;
    for (int j = 0; j < poly.n(); ++j) {
        Vec2 d;
        if (j == facet) {
            d = ei;
        } else {
            Vec2 raw = ei * (1.0 - lambda) - poly.facets[j] * lambda;
            if ((1.0 - lambda) * poly.sin_t[facet] - lambda * poly.sin_t[j] <= 0.0)
                throw ValidationFault(
                    "shifted polytope: tilt constraint violated against facet " +
                    std::to_string(j));
            d = raw.normalized();
        }
        spread = std::max(spread, (d - ei).norm());
        dirs.push_back(d);
    }
    // dirs are frame coordinates; rebuild in the same frame via e0 = (0,1)
    out.poly = build_polytope({0.0, 1.0}, dirs);
    out.poly.e0 = poly.e0;
    out.poly.rot_cos = poly.rot_cos;
    out.poly.rot_sin = poly.rot_sin;
    out.spread = spread;
    return out;
}

} // namespace rdfront
