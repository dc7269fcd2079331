#ifndef RDFRONT_GEOMETRY_HPP
#define RDFRONT_GEOMETRY_HPP

#include <vector>

#include "rdfront/errors.hpp"
#include "rdfront/vec.hpp"

namespace rdfront {

/**
 * Unbounded planar polytope Q = {p : min_i p.e_i > 0} spanned by facet
 * normals e_i with e_i.e0 > 0. Geometry is evaluated in the frame in which
 * e0 is rotated to (0,1); facet normals decompose as (nu_i cos theta_i,
 * sin theta_i) with nu_i = +-1 and theta_i in (0, pi/2].
 */
struct PolytopeSpec {
    Vec2 e0{0.0, 1.0};         // user-facing reference direction
    double rot_cos = 1.0;      // frame rotation: frame = R * world
    double rot_sin = 0.0;
    std::vector<Vec2> facets;  // unit normals in the frame
    std::vector<double> nu, cos_t, sin_t;
    std::vector<int> extremal; // facet indices with nonempty boundary patches
    bool has_ridge = false;    // 2D ridge set is {origin} when n >= 2

    int n() const { return int(facets.size()); }

    // Rotation taking e0 to (0,1): frame = R * world, R = [[c,-s],[s,c]]
    // with c = e0.y, s = e0.x.
    Vec2 to_frame(Vec2 p) const {
        return {rot_cos * p.x - rot_sin * p.y, rot_sin * p.x + rot_cos * p.y};
    }
    Vec2 from_frame(Vec2 p) const {
        return {rot_cos * p.x + rot_sin * p.y, -rot_sin * p.x + rot_cos * p.y};
    }

    // All in frame coordinates:
    double min_support(Vec2 p) const;   // min_i p.e_i
    bool contains(Vec2 p) const { return min_support(p) > 0.0; }
    double dist_boundary(Vec2 p) const;
    double dist_ridge(Vec2 p) const;    // +inf when the ridge set is empty

    // Closed dual cap L(Q) as a polar-angle interval [lo, hi] in the frame.
    void cap_range(double& lo, double& hi) const;
    bool in_cap(Vec2 e, double tol = 1e-12) const;
};

/** Fault cites condition (i) for duplicate facets or facets tilted away from e0. */
PolytopeSpec build_polytope(Vec2 e0, const std::vector<Vec2>& facet_normals);

/** Facet list from polar angles (degrees) in the frame where e0 = (0,1). */
PolytopeSpec build_polytope_from_angles(Vec2 e0, const std::vector<double>& degrees);

/**
 * Pointwise data of the mollified surface: the root Y of
 * sum_i exp(-(z . nu_i cos theta_i + Y sin theta_i)) = 1 at z = alpha x,
 * with first and second derivatives from implicit differentiation and the
 * pair-interaction weight h.
 */
struct SurfaceEval {
    double x = 0.0;        // query coordinate (frame, transverse axis)
    double alpha = 1.0;
    double phi = 0.0;      // phi(alpha x): unscaled surface height
    double phi_scaled = 0.0; // phi(alpha x)/alpha
    double dphi = 0.0;     // phi'(alpha x)
    double d2phi = 0.0;    // phi''(alpha x), nonnegative
    double slope_norm = 1.0; // sqrt(1 + dphi^2)
    double h = 0.0;        // sum_{j != k} exp(-(qhat_j + qhat_k))
    double residual = 0.0; // defining-sum residual at the root
    std::vector<double> qhat; // q_i at the surface point, all >= 0
    std::vector<double> tau;  // convex weights of e(x) over the facets
    Vec2 normal{0.0, 1.0};    // e(x) in the frame
};

SurfaceEval surface_height(const PolytopeSpec& poly, double x, double alpha);

/** Pair-interaction weight h(alpha x); ordered pairs, each counted twice. */
double interaction_h(const PolytopeSpec& poly, double x, double alpha);

/** Unit normal e(x) of the rescaled surface, with convex facet weights. */
Vec2 normal_e(const PolytopeSpec& poly, double x, double alpha,
              std::vector<double>* tau = nullptr);

enum class FrameSide { upper, lower };

/**
 * Moving coordinates: upper uses the surface under Q, lower the reflected
 * surface; cbar is the frame speed along e0.
 */
double moving_coordinate(const PolytopeSpec& poly, double t, double x, double y,
                         double cbar, double alpha, FrameSide side);

/**
 * Shifted direction set e_ij = ((1-lambda) e_i - lambda e_j)/|.| with
 * e_ii = e_i, carrying its own surface and interaction weight.
 */
struct ShiftedPolytope {
    int facet = 0;
    double lambda = 0.0;
    PolytopeSpec poly;     // the shifted facet set
    double spread = 0.0;   // max_j |e_ij - e_i|
};

ShiftedPolytope shifted_polytope(const PolytopeSpec& poly, int facet, double lambda);

} // namespace rdfront

#endif
