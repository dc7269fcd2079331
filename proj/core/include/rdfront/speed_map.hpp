#ifndef RDFRONT_SPEED_MAP_HPP
#define RDFRONT_SPEED_MAP_HPP

#include <functional>
#include <string>
#include <vector>

#include "rdfront/geometry.hpp"
#include "rdfront/medium.hpp"
#include "rdfront/pulsating.hpp"

namespace rdfront {

struct SpeedSample {
    Vec2 e;              // unit direction (frame coordinates of e0 = (0,1))
    double c = 0.0;
    double stderr_ = 0.0;
    FrontOutcome outcome = FrontOutcome::no_front;
};

/**
 * Tabulated anisotropic speed c_e over directions with the normalized
 * evaluator g(x) = c_{x/|x|} / (x/|x| . e0). Piecewise-linear over angle,
 * or an analytic override for synthetic tests.
 */
struct SpeedMap {
    Vec2 e0{0.0, 1.0};
    std::vector<SpeedSample> samples;  // frame coordinates, sorted by polar angle
    std::function<double(Vec2)> override_c; // bypasses sampling when set
    bool partial = false;              // some direction failed to converge

    bool has_override() const { return bool(override_c); }
    double angular_spacing() const;    // radians between adjacent samples
    double max_stderr() const;
    double speed_at(Vec2 e_world) const; // interpolated c_e; extrapolation faults

    Vec2 to_frame(Vec2 p) const {
        return {e0.y * p.x - e0.x * p.y, e0.x * p.x + e0.y * p.y};
    }
    Vec2 from_frame(Vec2 p) const {
        return {e0.y * p.x + e0.x * p.y, -e0.x * p.x + e0.y * p.y};
    }
};

/** Equi-angular sampled map; failed directions mark the map partial. */
SpeedMap build_speed_map(const PeriodicMedium& medium, Vec2 e0, int direction_count,
                         const FrontRunConfig& run_cfg, int workers = 1);

/** Synthetic map from an analytic direction-to-speed function. */
SpeedMap override_speed_map(Vec2 e0, std::function<double(Vec2)> c_of_e);

/** g(x) = c_{x/|x|}/((x/|x|).e0); requires (x/|x|).e0 > 0.05. */
double eval_g(const SpeedMap& map, Vec2 x);

/** Central differences of g in ambient coordinates with step delta. */
Vec2 grad_g(const SpeedMap& map, Vec2 e, double delta = 1e-3);

enum class TheoremVariant { existence_V, existence_W };
enum class Verdict { pass, fail, indeterminate };

struct PairSign {
    int i = 0, j = 0;
    double value = 0.0;   // grad g(e_i) . e_j
    Verdict verdict = Verdict::indeterminate;
};

/** Per-condition verdicts with margins for the glueing conditions (i)-(iv). */
struct ConditionReport {
    TheoremVariant variant = TheoremVariant::existence_V;
    Verdict cond_i = Verdict::fail;
    Verdict cond_ii = Verdict::fail;
    Verdict cond_iii = Verdict::fail;
    Verdict cond_iv = Verdict::fail;
    double chat = 0.0;        // stderr-weighted mean of g(e_i)
    double dev_ii = 0.0;      // max |g(e_i) - chat|
    double tol_ii = 0.0;
    double margin_iii = 0.0;  // min over the sampled cap of the signed gap
    double exclusion_radius = 0.0;
    double cap_resolution = 0.0;
    std::vector<PairSign> pair_signs;
    double noise_floor_iv = 0.0;
    bool interpolation_limited = false;

    bool pass() const {
        return cond_i == Verdict::pass && cond_ii == Verdict::pass &&
               cond_iii == Verdict::pass && cond_iv == Verdict::pass;
    }
    std::string summary() const;
};

/**
 * Checks (i) distinctness/tilt, (ii) equality of g at the facets up to
 * measurement tolerance, (iii) the strict cap inequality outside facet
 * neighborhoods, (iv) the gradient sign table, against the requested
 * theorem variant. Margins within measurement noise come back
 * indeterminate rather than pass/fail.
 */
ConditionReport check_theorem_conditions(const SpeedMap& map, const PolytopeSpec& poly,
                                         TheoremVariant variant, double grad_delta = 1e-3);

} // namespace rdfront

#endif
