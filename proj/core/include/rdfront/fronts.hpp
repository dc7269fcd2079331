#ifndef RDFRONT_FRONTS_HPP
#define RDFRONT_FRONTS_HPP

#include <functional>
#include <string>
#include <vector>

#include "rdfront/geometry.hpp"
#include "rdfront/profile.hpp"
#include "rdfront/pulsating.hpp"
#include "rdfront/solver.hpp"
#include "rdfront/speed_map.hpp"

namespace rdfront {

enum class FrontVariant { V_family, W_family };

/** Bound families assembled from the mollified surfaces. */
enum class BoundFamily { super_V, sub_W, stab_sub_V, stab_super_W };

using SpaceTimeFn = std::function<double(double t, Vec2 p)>;

/** Per-facet pulsating front data used by the assembly. */
struct FacetFront {
    Vec2 e_frame;          // facet direction in the e0 frame
    double speed = 0.0;    // speed used by the assembly evaluators
    double speed_measured = 0.0;
    double speed_stderr = 0.0;
    double xi_shift = 0.0; // normalization shift baked into evaluations
    ProfileFun profile;
};

/**
 * Everything needed to evaluate the planar mixes and the curved
 * sub/supersolutions of one variant on one polytope: medium, geometry,
 * speed map, per-facet profiles, and the pair (eps, alpha).
 *
 * For media detected homogeneous the facet profiles are refined by the
 * planar-wave collocation solve, giving solver-grade smoothness for the
 * residual scans; otherwise the binned tables evaluate directly.
 */
class FrontAssembly {
  public:
    static FrontAssembly build(const PeriodicMedium& medium, const PolytopeSpec& poly,
                               const SpeedMap& map,
                               const std::vector<PulsatingFront>& fronts,
                               FrontVariant variant, double lambda_scale = 0.3);

    const PeriodicMedium& medium() const { return medium_; }
    const PolytopeSpec& poly() const { return poly_; }
    const SpeedMap& map() const { return map_; }
    FrontVariant variant() const { return variant_; }
    bool homogeneous() const { return homogeneous_; }
    double chat() const { return chat_; }
    double sigma() const { return medium_.sigma; }
    double eps() const { return eps_; }
    double alpha() const { return alpha_; }
    double lambda_of(int facet) const { return lambda_[facet]; }
    const ShiftedPolytope& shifted(int facet) const { return shifted_[facet]; }
    const std::vector<FacetFront>& facets() const { return facets_; }
    double map_consistency() const { return map_chat_dev_; }

    // eps must stay at or below sigma/2; alpha positive.
    void set_eps_alpha(double eps, double alpha);

    // Planar mixes: max of the facet fronts (V family) or min (W family).
    double planar_mix(double t, Vec2 p) const;
    // Same with caller-supplied per-facet phase shifts xi_i = p.e_i - shift_i.
    double planar_mix_shifted(const std::vector<double>& shifts, Vec2 p,
                              bool use_min) const;

    // Curved bounds; frame_offset defaults to chat * t. stab_* families
    // need the facet index.
    double curved_bound(double t, Vec2 p, BoundFamily family, int facet = -1) const;
    double curved_bound_offset(double frame_offset, Vec2 p, BoundFamily family,
                               int facet = -1) const;

    // Speed of the pulsating front toward a world direction.
    double speed_toward(Vec2 e_world) const;

    // Direction-interpolated profile evaluation; e in frame coordinates.
    double profile_value(Vec2 e_frame, double xi, Vec2 cell_world) const;

    // Logged decay of h along the surface: (ridge distance, h).
    const std::vector<std::pair<double, double>>& h_decay() const { return h_decay_; }
    // Smallest logged ridge distance with h <= level.
    double far_field_distance(double level) const;

    long profile_tail_hits() const;

  private:
    PeriodicMedium medium_;
    PolytopeSpec poly_;
    SpeedMap map_;
    FrontVariant variant_ = FrontVariant::V_family;
    bool homogeneous_ = false;
    double chat_ = 0.0;
    double eps_ = 0.0, alpha_ = 0.0;
    double map_chat_dev_ = 0.0;
    std::vector<FacetFront> facets_;
    std::vector<ShiftedPolytope> shifted_;
    std::vector<double> lambda_;
    std::vector<std::pair<double, double>> h_decay_;

    void log_h_decay();
};

struct MarginReport {
    double min_ratio = 0.0;  // worst (speed gap)/h over the lattice
    double at_x = 0.0;
    int points = 0;
    bool vacuous = false;    // no h > 0 points (single facet)
    bool pass = false;
};

/**
 * Frame-speed margin against the interpolated speeds: the gap between
 * chat projected on the surface normal and c_{e(x)}, normalized by h.
 */
MarginReport verify_speed_margin(const FrontAssembly& assembly,
                                 const std::vector<double>& lattice_x);

struct CalibrationEntry {
    double eps = 0.0, alpha = 0.0;
    double worst_super = 0.0; // most negative supersolution residual
    double worst_sub = 0.0;   // most positive subsolution residual
    bool ok = false;
};

struct CalibrationResult {
    double eps = 0.0, alpha = 0.0;
    bool ok = false;
    double tol = 0.0;
    std::vector<CalibrationEntry> scan;
};

struct CalibConfig {
    double h_res = 0.05;     // residual lattice spacing
    double dt_res = 1e-3;    // central-difference half step
    double ridge_half_width = 20.0;
    double band_half_height = 26.0;
    double facet_patch_half_width = 10.0;
};

/**
 * Scans eps in {sigma/2, sigma/4, sigma/8} and alpha in
 * {0.4, 0.2, 0.1, 0.05} * min_i sin(theta_i); a pair passes when the
 * discrete residuals of the variant's bound families keep their signs to
 * 1e-3 * max|f| on the sample lattice. The largest passing pair is applied
 * to the assembly.
 */
CalibrationResult calibrate_eps_alpha(FrontAssembly& assembly,
                                      const CalibConfig& cfg = {});

/** Worst signed discrete residual of an evaluator on a patch at time t. */
void scan_residual(const FrontAssembly& assembly, const SpaceTimeFn& fn,
                   const Grid& patch, double t, double dt, double& min_res,
                   double& max_res);

enum class StartFamily { lower_envelope, upper_envelope };

struct WindowSpec {
    double half_width_x = 20.0;
    double headroom = 14.0;      // clearance above and below the travel range
    double h = 0.1;
    double snapshot_dt = 0.5;
    double keep_dt = 1.0;        // cadence of stored snapshots
    int workers = 1;
};

/** Constructed curved front on a window plus its certificates and metrics. */
struct FrontBundle {
    FrontVariant variant = FrontVariant::V_family;
    Field final_field;
    std::vector<Field> kept;     // sparse snapshots including the final one
    std::vector<std::pair<double, std::vector<Vec2>>> interfaces; // (t, polyline)
    double chat = 0.0, eps = 0.0, alpha = 0.0;
    double bleed = 0.0;          // envelope speed bleed fraction
    double verify_sub = 0.0;     // one-step discrete subsolution margin
    double verify_super = 0.0;   // one-step discrete supersolution margin
    double envelope_gap = 0.0;   // min over checks of upper - lower envelope
    double min_gap_lower = 0.0;  // min over run of u - lower envelope
    double min_gap_upper = 0.0;  // min over run of upper envelope - u
    double min_monotone = 0.0;   // min over steps of the signed time increment
    double horizon = 0.0;
    StartFamily start = StartFamily::lower_envelope;
    // envelope reconstruction data (anchored at t = -horizon)
    std::vector<double> env_speeds;  // per facet, bled
    double env_chat = 0.0;           // bled frame speed of the curved bound
};

/**
 * Evolves the Cauchy problem from the variant's planar envelope at
 * t = -horizon up to t = 0 on a clamped window, certifying the discrete
 * sandwich by one-step envelope verification with a small speed bleed.
 */
FrontBundle construct_front(const FrontAssembly& assembly, double horizon,
                            const WindowSpec& window,
                            StartFamily start = StartFamily::lower_envelope);

/** Sup-norm difference of two bundles' final fields on a common subwindow. */
double bundle_difference(const FrontBundle& a, const FrontBundle& b,
                         double half_width_x, double half_width_y);

struct TransitionMetrics {
    std::vector<std::pair<double, double>> M_of_eps; // (eps, smallest M)
    double drift_speed = 0.0;       // interface drift along e0
    double drift_stderr = 0.0;
    double inf_distance_rate = 0.0; // d(Gamma_t, Gamma_s)/|t-s|, extreme pair
};

/** Interface-neighborhood widths M(eps) against Gamma_t = dQ + chat t e0. */
TransitionMetrics transition_metrics(const FrontBundle& bundle,
                                     const FrontAssembly& assembly,
                                     const std::vector<double>& eps_list);

struct StabilityParams {
    double delta = 0.0;       // in (0, sigma/2]
    double omega = 0.0;
    double lambda_rate = 0.0;
    double k_measured = 0.0;  // min u_t on the mid-range set
    double sigma1 = 0.0;
};

/** Measures k and picks (omega, lambda) for the time-shift squeeze. */
StabilityParams calibrate_squeeze(const FrontAssembly& assembly, const SpaceTimeFn& base,
                                  const Grid& patch, double t0, double delta);

/** u(t +- omega delta (1 - e^{-lambda t})) +- delta e^{-lambda t}. */
SpaceTimeFn squeeze_evaluator(const SpaceTimeFn& base, const StabilityParams& params,
                              int sign);

struct StabilitySeries {
    std::vector<double> t;
    std::vector<double> s;       // minimizing-shift sup gap
    std::vector<double> tau;     // minimizing shifts
    double s_final = 0.0;
    bool eventually_decreasing = false;
    bool pass = false;           // s_final <= 0.05 and eventually decreasing
};

struct StabilityConfig {
    double T = 24.0;
    WindowSpec window{16.0, 16.0, 0.1, 0.5, 1.0, 1};
    double far_field_tol = 0.1;   // initial-data closeness away from the ridge
    double ridge_radius = 8.0;    // neighborhood excluded from the check
    double tau_bracket = 1.0;
    bool co_moving = false;       // remap the window by whole periods
    double gap_threshold = 0.05;
};

/**
 * Evolves u0 alongside the constructed front and records the
 * minimizing-shift sup gap s(t); the reference evolves with the same
 * scheme from the bundle's final field.
 */
StabilitySeries run_stability(const FrontAssembly& assembly, const FrontBundle& bundle,
                              const SpaceTimeFn& u0, const StabilityConfig& cfg);

} // namespace rdfront

#endif
