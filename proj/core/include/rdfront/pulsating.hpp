#ifndef RDFRONT_PULSATING_HPP
#define RDFRONT_PULSATING_HPP

#include <optional>
#include <string>
#include <vector>

#include "rdfront/medium.hpp"
#include "rdfront/profile.hpp"
#include "rdfront/solver.hpp"

namespace rdfront {

enum class FrontOutcome { converged, near_stationary, no_front };

/**
 * Pulsating front in one direction: speed, normalized profile table,
 * and the measured decay/interior diagnostics.
 */
struct PulsatingFront {
    Vec2 direction{1.0, 0.0};
    double speed = 0.0;
    double speed_stderr = 0.0;
    FrontOutcome outcome = FrontOutcome::no_front;
    ProfileTable table;       // empty on speed-only or degenerate outcomes
    double shift = 0.0;       // accumulated normalization shift
    double norm_value = 0.0;  // value of the normalization integral
    double decay_mu = 0.0;    // fitted exponential rate of |dU/dxi| tails
    double decay_C = 0.0;
    double decay_r2 = 0.0;
    bool decay_ok = false;
    double delta = 0.0;       // interior bound on min(U, 1-U)
    double interior_r = 0.0;  // interior bound on -dU/dxi

    bool has_profile() const { return !table.empty(); }
};

struct FrontRunConfig {
    double h = 0.05;
    double strip_length = 60.0;  // extent along the propagation direction
    double width = 0.0;          // transverse extent (2D); 0 selects a default
    double T_max = 120.0;
    double snapshot_dt = 0.25;
    double stationary_rel_tol = 1e-4;
    bool want_profile = true;
    double interior_R = 2.0;     // window for the interior bounds
    int workers = 1;
};

struct SpeedFit {
    double c = 0.0;
    double stderr_ = 0.0;
    int points = 0;
};

/**
 * Runs the Cauchy problem from a smoothed step along e, detects the
 * steadily propagating regime, and extracts speed plus (for
 * lattice-commensurate directions) the binned profile with diagnostics.
 * Non-convergence is reported through the outcome field, not a fault.
 */
PulsatingFront compute_front(const PeriodicMedium& medium, Vec2 e,
                             const FrontRunConfig& cfg);

/**
 * Mean displacement rate of the u = 1/2 level set along e, least squares
 * over the stationary window of the trajectory. Cell-averaged positions
 * suppress the periodic wobble.
 */
SpeedFit measure_speed(const Trajectory& traj, Vec2 e);

/** Level positions per snapshot (diagnostic view of measure_speed). */
std::vector<double> level_positions(const Trajectory& traj, Vec2 e);

/**
 * Bins trajectory samples by (xi = x.e - c t, x mod L) and averages within
 * bins of width <= h/2; isotonic projection repairs violations beyond 1e-6.
 */
ProfileTable extract_profile(const PeriodicMedium& medium, const Trajectory& traj,
                             Vec2 e, double c, double stderr_ = 0.0);

/**
 * Shifts the profile so the integral of U^2 over {xi > 0} x cell equals 1
 * (trapezoid rule, tolerance 1e-6). Returns the front with the shifted
 * table and the accumulated shift.
 */
PulsatingFront normalize_shift(PulsatingFront front);

/** Log-linear tail fit of |dU/dxi|; returns (mu, C) and flags poor fits. */
void estimate_decay(PulsatingFront& front);

/** Interior bounds delta and r over |xi| <= R times the cell. */
void interior_bounds(PulsatingFront& front, double R);

/** True when some integer combination of periods is parallel to e. */
bool lattice_commensurate(const PeriodicMedium& medium, Vec2 e, int max_index = 8);

} // namespace rdfront

#endif
