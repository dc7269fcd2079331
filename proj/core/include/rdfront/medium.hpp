#ifndef RDFRONT_MEDIUM_HPP
#define RDFRONT_MEDIUM_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rdfront/errors.hpp"
#include "rdfront/vec.hpp"

namespace rdfront {

using ScalarField = std::function<double(Vec2)>;
using MatrixField = std::function<SymMat2(Vec2)>;
using Reaction = std::function<double(Vec2, double)>;

/**
 * Spatially periodic bistable medium: diffusion matrix field A(x) and
 * reaction f(x,u) with stable states 0 and 1, periodic with cell lengths
 * `periods`. Immutable after construction; safe to share across threads.
 */
struct PeriodicMedium {
    int dim = 2;           // 1 or 2
    Vec2 periods{1.0, 1.0};
    MatrixField diffusion;
    Reaction reaction;     // f(x,u), extended outside [0,1] with f_u <= -kappa fringes
    Reaction reaction_du;  // df/du
    double kappa = 0.0;    // monotone-fringe slope bound, > 0
    double sigma = 0.0;    // fringe width, in (0, 1/2)
    double lambda1 = 0.0;  // smallest admissible eigenvalue of A
    double lambda2 = 0.0;  // largest admissible eigenvalue of A

    // Set when built by make_cubic_medium; enables the solver fast path.
    std::optional<ScalarField> cubic_theta;

    // Largest |f_u| over cell x [-0.5, 1.5], sampled at construction.
    double max_reaction_slope = 0.0;
    // Largest |f| over cell x [0, 1], sampled at construction.
    double max_reaction = 0.0;

    // Wrap a point into the periodic cell [0,L).
    Vec2 wrap(Vec2 p) const;
};

/**
 * Cubic bistable medium f(x,u) = u(1-u)(u-theta(x)) with a linear extension
 * outside [0,1] keeping f_u <= -kappa on the fringes. kappa and sigma are
 * derived from the sampled minimum of |f_u| near u = 0 and u = 1.
 * Throws ValidationFault naming the offending cell point for non-SPD
 * diffusion samples or theta outside (0,1).
 */
PeriodicMedium make_cubic_medium(const ScalarField& theta_field,
                                 const MatrixField& diffusion_field,
                                 Vec2 periods, int dim = 2,
                                 int sampling_density = 16);

struct CheckResult {
    std::string name;
    bool pass = false;
    double margin = 0.0;       // worst-case margin, positive means satisfied
    Vec2 witness{};            // sample point realizing the worst margin
    std::string note;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    double h1_integral = 0.0;  // integral of f over cell x [0,1]
    bool h1_positive = false;
    bool h1_boundary = false;  // |integral| below resolution, flagged
    bool homogeneous = false;  // f and A independent of x at sampled points
    std::vector<double> theta_samples;  // located bistable zeros, diagnostics

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    std::string summary() const;
};

/**
 * Checks the structural hypotheses on the medium at `sampling_density`
 * points per period per axis: periodicity, bistable sign pattern with
 * exact zeros at 0 and 1, fringe slope, diffusion eigenvalue bounds, and
 * the sign of the cell-average of f. Failures are report entries.
 */
ValidationReport validate_medium(const PeriodicMedium& medium, int sampling_density = 16);

// Named presets used by the experiment configs.
// cubic-homogeneous: theta, A = a*I constants.
// cubic-striped:     theta(x) = theta0 + contrast*sin(2 pi x / Lx), A = a*I.
// checkerboard-diffusion: theta constant, scalar a(x,y) varying in both axes.
PeriodicMedium make_preset_medium(const std::string& preset, double theta0,
                                  double contrast, double a0, Vec2 periods,
                                  int dim);

} // namespace rdfront

#endif
