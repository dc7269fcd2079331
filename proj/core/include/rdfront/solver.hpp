#ifndef RDFRONT_SOLVER_HPP
#define RDFRONT_SOLVER_HPP

#include <functional>
#include <memory>
#include <vector>

#include "rdfront/grid.hpp"
#include "rdfront/medium.hpp"

namespace rdfront {

/** Value imposed on clamped faces: absolute coordinates, current time. */
using BoundaryFn = std::function<double(double t, Vec2 p)>;

enum class Scheme { explicit_euler, imex };

struct SolverConfig {
    double dt = 0.0;          // <= 0 selects the monotone bound automatically
    double T = 1.0;           // end time relative to the initial field's t
    double snapshot_dt = 0.0; // <= 0 stores only first/last
    Scheme scheme = Scheme::explicit_euler;
    double inner_tol = 1e-10;      // linear-solve tolerance for imex diffusion
    double divergence_guard = 1.1; // |u| beyond this aborts the run
    bool enforce_bounds = true;    // reject dt above the monotone bound
    bool allow_range_override = false; // permit initial data outside [0,1]
    BoundaryFn boundary;           // required when any face is clamped
    int workers = 1;
};

struct Trajectory {
    std::vector<Field> snapshots;
    double dt = 0.0;
};

/** Largest dt keeping the scheme monotone on this grid/medium pair. */
double stable_dt(const Grid& grid, const PeriodicMedium& medium, Scheme scheme);

/** Fault unless grid spacings evenly divide the medium periods. */
void check_lattice_alignment(const Grid& grid, const PeriodicMedium& medium);

/**
 * One-step evolution engine. Face diffusion coefficients are harmonic means
 * of the adjacent node values per entry (arithmetic fallback for the signed
 * off-diagonal entry); reaction is explicit. Precomputes coefficient tables,
 * so reuse one Stepper for a whole run.
 */
class Stepper {
  public:
    Stepper(const PeriodicMedium& medium, const Grid& grid, const SolverConfig& cfg);
    ~Stepper();
    Stepper(Stepper&&) noexcept;
    Stepper& operator=(Stepper&&) noexcept;

    // Advance in place by cfg.dt. Throws NumericsFault on divergence.
    void advance(Field& u) const;

    double dt() const;

    // Re-impose clamped-face values at the field's current time.
    void apply_boundary(Field& u) const;

    // Divergence-guard scan of a state (finiteness and the guard band).
    void check_state(const Field& u) const;

    // Discrete spatial operator div(A grad u) + f(x,u), interior nodes only;
    // boundary ring left as zeros.
    void apply_operator(const Field& u, Field& out) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/** One explicit/imex step of the monotone scheme; returns the advanced field. */
Field step(const PeriodicMedium& medium, const Field& state, const SolverConfig& cfg);

/** Evolve to cfg.T, storing snapshots at the configured cadence. */
Trajectory solve_cauchy(const PeriodicMedium& medium, const Field& u0,
                        const SolverConfig& cfg);

/**
 * Discrete parabolic residual N u = u_t - div(A grad u) - f(x,u) at the
 * middle of three equally spaced snapshots (central difference in time,
 * solver spatial discretization). Boundary ring excluded.
 */
Field residual(const PeriodicMedium& medium, const Field& before,
               const Field& middle, const Field& after);

struct ComparisonReport {
    double min_gap = 0.0;   // min over time and space of (u_high - u_low)
    double t_worst = 0.0;
    Vec2 where{};
    bool pass = false;      // min_gap >= -1e-10
};

/** Evolve an ordered pair and report the worst ordering gap over the run. */
ComparisonReport check_comparison(const PeriodicMedium& medium, const Field& u0_low,
                                  const Field& u0_high, const SolverConfig& cfg);

} // namespace rdfront

#endif
