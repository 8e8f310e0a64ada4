#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mfgcap/model.hpp"

namespace mfgcap {

enum class ShootClass { TooHigh, TooLow, Accepted };

const char* to_string(ShootClass c);

/// Result of integrating y'' = rho y' + (rho+delta) delta y - y^{-beta}
/// from y_0 = x, y'_0 = zeta - delta x.
struct ShootOutcome {
    ShootClass classification = ShootClass::Accepted;
    std::optional<double> exit_time;  // set for TooHigh / TooLow
    double step = 0.0;
    std::vector<double> trajectory;   // y at s_k, up to and including the exit step
    std::vector<double> slope;        // y' at the same points
};

struct ShootReport {
    double zeta_star = 0.0;                                // z'(0) = u(0) of the first segment
    std::vector<std::pair<double, double>> bracket_history;  // first segment
    int bisections = 0;                                    // over all segments
    int segments = 0;                                      // re-anchored shooting segments
    double terminal_gap = 0.0;                             // |y(s_max_extended) - y_inf| after shooting
    int polish_iterations = 0;                             // Picard sweeps onto the discrete fixed point
    GridFunction q_extended;                               // q on [0, s_max_extended]
};

/// Classifies the trajectory against the corridor between x and y_inf:
/// leaving it above (or turning upward when it should fall) is TooHigh,
/// leaving it below, turning downward when it should rise, or reaching
/// y <= 0 is TooLow. Fixed-step classic RK4 on the grid step.
ShootOutcome integrate_ivp(const ModelParams& params, double x, double zeta, const TimeGrid& grid,
                           double corridor_eps = 1e-6);

/// Infinite-horizon equilibrium on the display window grid [0, s_max]. The
/// ODE is integrated on [0, s_max + cfg.horizon_extension] with the same
/// step, bisecting the initial slope inside (0, x^{-beta}/(rho+delta-delta beta)].
std::pair<EquilibriumSolution, ShootReport> shoot_equilibrium_infinite(
    const ModelParams& params, const InitialDistribution& init, const TimeGrid& display_grid,
    const SolverConfig& cfg);

/// u_s = int_s^{S} e^{-(rho+delta)(r-s)} q_r^{-beta} dr
///       + e^{-(rho+delta)(S-s)} q_S^{-beta} / (rho+delta),   S = s_max_extended,
/// reported on [0, s_max].
GridFunction optimal_control_infinite(const ModelParams& params, const GridFunction& q_extended,
                                      double s_max);

/// x z_0 + 1/2 int_0^infty e^{-rho s} z_s^2 ds, with q frozen at q_S beyond S.
double value_function_infinite(const ModelParams& params, const GridFunction& q_extended,
                               double x_mean);

/// For each finite horizon T, the weighted L1 distance
///   int_0^{s_ref} e^{-(rho+2 delta) s} |q^{(T)}_s - q^{(infty)}_s| ds
/// between the finite- and infinite-horizon equilibria (step 1/steps_per_unit).
/// The infinite-horizon reference is computed on [0, max(horizons)].
std::vector<double> finite_to_infinite_convergence_probe(const ModelParams& params, double x,
                                                         const std::vector<double>& horizons,
                                                         double s_ref, std::size_t steps_per_unit,
                                                         const SolverConfig& cfg);

}  // namespace mfgcap
