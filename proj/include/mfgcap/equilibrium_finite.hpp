#pragma once

#include <utility>
#include <vector>

#include "mfgcap/bounds.hpp"
#include "mfgcap/model.hpp"

namespace mfgcap {

struct FixedPointReport {
    int iterations = 0;
    std::vector<double> residual_history;  // scaled sup-norm |Phi(q) - q| / (1 + sup q)
    bool converged = false;
    int clamp_events = 0;      // iterations on which some value was projected into the band
    bool clamped_last = false;
    double final_damping = 0.0;
};

/// Thrown when the damped Picard iteration exhausts its budget.
class FixedPointError : public ConvergenceError {
public:
    FixedPointError(const std::string& what, FixedPointReport report)
        : ConvergenceError(what), report_(std::move(report)) {}
    [[nodiscard]] const FixedPointReport& report() const { return report_; }

private:
    FixedPointReport report_;
};

/// Finite-horizon best response to a capacity path q:
///   u_s = int_s^T e^{-(rho+delta)(r-s)} q_r^{-beta} dr,  u_T = 0.
GridFunction optimal_control_finite(const ModelParams& params, const GridFunction& q);

/// Mean of the capacity controlled optimally against q:
///   Phi(q)_s = e^{-delta s} x + int_0^s e^{-delta(s-r)} u^{(q)}_r dr.
/// Fixed points of Phi are the equilibrium average capacities.
GridFunction phi_apply(const ModelParams& params, double x, const GridFunction& q);

/// x z_0 + 1/2 int_0^T e^{-rho s} z_s^2 ds with z the best response to q.
double value_function_finite(const ModelParams& params, const GridFunction& q, double x_mean);

/// sup_k |q_k - Phi(q)_k|.
double residual_integral_equation(const ModelParams& params, double x, const GridFunction& q);

/// Where the Picard iteration starts inside the a priori band.
enum class PicardStart { Lower, Upper };

/// Damped, band-projected Picard iteration q <- (1-theta) q + theta Phi(q).
std::pair<EquilibriumSolution, FixedPointReport> solve_equilibrium_finite(
    const ModelParams& params, const InitialDistribution& init, const TimeGrid& grid,
    const SolverConfig& cfg, PicardStart start = PicardStart::Lower);

}  // namespace mfgcap
