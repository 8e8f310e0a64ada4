#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mfgcap/errors.hpp"

namespace mfgcap {

/// Economic and dynamic constants of the investment game.
///
/// rho   discount rate (1/time)
/// delta depreciation rate of production capacity (1/time)
/// beta  inverse demand elasticity, enters the price term q^{-beta}
/// sigma volatility of the multiplicative noise (1/sqrt(time)); zero gives
///       the deterministic dynamics
struct ModelParams {
    double rho = 0.03;
    double delta = 0.01;
    double beta = 2.0;
    double sigma = 0.0;

    /// Throws DomainError unless rho, delta, beta > 0 and sigma >= 0.
    void validate() const;

    /// rho + delta - delta*beta; strictly positive exactly when the
    /// infinite-horizon problem is well posed.
    [[nodiscard]] double horizon_margin() const { return rho + delta - delta * beta; }

    [[nodiscard]] bool admits_infinite_horizon() const { return horizon_margin() > 0.0; }

    /// validate() plus the infinite-horizon condition beta < 1 + rho/delta
    /// (HorizonError otherwise).
    void require_infinite_horizon() const;
};

/// Uniform grid s_k = k*h on [0, t_end], k = 0..n_steps.
class TimeGrid {
public:
    TimeGrid(double t_end, std::size_t n_steps);

    [[nodiscard]] double t_end() const { return t_end_; }
    [[nodiscard]] std::size_t n_steps() const { return n_steps_; }
    [[nodiscard]] std::size_t size() const { return n_steps_ + 1; }
    [[nodiscard]] double step() const { return t_end_ / static_cast<double>(n_steps_); }
    [[nodiscard]] double at(std::size_t k) const;

    /// Index of the grid point closest to s; s must lie in [0, t_end].
    [[nodiscard]] std::size_t nearest_index(double s) const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t_end_;
    std::size_t n_steps_;
};

/// Real function sampled on a TimeGrid. Values are finite by construction.
class GridFunction {
public:
    GridFunction(TimeGrid grid, std::vector<double> values);
    explicit GridFunction(TimeGrid grid, double fill = 0.0);

    [[nodiscard]] const TimeGrid& grid() const { return grid_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const { return values_[k]; }
    [[nodiscard]] double front() const { return values_.front(); }
    [[nodiscard]] double back() const { return values_.back(); }

    /// Piecewise-linear evaluation at s in [0, t_end].
    [[nodiscard]] double interpolate(double s) const;

    /// Restriction to the first n_steps+1 points (same step).
    [[nodiscard]] GridFunction head(std::size_t n_steps) const;

    [[nodiscard]] double sup_abs() const;

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

/// sup_k |a_k - b_k|; grids must agree.
double sup_distance(const GridFunction& a, const GridFunction& b);

/// Law of the initial capacity xi. Only its mean enters the equilibrium;
/// the full law is needed for Monte Carlo sampling.
class InitialDistribution {
public:
    struct PointMass {
        double x;
    };
    /// log xi ~ N(log(mean) - v^2/2, v^2), so E[xi] = mean.
    struct LogNormal {
        double mean;
        double log_vol;
    };
    struct Uniform {
        double a;
        double b;
    };
    using Kind = std::variant<PointMass, LogNormal, Uniform>;

    static InitialDistribution point_mass(double x);
    static InitialDistribution log_normal(double mean, double log_vol);
    static InitialDistribution uniform(double a, double b);

    [[nodiscard]] const Kind& kind() const { return kind_; }
    [[nodiscard]] double mean() const { return mean_; }
    [[nodiscard]] double variance() const;

    /// Maps two independent uniforms in (0,1) and a standard normal to a
    /// draw of xi. Used by the path simulator.
    [[nodiscard]] double draw(double uniform01, double standard_normal) const;

    [[nodiscard]] std::string describe() const;

private:
    explicit InitialDistribution(Kind kind);
    Kind kind_;
    double mean_;
};

struct SolverConfig {
    double tol_fixed_point = 1e-10;  // sup-norm on q, scaled by (1 + sup q)
    int max_iterations = 1000;
    double damping = 0.5;            // Picard relaxation theta in (0, 1]
    double tol_shoot_zeta = 1e-13;   // relative bracket width for the slope bisection
    double tol_steady = 1e-3;        // |q(s_max_extended) - y_inf|
    double horizon_extension = 100.0;
    double corridor_eps = 1e-6;
    int max_bisections = 200;
    std::uint64_t rng_seed = 20240601;

    void validate() const;
};

struct FiniteHorizon {
    double t_end;
};
struct InfiniteHorizon {
    double s_max;
    double s_max_extended;
};
using HorizonMode = std::variant<FiniteHorizon, InfiniteHorizon>;

/// Equilibrium average capacity, investment rate and value at E[xi].
struct EquilibriumSolution {
    GridFunction q_hat;
    GridFunction u_hat;
    GridFunction z;  // e^{delta s} q_hat
    double value_at_mean = 0.0;
    double residual_sup = 0.0;
    int iterations_or_bisections = 0;
    HorizonMode horizon_mode;
};

/// z_s = e^{delta s} y_s pointwise.
GridFunction to_z_space(const GridFunction& y, double delta);

/// Long-run equilibrium capacity y_inf = (delta (rho + delta))^{-1/(1+beta)},
/// the positive root of (rho+delta) delta y = y^{-beta}.
double steady_state(const ModelParams& params);

/// (rho+delta) delta y - y^{-beta}.
double steady_state_residual(const ModelParams& params, double y);

}  // namespace mfgcap
