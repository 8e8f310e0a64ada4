#pragma once

#include <variant>
#include <vector>

#include "mfgcap/model.hpp"

namespace mfgcap {

/// Density m0 of the initial capacity law, supported in (0, inf).
class InitialDensity {
public:
    struct LogNormal {
        double mean;
        double log_vol;
    };
    struct Uniform {
        double a;
        double b;
    };
    /// Piecewise linear through (x_k, p_k), zero outside [x_0, x_last].
    struct Tabulated {
        std::vector<double> x;
        std::vector<double> p;
    };
    using Kind = std::variant<LogNormal, Uniform, Tabulated>;

    static InitialDensity log_normal(double mean, double log_vol);
    static InitialDensity uniform(double a, double b);
    /// Rejects tables whose trapezoid mass is off 1 by more than 1e-6.
    static InitialDensity tabulated(std::vector<double> x, std::vector<double> p);

    [[nodiscard]] const Kind& kind() const { return kind_; }
    [[nodiscard]] double pdf(double x) const;
    [[nodiscard]] double first_moment() const { return first_moment_; }
    /// Standard deviation of the law (exact for every kind).
    [[nodiscard]] double std_dev() const;

private:
    explicit InitialDensity(Kind kind);
    Kind kind_;
    double first_moment_;
};

struct DensitySnapshot {
    std::vector<double> x_grid;
    std::vector<double> values;
    double time = 0.0;

    /// Trapezoid integral of the density over x_grid.
    [[nodiscard]] double mass() const;
    /// Trapezoid integral of x p(x).
    [[nodiscard]] double first_moment() const;
};

/// p(s, x) = e^{delta s} m0(e^{delta s} x - D_s), D_s = int_0^s e^{delta r} u_r dr,
/// the explicit solution of the continuity equation driven by u.
DensitySnapshot pushforward_density(const ModelParams& params, const InitialDensity& m0,
                                    const GridFunction& u, double s, const std::vector<double>& x_grid);

/// n points evenly spaced on (0, 5 * density_mean(params, m0, u, s)].
std::vector<double> default_x_grid(const ModelParams& params, const InitialDensity& m0,
                                   const GridFunction& u, double s, std::size_t n = 2001);

/// e^{-delta s} first_moment(m0) + int_0^s e^{-delta(s-r)} u_r dr.
double density_mean(const ModelParams& params, const InitialDensity& m0, const GridFunction& u,
                    double s);

/// Capacity of a single agent starting at x: e^{-delta s} x + int_0^s e^{-delta(s-r)} u_r dr.
GridFunction individual_trajectory(const ModelParams& params, const GridFunction& u, double x);

enum class HorizonKind { Finite, Infinite };

/// The deterministic game has the same equilibrium as the stochastic one
/// with E[xi] equal to the first moment of m0; this delegates accordingly.
/// For HorizonKind::Infinite, `grid` is the display window [0, s_max].
EquilibriumSolution solve_deterministic_equilibrium(const ModelParams& params,
                                                    const InitialDensity& m0, const TimeGrid& grid,
                                                    const SolverConfig& cfg,
                                                    HorizonKind horizon = HorizonKind::Finite);

}  // namespace mfgcap
