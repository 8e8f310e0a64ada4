#include "mfgcap/equilibrium_finite.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfgcap/kernels.hpp"

namespace mfgcap {

namespace {

GridFunction price_term(const ModelParams& params, const GridFunction& q) {
    std::vector<double> p(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (!(q[k] > 0.0))
            throw DomainError("capacity path must be positive, got " + sci(q[k]) +
                              " at index " + std::to_string(k));
        p[k] = std::pow(q[k], -params.beta);
    }
    return GridFunction(q.grid(), std::move(p));
}

GridFunction mean_state(const ModelParams& params, double x, const GridFunction& u) {
    const GridFunction drift = cumulative_forward_kernel(u, params.delta);
    std::vector<double> m(u.size());
    for (std::size_t k = 0; k < m.size(); ++k)
        m[k] = std::exp(-params.delta * u.grid().at(k)) * x + drift[k];
    m[0] = x;
    return GridFunction(u.grid(), std::move(m));
}

}  // namespace

GridFunction optimal_control_finite(const ModelParams& params, const GridFunction& q) {
    return cumulative_backward_kernel(price_term(params, q), params.rho + params.delta);
}

GridFunction phi_apply(const ModelParams& params, double x, const GridFunction& q) {
    if (!(x > 0.0)) throw DomainError("initial mean capacity must be positive");
    return mean_state(params, x, optimal_control_finite(params, q));
}

double value_function_finite(const ModelParams& params, const GridFunction& q, double x_mean) {
    const GridFunction z = optimal_control_finite(params, q);
    std::vector<double> sq(z.size());
    for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = z[k] * z[k];
    return x_mean * z[0] + 0.5 * discounted_integral(GridFunction(z.grid(), std::move(sq)), params.rho);
}

double residual_integral_equation(const ModelParams& params, double x, const GridFunction& q) {
    return sup_distance(q, phi_apply(params, x, q));
}

std::pair<EquilibriumSolution, FixedPointReport> solve_equilibrium_finite(
    const ModelParams& params, const InitialDistribution& init, const TimeGrid& grid,
    const SolverConfig& cfg, PicardStart start) {
    params.validate();
    cfg.validate();
    const double x = init.mean();
    const AprioriBounds band = apriori_bounds_finite(params, x, grid);
    const auto lo = band.y_lower.values();
    const auto hi = band.y_upper.values();

    std::vector<double> q(start == PicardStart::Lower ? lo.begin() : hi.begin(),
                          start == PicardStart::Lower ? lo.end() : hi.end());
    FixedPointReport report;
    double theta = cfg.damping;
    double residual = 0.0;

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const GridFunction current(grid, q);
        const GridFunction image = phi_apply(params, x, current);
        residual = sup_distance(current, image);
        const double scaled = residual / (1.0 + current.sup_abs());
        // An increase means the relaxed map is not contracting at this theta.
        if (!report.residual_history.empty() && scaled > report.residual_history.back())
            theta = std::max(0.5 * theta, 1.0 / 1024.0);
        report.residual_history.push_back(scaled);
        report.iterations = it;
        if (scaled < cfg.tol_fixed_point) {
            report.converged = true;
            break;
        }
        bool clamped = false;
        for (std::size_t k = 0; k < q.size(); ++k) {
            const double next = (1.0 - theta) * q[k] + theta * image[k];
            const double projected = std::clamp(next, lo[k], hi[k]);
            clamped = clamped || projected != next;
            q[k] = projected;
        }
        report.clamp_events += clamped ? 1 : 0;
        report.clamped_last = clamped;
    }
    report.final_damping = theta;

    if (!report.converged) {
        throw FixedPointError("fixed-point iteration did not converge after " +
                                  std::to_string(report.iterations) +
                                  " iterations (last scaled residual " +
                                  sci(report.residual_history.back()) + ")",
                              report);
    }

    GridFunction q_hat(grid, std::move(q));
    GridFunction u_hat = optimal_control_finite(params, q_hat);
    EquilibriumSolution sol{q_hat,
                            u_hat,
                            to_z_space(q_hat, params.delta),
                            value_function_finite(params, q_hat, x),
                            residual,
                            report.iterations,
                            FiniteHorizon{grid.t_end()}};
    return {std::move(sol), std::move(report)};
}

}  // namespace mfgcap
