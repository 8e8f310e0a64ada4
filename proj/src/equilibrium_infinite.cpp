#include "mfgcap/equilibrium_infinite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfgcap/equilibrium_finite.hpp"
#include "mfgcap/kernels.hpp"

namespace mfgcap {

const char* to_string(ShootClass c) {
    switch (c) {
        case ShootClass::TooHigh:
            return "TooHigh";
        case ShootClass::TooLow:
            return "TooLow";
        case ShootClass::Accepted:
            return "Accepted";
    }
    return "?";
}

namespace {

struct Corridor {
    double upper;
    double lower;
    int direction;  // +1 rising toward y_inf, -1 falling, 0 already there
};

Corridor make_corridor(double x, double y_inf, double eps) {
    int dir = 0;
    if (std::abs(x - y_inf) > 1e-12 * y_inf) dir = x < y_inf ? 1 : -1;
    return {std::max(x, y_inf) * (1.0 + eps), std::min(x, y_inf) * (1.0 - eps), dir};
}

// Returns TooHigh/TooLow on exit, Accepted otherwise.
ShootClass classify_point(const Corridor& c, double y, double dy) {
    if (!(y > 0.0) || !std::isfinite(y)) return ShootClass::TooLow;
    if (y > c.upper) return ShootClass::TooHigh;
    if (y < c.lower) return ShootClass::TooLow;
    if (c.direction > 0 && dy < 0.0) return ShootClass::TooLow;
    if (c.direction < 0 && dy > 0.0) return ShootClass::TooHigh;
    return ShootClass::Accepted;
}

ShootOutcome integrate_steps(const ModelParams& p, double x, double zeta, double h,
                             std::size_t steps, const Corridor& corridor) {
    const double a1 = p.rho;
    const double a0 = (p.rho + p.delta) * p.delta;
    const double beta = p.beta;
    bool hit_zero = false;
    auto accel = [&](double y, double dy) {
        if (!(y > 0.0)) {
            hit_zero = true;
            return 0.0;
        }
        return a1 * dy + a0 * y - std::pow(y, -beta);
    };

    ShootOutcome out;
    out.step = h;
    out.trajectory.reserve(steps + 1);
    out.slope.reserve(steps + 1);
    double y = x;
    double dy = zeta - p.delta * x;
    out.trajectory.push_back(y);
    out.slope.push_back(dy);

    if (const ShootClass c0 = classify_point(corridor, y, dy); c0 != ShootClass::Accepted) {
        out.classification = c0;
        out.exit_time = 0.0;
        return out;
    }
    for (std::size_t k = 0; k < steps; ++k) {
        const double k1y = dy;
        const double k1v = accel(y, dy);
        const double k2y = dy + 0.5 * h * k1v;
        const double k2v = accel(y + 0.5 * h * k1y, k2y);
        const double k3y = dy + 0.5 * h * k2v;
        const double k3v = accel(y + 0.5 * h * k2y, k3y);
        const double k4y = dy + h * k3v;
        const double k4v = accel(y + h * k3y, k4y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dy += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        out.trajectory.push_back(y);
        out.slope.push_back(dy);
        const ShootClass c = hit_zero ? ShootClass::TooLow : classify_point(corridor, y, dy);
        if (c != ShootClass::Accepted) {
            out.classification = c;
            out.exit_time = static_cast<double>(k + 1) * h;
            return out;
        }
    }
    out.classification = ShootClass::Accepted;
    return out;
}

struct Segment {
    double zeta = 0.0;
    ShootOutcome best;
    int bisections = 0;
    std::vector<std::pair<double, double>> brackets;
};

// Bisection on the initial slope z'(0) for a start at y0 with `steps` steps.
Segment shoot_segment(const ModelParams& p, double y0, double y_inf, double h, std::size_t steps,
                      const SolverConfig& cfg) {
    const Corridor corridor = make_corridor(y0, y_inf, cfg.corridor_eps);
    Segment seg;

    if (corridor.direction == 0) {
        // Start on the steady state: the slope delta y0 keeps y'' = 0.
        ShootOutcome flat = integrate_steps(p, y0, p.delta * y0, h, steps, corridor);
        if (flat.classification == ShootClass::Accepted) {
            seg.zeta = p.delta * y0;
            seg.best = std::move(flat);
            return seg;
        }
    }

    const double k_bound = std::pow(y0, -p.beta) / p.horizon_margin();
    double hi = k_bound;
    double lo = k_bound * 1e-12;
    ShootOutcome hi_out = integrate_steps(p, y0, hi, h, steps, corridor);
    ShootOutcome lo_out = integrate_steps(p, y0, lo, h, steps, corridor);
    if (hi_out.classification == ShootClass::Accepted) {
        seg.zeta = hi;
        seg.best = std::move(hi_out);
        return seg;
    }
    if (lo_out.classification == ShootClass::Accepted) {
        seg.zeta = lo;
        seg.best = std::move(lo_out);
        return seg;
    }
    if (hi_out.classification != ShootClass::TooHigh || lo_out.classification != ShootClass::TooLow) {
        throw ShootingError(std::string("slope bracket failure at y0=") + sci(y0) +
                            ": zeta=" + sci(lo) + " -> " + to_string(lo_out.classification) +
                            ", zeta=" + sci(hi) + " -> " + to_string(hi_out.classification));
    }
    seg.brackets.emplace_back(lo, hi);

    while (seg.bisections < cfg.max_bisections) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        ShootOutcome out = integrate_steps(p, y0, mid, h, steps, corridor);
        ++seg.bisections;
        if (out.classification == ShootClass::Accepted) {
            seg.zeta = mid;
            seg.best = std::move(out);
            return seg;
        }
        if (out.classification == ShootClass::TooHigh) {
            hi = mid;
            hi_out = std::move(out);
        } else {
            lo = mid;
            lo_out = std::move(out);
        }
        seg.brackets.emplace_back(lo, hi);
        if (hi - lo <= cfg.tol_shoot_zeta * hi) break;
    }

    // Neither endpoint survives the whole window: keep the one that tracks
    // the separatrix longest.
    if (*hi_out.exit_time >= *lo_out.exit_time) {
        seg.zeta = hi;
        seg.best = std::move(hi_out);
    } else {
        seg.zeta = lo;
        seg.best = std::move(lo_out);
    }
    return seg;
}

}  // namespace

ShootOutcome integrate_ivp(const ModelParams& params, double x, double zeta, const TimeGrid& grid,
                           double corridor_eps) {
    params.require_infinite_horizon();
    if (!(x > 0.0)) throw DomainError("initial capacity must be positive");
    if (!(zeta > 0.0)) throw DomainError("initial slope zeta must be positive");
    const Corridor corridor = make_corridor(x, steady_state(params), corridor_eps);
    return integrate_steps(params, x, zeta, grid.step(), grid.n_steps(), corridor);
}

namespace {

// Best response on the whole extended grid, with q frozen at q_S beyond S.
GridFunction control_with_tail(const ModelParams& params, const GridFunction& q_extended) {
    const TimeGrid& ext = q_extended.grid();
    const GridFunction inside = optimal_control_finite(params, q_extended);
    const double c = params.rho + params.delta;
    const double tail = std::pow(q_extended.back(), -params.beta) / c;
    std::vector<double> u(inside.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        u[k] = inside[k] + std::exp(-c * (ext.t_end() - ext.at(k))) * tail;
    return GridFunction(ext, std::move(u));
}

GridFunction phi_infinite(const ModelParams& params, double x, const GridFunction& q_extended) {
    const GridFunction u = control_with_tail(params, q_extended);
    const GridFunction drift = cumulative_forward_kernel(u, params.delta);
    std::vector<double> m(u.size());
    for (std::size_t k = 0; k < m.size(); ++k)
        m[k] = std::exp(-params.delta * u.grid().at(k)) * x + drift[k];
    m[0] = x;
    return GridFunction(u.grid(), std::move(m));
}

// The RK4 trajectory solves the ODE to O(h^4) but is only an O(h^2) fixed
// point of the trapezoid operator. A few damped Picard sweeps, started from
// the shooting result, land on the discrete fixed point.
int polish(const ModelParams& params, double x, std::vector<double>& y, const TimeGrid& ext,
           const SolverConfig& cfg) {
    double theta = cfg.damping;
    double last = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const GridFunction current(ext, y);
        const GridFunction image = phi_infinite(params, x, current);
        const double scaled = sup_distance(current, image) / (1.0 + current.sup_abs());
        if (scaled < cfg.tol_fixed_point) return it;
        if (scaled > last) theta = std::max(0.5 * theta, 1.0 / 1024.0);
        last = scaled;
        for (std::size_t k = 0; k < y.size(); ++k) y[k] = (1.0 - theta) * y[k] + theta * image[k];
    }
    throw ConvergenceError("fixed-point refinement of the shooting trajectory did not reach tol " +
                           sci(cfg.tol_fixed_point) + " in " +
                           std::to_string(cfg.max_iterations) + " iterations (last scaled residual " +
                           sci(last) + ")");
}

}  // namespace

GridFunction optimal_control_infinite(const ModelParams& params, const GridFunction& q_extended,
                                      double s_max) {
    const TimeGrid& ext = q_extended.grid();
    if (!(s_max > 0.0) || s_max >= ext.t_end())
        throw ConfigError("extended horizon must be longer than the display window");
    return control_with_tail(params, q_extended).head(ext.nearest_index(s_max));
}

double value_function_infinite(const ModelParams& params, const GridFunction& q_extended,
                               double x_mean) {
    const TimeGrid& ext = q_extended.grid();
    const GridFunction z = control_with_tail(params, q_extended);
    std::vector<double> sq(z.size());
    for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = z[k] * z[k];
    const double head = discounted_integral(GridFunction(ext, std::move(sq)), params.rho);
    const double tail = z.back() * z.back() * std::exp(-params.rho * ext.t_end()) / params.rho;
    return x_mean * z.front() + 0.5 * (head + tail);
}

std::pair<EquilibriumSolution, ShootReport> shoot_equilibrium_infinite(
    const ModelParams& params, const InitialDistribution& init, const TimeGrid& display_grid,
    const SolverConfig& cfg) {
    params.require_infinite_horizon();
    cfg.validate();
    const double x = init.mean();
    const double y_inf = steady_state(params);
    const double h = display_grid.step();
    const std::size_t n_disp = display_grid.n_steps();
    const auto n_extra = static_cast<std::size_t>(std::ceil(cfg.horizon_extension / h - 1e-9));
    const std::size_t n_ext = n_disp + std::max<std::size_t>(n_extra, 1);
    const TimeGrid ext_grid(static_cast<double>(n_ext) * h, n_ext);

    std::vector<double> y(n_ext + 1, 0.0);
    std::size_t k0 = 0;
    double y0 = x;
    int bisections = 0;
    int segments = 0;
    double zeta_star = 0.0;
    std::vector<std::pair<double, double>> first_brackets;
    constexpr int kMaxSegments = 256;

    while (true) {
        if (++segments > kMaxSegments)
            throw ShootingError("shooting did not reach the extended horizon after " +
                                std::to_string(kMaxSegments) + " re-anchored segments");
        const std::size_t steps = n_ext - k0;
        Segment seg = shoot_segment(params, y0, y_inf, h, steps, cfg);
        bisections += seg.bisections;
        if (segments == 1) {
            zeta_star = seg.zeta;
            first_brackets = std::move(seg.brackets);
        }
        const ShootOutcome& best = seg.best;
        if (best.classification == ShootClass::Accepted) {
            std::copy(best.trajectory.begin(), best.trajectory.end(),
                      y.begin() + static_cast<std::ptrdiff_t>(k0));
            break;
        }
        // Keep the first half of the tracked stretch and shoot again from there.
        const std::size_t exit_steps = best.trajectory.size() - 1;
        const std::size_t keep = std::max<std::size_t>(exit_steps / 2, 1);
        if (exit_steps < 2)
            throw ShootingError("trajectory leaves the admissible corridor immediately at s=" +
                                sci(static_cast<double>(k0) * h));
        std::copy(best.trajectory.begin(), best.trajectory.begin() + static_cast<std::ptrdiff_t>(keep + 1),
                  y.begin() + static_cast<std::ptrdiff_t>(k0));
        k0 += keep;
        y0 = y[k0];
    }

    const double gap = std::abs(y.back() - y_inf);
    if (gap >= cfg.tol_steady) {
        throw ShootingError("terminal gap |q(S) - y_inf| = " + sci(gap) +
                            " exceeds tol_steady = " + sci(cfg.tol_steady));
    }
    const int polish_iterations = polish(params, x, y, ext_grid, cfg);
    GridFunction q_ext(ext_grid, std::move(y));

    GridFunction q_hat = q_ext.head(n_disp);
    GridFunction u_hat = optimal_control_infinite(params, q_ext, display_grid.t_end());
    const double residual = sup_distance(q_hat, phi_infinite(params, x, q_ext).head(n_disp));

    EquilibriumSolution sol{q_hat,
                            u_hat,
                            to_z_space(q_hat, params.delta),
                            value_function_infinite(params, q_ext, x),
                            residual,
                            bisections,
                            InfiniteHorizon{display_grid.t_end(), ext_grid.t_end()}};
    ShootReport report{zeta_star,       std::move(first_brackets), bisections, segments, gap,
                       polish_iterations, q_ext};
    return {std::move(sol), std::move(report)};
}

std::vector<double> finite_to_infinite_convergence_probe(const ModelParams& params, double x,
                                                         const std::vector<double>& horizons,
                                                         double s_ref, std::size_t steps_per_unit,
                                                         const SolverConfig& cfg) {
    params.require_infinite_horizon();
    if (steps_per_unit < 1) throw ConfigError("steps_per_unit must be positive");
    for (double horizon : horizons)
        if (!(horizon > s_ref)) throw ConfigError("probe horizons must exceed s_ref");
    const auto init = InitialDistribution::point_mass(x);
    const auto n_ref = static_cast<std::size_t>(std::llround(s_ref * static_cast<double>(steps_per_unit)));
    const TimeGrid ref_grid(s_ref, n_ref);
    // The reference is shot over the longest horizon probed (the stable mode
    // needs that long to settle), then compared on [0, s_ref] only.
    double s_long = s_ref;
    for (double horizon : horizons) s_long = std::max(s_long, horizon);
    // Linearized decay |x - y_inf| e^{lambda S} tells how long it takes to
    // get within tol_steady; the 1.2 covers the nonlinear start.
    const double y_inf = steady_state(params);
    const double c = params.rho + params.delta;
    const double lambda = 0.5 * (params.rho - std::sqrt(params.rho * params.rho +
                                                        4.0 * (1.0 + params.beta) * params.delta * c));
    const double gap0 = std::abs(x - y_inf);
    if (gap0 > cfg.tol_steady) {
        const double settle = 1.2 * std::log(gap0 / cfg.tol_steady) / -lambda;
        s_long = std::max(s_long, std::ceil(settle - cfg.horizon_extension));
    }
    const auto n_long = static_cast<std::size_t>(std::llround(s_long * static_cast<double>(steps_per_unit)));
    const auto [inf_sol, inf_report] =
        shoot_equilibrium_infinite(params, init, TimeGrid(s_long, n_long), cfg);
    const double weight_rate = params.rho + 2.0 * params.delta;

    std::vector<double> out;
    out.reserve(horizons.size());
    for (double horizon : horizons) {
        const auto n = static_cast<std::size_t>(std::llround(horizon * static_cast<double>(steps_per_unit)));
        const auto [fin, fin_report] = solve_equilibrium_finite(params, init, TimeGrid(horizon, n), cfg);
        std::vector<double> diff(n_ref + 1);
        for (std::size_t k = 0; k <= n_ref; ++k) diff[k] = std::abs(fin.q_hat[k] - inf_sol.q_hat[k]);
        out.push_back(discounted_integral(GridFunction(ref_grid, std::move(diff)), weight_rate));
    }
    return out;
}

}  // namespace mfgcap
