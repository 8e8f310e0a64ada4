#include "mfgcap/deterministic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfgcap/equilibrium_finite.hpp"
#include "mfgcap/equilibrium_infinite.hpp"
#include "mfgcap/kernels.hpp"

namespace mfgcap {

namespace {

double table_mass(const std::vector<double>& x, const std::vector<double>& p) {
    double acc = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) acc += 0.5 * (x[k] - x[k - 1]) * (p[k] + p[k - 1]);
    return acc;
}

// Exact first (and second) moments of the piecewise linear interpolant.
double table_moment(const std::vector<double>& x, const std::vector<double>& p, int order) {
    double acc = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) {
        const double a = x[k - 1], b = x[k], pa = p[k - 1], pb = p[k];
        const double d = b - a;
        if (order == 1) {
            acc += d / 6.0 * (a * (2.0 * pa + pb) + b * (pa + 2.0 * pb));
        } else {
            acc += d / 12.0 *
                   (pa * (3.0 * a * a + 2.0 * a * b + b * b) + pb * (a * a + 2.0 * a * b + 3.0 * b * b));
        }
    }
    return acc;
}

void check_increasing(const std::vector<double>& x, const char* what) {
    if (x.size() < 2) throw DomainError(std::string(what) + " needs at least 2 points");
    for (std::size_t k = 1; k < x.size(); ++k) {
        if (!(x[k] > x[k - 1]))
            throw DomainError(std::string(what) + " must be strictly increasing (index " +
                              std::to_string(k) + ")");
    }
}

}  // namespace

InitialDensity::InitialDensity(Kind kind) : kind_(std::move(kind)), first_moment_(0.0) {
    if (const auto* ln = std::get_if<LogNormal>(&kind_)) {
        first_moment_ = ln->mean;
    } else if (const auto* un = std::get_if<Uniform>(&kind_)) {
        first_moment_ = 0.5 * (un->a + un->b);
    } else {
        const auto& t = std::get<Tabulated>(kind_);
        first_moment_ = table_moment(t.x, t.p, 1);
    }
}

InitialDensity InitialDensity::log_normal(double mean, double log_vol) {
    if (!(std::isfinite(mean) && mean > 0.0)) throw DomainError("log-normal mean must be positive");
    if (!(std::isfinite(log_vol) && log_vol > 0.0))
        throw DomainError("log-normal density needs a positive log-volatility");
    return InitialDensity(LogNormal{mean, log_vol});
}

InitialDensity InitialDensity::uniform(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > a))
        throw DomainError("uniform density needs 0 < a < b");
    return InitialDensity(Uniform{a, b});
}

InitialDensity InitialDensity::tabulated(std::vector<double> x, std::vector<double> p) {
    if (x.size() != p.size()) throw DomainError("tabulated density: x and p sizes differ");
    check_increasing(x, "tabulated density grid");
    if (!(x.front() >= 0.0)) throw DomainError("tabulated density must be supported in (0, inf)");
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!(std::isfinite(p[k]) && p[k] >= 0.0))
            throw DomainError("tabulated density values must be finite and nonnegative");
    }
    if (x.front() == 0.0 && p.front() != 0.0)
        throw DomainError("tabulated density must vanish at x = 0");
    const double mass = table_mass(x, p);
    if (std::abs(mass - 1.0) > 1e-6)
        throw DomainError("tabulated density integrates to " + std::to_string(mass) + ", not 1");
    return InitialDensity(Tabulated{std::move(x), std::move(p)});
}

double InitialDensity::pdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    if (const auto* ln = std::get_if<LogNormal>(&kind_)) {
        const double v = ln->log_vol;
        const double mu = std::log(ln->mean) - 0.5 * v * v;
        const double z = (std::log(x) - mu) / v;
        return std::exp(-0.5 * z * z) / (x * v * std::sqrt(2.0 * std::numbers::pi));
    }
    if (const auto* un = std::get_if<Uniform>(&kind_)) {
        return (x >= un->a && x <= un->b) ? 1.0 / (un->b - un->a) : 0.0;
    }
    const auto& t = std::get<Tabulated>(kind_);
    if (x < t.x.front() || x > t.x.back()) return 0.0;
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    if (it == t.x.end()) return t.p.back();
    const auto k = static_cast<std::size_t>(it - t.x.begin());
    const double w = (x - t.x[k - 1]) / (t.x[k] - t.x[k - 1]);
    return (1.0 - w) * t.p[k - 1] + w * t.p[k];
}

double InitialDensity::std_dev() const {
    if (const auto* ln = std::get_if<LogNormal>(&kind_))
        return ln->mean * std::sqrt(std::expm1(ln->log_vol * ln->log_vol));
    if (const auto* un = std::get_if<Uniform>(&kind_)) return (un->b - un->a) / std::sqrt(12.0);
    const auto& t = std::get<Tabulated>(kind_);
    const double m = first_moment_;
    return std::sqrt(std::max(0.0, table_moment(t.x, t.p, 2) - m * m));
}

double DensitySnapshot::mass() const { return table_mass(x_grid, values); }

double DensitySnapshot::first_moment() const {
    double acc = 0.0;
    for (std::size_t k = 1; k < x_grid.size(); ++k)
        acc += 0.5 * (x_grid[k] - x_grid[k - 1]) * (x_grid[k] * values[k] + x_grid[k - 1] * values[k - 1]);
    return acc;
}

DensitySnapshot pushforward_density(const ModelParams& params, const InitialDensity& m0,
                                    const GridFunction& u, double s, const std::vector<double>& x_grid) {
    params.validate();
    check_increasing(x_grid, "x_grid");
    for (std::size_t k = 0; k < u.size(); ++k)
        if (u[k] < 0.0) throw DomainError("investment rate must be nonnegative");
    const double growth = std::exp(params.delta * s);
    const double drift = growth * forward_kernel_at(u, params.delta, s);
    DensitySnapshot snap{x_grid, std::vector<double>(x_grid.size()), s};
    for (std::size_t k = 0; k < x_grid.size(); ++k)
        snap.values[k] = growth * m0.pdf(growth * x_grid[k] - drift);
    return snap;
}

double density_mean(const ModelParams& params, const InitialDensity& m0, const GridFunction& u,
                    double s) {
    return std::exp(-params.delta * s) * m0.first_moment() + forward_kernel_at(u, params.delta, s);
}

std::vector<double> default_x_grid(const ModelParams& params, const InitialDensity& m0,
                                   const GridFunction& u, double s, std::size_t n) {
    if (n < 2) throw DomainError("x grid needs at least 2 points");
    const double top = 5.0 * density_mean(params, m0, u, s);
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = top * static_cast<double>(k + 1) / static_cast<double>(n);
    return x;
}

GridFunction individual_trajectory(const ModelParams& params, const GridFunction& u, double x) {
    if (!(x > 0.0)) throw DomainError("initial capacity must be positive");
    const GridFunction drift = cumulative_forward_kernel(u, params.delta);
    std::vector<double> out(u.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = std::exp(-params.delta * u.grid().at(k)) * x + drift[k];
    out[0] = x;
    return GridFunction(u.grid(), std::move(out));
}

EquilibriumSolution solve_deterministic_equilibrium(const ModelParams& params,
                                                    const InitialDensity& m0, const TimeGrid& grid,
                                                    const SolverConfig& cfg, HorizonKind horizon) {
    const auto init = InitialDistribution::point_mass(m0.first_moment());
    if (horizon == HorizonKind::Infinite) return shoot_equilibrium_infinite(params, init, grid, cfg).first;
    return solve_equilibrium_finite(params, init, grid, cfg).first;
}

}  // namespace mfgcap
