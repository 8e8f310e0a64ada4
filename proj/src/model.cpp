#include "mfgcap/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfgcap {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void ModelParams::validate() const {
    if (!(std::isfinite(rho) && rho > 0.0))
        throw DomainError("rho must be a finite positive number, got " + num(rho));
    if (!(std::isfinite(delta) && delta > 0.0))
        throw DomainError("delta must be a finite positive number, got " + num(delta));
    if (!(std::isfinite(beta) && beta > 0.0))
        throw DomainError("beta must be a finite positive number, got " + num(beta));
    if (!(std::isfinite(sigma) && sigma >= 0.0))
        throw DomainError("sigma must be finite and nonnegative, got " + num(sigma));
}

void ModelParams::require_infinite_horizon() const {
    validate();
    if (!admits_infinite_horizon()) {
        throw HorizonError("infinite horizon requires beta < 1 + rho/delta (beta=" + num(beta) +
                           ", 1 + rho/delta=" + num(1.0 + rho / delta) + ")");
    }
}

TimeGrid::TimeGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_steps_(n_steps) {
    if (!(std::isfinite(t_end) && t_end > 0.0))
        throw DomainError("time grid horizon must be finite and positive, got " + num(t_end));
    if (n_steps < 2) throw DomainError("time grid needs at least 2 steps");
}

double TimeGrid::at(std::size_t k) const {
    if (k == n_steps_) return t_end_;
    return static_cast<double>(k) * step();
}

std::size_t TimeGrid::nearest_index(double s) const {
    if (!(s >= 0.0 && s <= t_end_ * (1.0 + 1e-12)))
        throw DomainError("time " + num(s) + " outside grid [0, " + num(t_end_) + "]");
    const double k = std::round(s / step());
    return std::min(static_cast<std::size_t>(k), n_steps_);
}

GridFunction::GridFunction(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw DomainError("grid function has " + std::to_string(values_.size()) +
                          " values for a grid of " + std::to_string(grid_.size()) + " points");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k]))
            throw DomainError("non-finite grid value at index " + std::to_string(k));
    }
}

GridFunction::GridFunction(TimeGrid grid, double fill) : grid_(grid), values_(grid.size(), fill) {
    if (!std::isfinite(fill)) throw DomainError("non-finite fill value");
}

double GridFunction::interpolate(double s) const {
    const double h = grid_.step();
    if (!(s >= 0.0 && s <= grid_.t_end() * (1.0 + 1e-12)))
        throw DomainError("time " + num(s) + " outside grid");
    const double pos = s / h;
    auto k = static_cast<std::size_t>(pos);
    if (k >= grid_.n_steps()) return values_.back();
    const double w = pos - static_cast<double>(k);
    return (1.0 - w) * values_[k] + w * values_[k + 1];
}

GridFunction GridFunction::head(std::size_t n_steps) const {
    if (n_steps > grid_.n_steps()) throw DomainError("head longer than grid");
    TimeGrid g(static_cast<double>(n_steps) * grid_.step(), n_steps);
    return GridFunction(g, std::vector<double>(values_.begin(),
                                               values_.begin() + static_cast<std::ptrdiff_t>(n_steps + 1)));
}

double GridFunction::sup_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size()) throw DomainError("sup_distance: grid size mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

InitialDistribution::InitialDistribution(Kind kind) : kind_(kind), mean_(0.0) {
    mean_ = std::visit(
        [](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return k.x;
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return k.mean;
            } else {
                return 0.5 * (k.a + k.b);
            }
        },
        kind_);
}

InitialDistribution InitialDistribution::point_mass(double x) {
    if (!(std::isfinite(x) && x > 0.0))
        throw DomainError("initial capacity must be finite and positive, got " + num(x));
    return InitialDistribution(PointMass{x});
}

InitialDistribution InitialDistribution::log_normal(double mean, double log_vol) {
    if (!(std::isfinite(mean) && mean > 0.0))
        throw DomainError("log-normal mean must be finite and positive, got " + num(mean));
    if (!(std::isfinite(log_vol) && log_vol >= 0.0))
        throw DomainError("log-normal volatility must be finite and nonnegative");
    return InitialDistribution(LogNormal{mean, log_vol});
}

InitialDistribution InitialDistribution::uniform(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > a))
        throw DomainError("uniform initial law needs 0 < a < b, got a=" + num(a) + " b=" + num(b));
    return InitialDistribution(Uniform{a, b});
}

double InitialDistribution::variance() const {
    return std::visit(
        [](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return k.mean * k.mean * std::expm1(k.log_vol * k.log_vol);
            } else {
                return (k.b - k.a) * (k.b - k.a) / 12.0;
            }
        },
        kind_);
}

double InitialDistribution::draw(double uniform01, double standard_normal) const {
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return k.x;
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                const double mu = std::log(k.mean) - 0.5 * k.log_vol * k.log_vol;
                return std::exp(mu + k.log_vol * standard_normal);
            } else {
                return k.a + (k.b - k.a) * uniform01;
            }
        },
        kind_);
}

std::string InitialDistribution::describe() const {
    return std::visit(
        [](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return "point:" + num(k.x);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return "lognormal:" + num(k.mean) + "," + num(k.log_vol);
            } else {
                return "uniform:" + num(k.a) + "," + num(k.b);
            }
        },
        kind_);
}

void SolverConfig::validate() const {
    if (!(tol_fixed_point > 0.0)) throw ConfigError("tol_fixed_point must be positive");
    if (!(tol_shoot_zeta > 0.0)) throw ConfigError("tol_shoot_zeta must be positive");
    if (!(tol_steady > 0.0)) throw ConfigError("tol_steady must be positive");
    if (!(corridor_eps > 0.0)) throw ConfigError("corridor_eps must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
    if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
    if (max_bisections < 1) throw ConfigError("max_bisections must be at least 1");
    if (!(horizon_extension > 0.0)) throw ConfigError("horizon_extension must be positive");
}

GridFunction to_z_space(const GridFunction& y, double delta) {
    std::vector<double> z(y.size());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = std::exp(delta * y.grid().at(k)) * y[k];
    return GridFunction(y.grid(), std::move(z));
}

double steady_state(const ModelParams& params) {
    params.validate();
    const double cost = params.delta * (params.rho + params.delta);
    return std::pow(cost, -1.0 / (params.beta + 1.0));
}

double steady_state_residual(const ModelParams& params, double y) {
    return (params.rho + params.delta) * params.delta * y - std::pow(y, -params.beta);
}

}  // namespace mfgcap
