#include "mfgcap/kernels.hpp"

#include <cmath>

namespace mfgcap {

GridFunction cumulative_backward_kernel(const GridFunction& f, double c) {
    const std::size_t n = f.grid().n_steps();
    const double h = f.grid().step();
    const double decay = std::exp(-c * h);
    std::vector<double> g(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        g[k] = decay * g[k + 1] + 0.5 * h * (f[k] + decay * f[k + 1]);
    }
    return GridFunction(f.grid(), std::move(g));
}

GridFunction cumulative_forward_kernel(const GridFunction& f, double c) {
    const std::size_t n = f.grid().n_steps();
    const double h = f.grid().step();
    const double decay = std::exp(-c * h);
    std::vector<double> g(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        g[k] = decay * g[k - 1] + 0.5 * h * (decay * f[k - 1] + f[k]);
    }
    return GridFunction(f.grid(), std::move(g));
}

double forward_kernel_at(const GridFunction& f, double c, double s) {
    const TimeGrid& grid = f.grid();
    if (!(s >= 0.0 && s <= grid.t_end() * (1.0 + 1e-12)))
        throw DomainError("forward_kernel_at: time outside grid");
    const double h = grid.step();
    const double decay = std::exp(-c * h);
    double g = 0.0;
    std::size_t k = 0;
    while (k < grid.n_steps() && grid.at(k + 1) <= s) {
        g = decay * g + 0.5 * h * (decay * f[k] + f[k + 1]);
        ++k;
    }
    const double rest = s - grid.at(k);
    if (rest > 0.0 && k < grid.n_steps()) {
        const double w = rest / h;
        const double f_s = (1.0 - w) * f[k] + w * f[k + 1];
        const double d = std::exp(-c * rest);
        g = d * g + 0.5 * rest * (d * f[k] + f_s);
    }
    return g;
}

double discounted_integral(const GridFunction& f, double c) {
    const TimeGrid& grid = f.grid();
    const std::size_t n = grid.n_steps();
    double acc = 0.5 * (f[0] + std::exp(-c * grid.t_end()) * f[n]);
    for (std::size_t k = 1; k < n; ++k) acc += std::exp(-c * grid.at(k)) * f[k];
    return acc * grid.step();
}

}  // namespace mfgcap
