#include "mfgcap/bounds.hpp"

#include <cmath>

namespace mfgcap {

namespace {

// int_0^s e^{c r} r^k dr for c > 0 and k <= 3. For c s < 1 the closed form
// suffers cancellation, so the power series in c s is summed instead.
double exp_moment(double c, double s, int k) {
    if (s <= 0.0) return 0.0;
    const double cs = c * s;
    if (cs < 1.0) {
        // sum_j c^j s^{k+j+1} / (j! (k+j+1))
        double term = std::pow(s, k + 1);  // c^j s^{k+j+1} / j!
        double acc = 0.0;
        for (int j = 0; j < 60; ++j) {
            const double add = term / static_cast<double>(k + j + 1);
            acc += add;
            if (add < 1e-18 * acc) break;
            term *= cs / static_cast<double>(j + 1);
        }
        return acc;
    }
    const double e = std::exp(cs);
    const double c2 = c * c;
    const double c3 = c2 * c;
    const double c4 = c3 * c;
    switch (k) {
        case 0:
            return std::expm1(cs) / c;
        case 1:
            return e * (s / c - 1.0 / c2) + 1.0 / c2;
        case 2:
            return e * (s * s / c - 2.0 * s / c2 + 2.0 / c3) - 2.0 / c3;
        case 3:
            return e * (s * s * s / c - 3.0 * s * s / c2 + 6.0 * s / c3 - 6.0 / c4) + 6.0 / c4;
        default:
            throw DomainError("exp_moment: order out of range");
    }
}

// G(s) = int_0^s e^{(rho+2 delta) r} int_r^T e^{-a u} du dr with
// a = rho + delta - delta beta, so that the finite envelope is x + x^{-beta} G.
double envelope_integral(const ModelParams& p, double horizon, double s) {
    const double a = p.horizon_margin();
    const double c_fast = p.rho + 2.0 * p.delta;
    const double c_slow = p.delta * (1.0 + p.beta);
    const bool resonant = std::abs(p.beta - (1.0 + p.rho / p.delta)) < kResonanceSwitch;

    if (resonant || std::abs(a) * horizon < 1e-4) {
        // (e^{-a r} - e^{-a T}) / a = sum_{k>=1} (-a)^{k-1} (T^k - r^k) / k!.
        // The resonant case keeps only k = 1; near resonance three terms leave
        // a truncation error of order (a T)^3.
        const double m0 = exp_moment(c_fast, s, 0);
        const int terms = resonant ? 1 : 3;
        double acc = 0.0;
        double coef = 1.0;     // (-a)^{k-1} / k!
        double t_pow = 1.0;    // T^k
        for (int k = 1; k <= terms; ++k) {
            t_pow *= horizon;
            coef /= static_cast<double>(k);
            acc += coef * (t_pow * m0 - exp_moment(c_fast, s, k));
            coef *= -a;
        }
        return acc;
    }

    const double slow = std::expm1(c_slow * s) / c_slow;
    const double fast = std::expm1(c_fast * s) / c_fast;
    return (slow - std::exp(-a * horizon) * fast) / a;
}

}  // namespace

double upper_envelope_finite(const ModelParams& params, double x, double horizon, double s) {
    return x + std::pow(x, -params.beta) * envelope_integral(params, horizon, s);
}

double upper_envelope_infinite(const ModelParams& params, double x, double s) {
    const double a = params.horizon_margin();
    const double c_slow = params.delta * (1.0 + params.beta);
    return x + std::pow(x, -params.beta) / a * std::expm1(c_slow * s) / c_slow;
}

namespace {

template <class Upper>
AprioriBounds make_bounds(const ModelParams& params, double x, const TimeGrid& grid, Upper upper) {
    const std::size_t n = grid.size();
    std::vector<double> zl(n, x), zu(n), yl(n), yu(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = grid.at(k);
        zu[k] = upper(s);
        if (!std::isfinite(zu[k]))
            throw DomainError("a priori upper bound overflows at s=" + std::to_string(s));
        const double damp = std::exp(-params.delta * s);
        yl[k] = damp * x;
        yu[k] = damp * zu[k];
    }
    return AprioriBounds{GridFunction(grid, std::move(zl)), GridFunction(grid, std::move(zu)),
                         GridFunction(grid, std::move(yl)), GridFunction(grid, std::move(yu))};
}

void check_x(double x) {
    if (!(std::isfinite(x) && x > 0.0)) throw DomainError("initial mean capacity must be positive");
}

}  // namespace

AprioriBounds apriori_bounds_finite(const ModelParams& params, double x, const TimeGrid& grid) {
    params.validate();
    check_x(x);
    const double horizon = grid.t_end();
    return make_bounds(params, x, grid,
                       [&](double s) { return upper_envelope_finite(params, x, horizon, s); });
}

AprioriBounds apriori_bounds_infinite(const ModelParams& params, double x, const TimeGrid& grid) {
    params.require_infinite_horizon();
    check_x(x);
    return make_bounds(params, x, grid,
                       [&](double s) { return upper_envelope_infinite(params, x, s); });
}

}  // namespace mfgcap
