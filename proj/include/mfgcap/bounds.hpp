#pragma once

#include "mfgcap/model.hpp"

namespace mfgcap {

/// Analytic envelopes of the equilibrium. z-space bounds bracket
/// z_s = e^{delta s} q_s; the y-space bounds bracket q itself.
struct AprioriBounds {
    GridFunction z_lower;
    GridFunction z_upper;
    GridFunction y_lower;
    GridFunction y_upper;
};

/// Below this distance |beta - (1 + rho/delta)| the upper bound uses the
/// resonant closed form.
inline constexpr double kResonanceSwitch = 1e-9;

/// Upper envelope on a finite horizon T at time s:
///   x + x^{-beta} int_0^s e^{(rho+2 delta) r} int_r^T e^{-(rho+delta-delta beta) u} du dr.
double upper_envelope_finite(const ModelParams& params, double x, double horizon, double s);

/// Pointwise limit T -> infinity of upper_envelope_finite; needs beta < 1 + rho/delta.
double upper_envelope_infinite(const ModelParams& params, double x, double s);

AprioriBounds apriori_bounds_finite(const ModelParams& params, double x, const TimeGrid& grid);
AprioriBounds apriori_bounds_infinite(const ModelParams& params, double x, const TimeGrid& grid);

}  // namespace mfgcap
