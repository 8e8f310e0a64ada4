#pragma once

#include "mfgcap/model.hpp"

namespace mfgcap {

// Trapezoid evaluation of exponentially weighted running integrals on a
// uniform grid. Both run in O(n) with per-step decay factor e^{-c h}, which
// is <= 1 for c >= 0.

/// g(s_k) = int_{s_k}^{T} e^{-c (r - s_k)} f(r) dr, with g(T) = 0.
GridFunction cumulative_backward_kernel(const GridFunction& f, double c);

/// g(s_k) = int_0^{s_k} e^{-c (s_k - r)} f(r) dr, with g(0) = 0.
GridFunction cumulative_forward_kernel(const GridFunction& f, double c);

/// Forward-kernel value at an arbitrary s in [0, T]; the last partial cell
/// uses the linear interpolant of f.
double forward_kernel_at(const GridFunction& f, double c, double s);

/// Plain trapezoid rule of e^{-c s} f(s) over the whole grid.
double discounted_integral(const GridFunction& f, double c);

}  // namespace mfgcap
