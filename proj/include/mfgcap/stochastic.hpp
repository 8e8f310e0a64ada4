#pragma once

#include <cstdint>
#include <vector>

#include "mfgcap/model.hpp"

namespace mfgcap {

/// Summary of a Monte Carlo run of the controlled capacity
///   X_s = Y_s (xi + int_0^s u_r / Y_r dr),  Y_s = exp(sigma B_s - (delta + sigma^2/2) s).
struct PathEnsemble {
    TimeGrid grid;
    std::size_t n_paths;
    std::uint64_t seed;
    GridFunction mean_path;
    GridFunction std_path;                  // sample standard deviation (n-1 denominator)
    std::vector<GridFunction> stored_paths; // the first store_k paths, for plotting

    /// std_path[k] / sqrt(n_paths).
    [[nodiscard]] double standard_error(std::size_t k) const;
};

inline constexpr std::size_t kDefaultStoredPaths = 10;

/// Path k uses its own counter-based stream keyed by (seed, k); statistics
/// are merged in a fixed order, so the result does not depend on `threads`
/// (0 picks the hardware concurrency).
PathEnsemble simulate_paths(const ModelParams& params, const GridFunction& u,
                            const InitialDistribution& init, std::size_t n_paths, std::uint64_t seed,
                            std::size_t store_k = kDefaultStoredPaths, unsigned threads = 0);

/// E[X_s] = e^{-delta s} x_mean + int_0^s e^{-delta (s-r)} u_r dr; does not depend on sigma.
GridFunction analytic_mean(const ModelParams& params, const GridFunction& u, double x_mean);

struct ProfitEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    // e^{-rho T} sup_s |E[integrand]| / rho: what the neglected part of an
    // infinite-horizon profit can be worth if the integrand stays at its
    // largest grid value.
    double tail_bound = 0.0;
};

/// Monte Carlo estimate of E[int_0^T e^{-rho s} (X_s q_s^{-beta} - u_s^2 / 2) ds],
/// trapezoid per path.
ProfitEstimate estimate_profit(const ModelParams& params, const GridFunction& q,
                               const GridFunction& u, const InitialDistribution& init,
                               std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

struct SigmaGapRow {
    double sigma = 0.0;
    double gap = 0.0;           // sup_k |mean_k - analytic_k| / SE_k over points with SE_k > 0
    double max_abs_diff = 0.0;  // sup_k |mean_k - analytic_k|
    double std_at_end = 0.0;
    bool flagged = false;       // gap > 4, or a zero-variance point off by more than 1e-8
};

/// Consistency gap of the simulated mean against analytic_mean for each
/// parameter set (which should differ only in sigma).
std::vector<SigmaGapRow> sigma_invariance_report(const std::vector<ModelParams>& params_list,
                                                 const GridFunction& u,
                                                 const InitialDistribution& init,
                                                 std::size_t n_paths, std::uint64_t seed,
                                                 unsigned threads = 0);

/// The per-point gap statistic used by sigma_invariance_report, for an
/// arbitrary reference path.
SigmaGapRow consistency_gap(const PathEnsemble& ensemble, const GridFunction& reference);

}  // namespace mfgcap
