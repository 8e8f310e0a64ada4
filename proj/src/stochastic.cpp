#include "mfgcap/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "mfgcap/kernels.hpp"
#include "mfgcap/rng.hpp"

namespace mfgcap {

namespace {

constexpr std::size_t kBlockPaths = 1024;

// Welford accumulator over a vector of grid values.
struct Moments {
    double count = 0.0;
    std::vector<double> mean;
    std::vector<double> m2;

    explicit Moments(std::size_t n = 0) : mean(n, 0.0), m2(n, 0.0) {}

    void add(const std::vector<double>& x) {
        count += 1.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double d = x[k] - mean[k];
            mean[k] += d / count;
            m2[k] += d * (x[k] - mean[k]);
        }
    }

    // Chan et al. parallel combination.
    void merge(const Moments& o) {
        if (o.count == 0.0) return;
        if (count == 0.0) {
            *this = o;
            return;
        }
        const double n = count + o.count;
        for (std::size_t k = 0; k < mean.size(); ++k) {
            const double d = o.mean[k] - mean[k];
            mean[k] += d * o.count / n;
            m2[k] += o.m2[k] + d * d * count * o.count / n;
        }
        count = n;
    }
};

// Pairwise reduction in index order; the tree shape depends only on the
// number of blocks.
Moments reduce_pairwise(std::vector<Moments>& blocks, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return std::move(blocks[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    Moments left = reduce_pairwise(blocks, lo, mid);
    left.merge(reduce_pairwise(blocks, mid, hi));
    return left;
}

class PathGenerator {
public:
    PathGenerator(const ModelParams& params, const GridFunction& u, const InitialDistribution& init,
                  std::uint64_t seed)
        : sigma_(params.sigma),
          h_(u.grid().step()),
          drift_(-(params.delta + 0.5 * params.sigma * params.sigma) * u.grid().step()),
          vol_(params.sigma * std::sqrt(u.grid().step())),
          u_(u.values().begin(), u.values().end()),
          init_(init),
          seed_(seed) {}

    // Fills x[0..n] with path `index`.
    void run(std::uint64_t index, std::vector<double>& x) const {
        PathStream stream(seed_, index);
        const double u01 = stream.uniform();
        const double z0 = stream.normal();
        const double xi = init_.draw(u01, z0);
        double log_y = 0.0;
        double inv_prev = 1.0;  // 1 / Y at the previous grid point
        double integral = 0.0;
        x[0] = xi;
        for (std::size_t k = 1; k < u_.size(); ++k) {
            log_y += drift_;
            if (sigma_ > 0.0) log_y += vol_ * stream.normal();
            const double y = std::exp(log_y);
            const double inv = 1.0 / y;
            integral += 0.5 * h_ * (u_[k - 1] * inv_prev + u_[k] * inv);
            x[k] = y * (xi + integral);
            inv_prev = inv;
        }
    }

private:
    double sigma_;
    double h_;
    double drift_;
    double vol_;
    std::vector<double> u_;
    const InitialDistribution& init_;
    std::uint64_t seed_;
};

void check_control(const GridFunction& u) {
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k] < 0.0)
            throw DomainError("investment rate must be nonnegative, got " + sci(u[k]) +
                              " at index " + std::to_string(k));
    }
}

unsigned resolve_threads(unsigned threads, std::size_t blocks) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(threads, blocks));
}

// Runs `work(block_index)` for every block on a small pool. Blocks are
// claimed dynamically, but every block writes only its own slot.
template <class Work>
void for_each_block(std::size_t blocks, unsigned threads, Work work) {
    const unsigned t = resolve_threads(threads, blocks);
    if (t <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) work(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned i = 0; i < t; ++i) {
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < blocks; b = next++) work(b);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

double PathEnsemble::standard_error(std::size_t k) const {
    return std_path[k] / std::sqrt(static_cast<double>(n_paths));
}

PathEnsemble simulate_paths(const ModelParams& params, const GridFunction& u,
                            const InitialDistribution& init, std::size_t n_paths, std::uint64_t seed,
                            std::size_t store_k, unsigned threads) {
    params.validate();
    check_control(u);
    if (n_paths < 1) throw DomainError("n_paths must be at least 1");
    const std::size_t n = u.size();
    const std::size_t blocks = (n_paths + kBlockPaths - 1) / kBlockPaths;
    const std::size_t keep = std::min(store_k, n_paths);
    const PathGenerator gen(params, u, init, seed);

    std::vector<Moments> partial(blocks);
    std::vector<std::vector<double>> stored(keep);
    std::atomic<bool> non_positive{false};

    for_each_block(blocks, threads, [&](std::size_t b) {
        Moments acc(n);
        std::vector<double> x(n);
        const std::size_t first = b * kBlockPaths;
        const std::size_t last = std::min(n_paths, first + kBlockPaths);
        for (std::size_t i = first; i < last; ++i) {
            gen.run(i, x);
            if (!std::all_of(x.begin(), x.end(), [](double v) { return v > 0.0; }))
                non_positive = true;
            acc.add(x);
            if (i < keep) stored[i] = x;
        }
        partial[b] = std::move(acc);
    });
    if (non_positive) throw DomainError("simulated capacity left (0, inf); check xi and u");

    Moments total = reduce_pairwise(partial, 0, blocks);
    std::vector<double> sd(n, 0.0);
    if (n_paths > 1) {
        for (std::size_t k = 0; k < n; ++k)
            sd[k] = std::sqrt(std::max(0.0, total.m2[k] / static_cast<double>(n_paths - 1)));
    }
    std::vector<GridFunction> paths;
    paths.reserve(keep);
    for (auto& p : stored) paths.emplace_back(u.grid(), std::move(p));
    return PathEnsemble{u.grid(),
                        n_paths,
                        seed,
                        GridFunction(u.grid(), std::move(total.mean)),
                        GridFunction(u.grid(), std::move(sd)),
                        std::move(paths)};
}

GridFunction analytic_mean(const ModelParams& params, const GridFunction& u, double x_mean) {
    check_control(u);
    const GridFunction drift = cumulative_forward_kernel(u, params.delta);
    std::vector<double> m(u.size());
    for (std::size_t k = 0; k < m.size(); ++k)
        m[k] = std::exp(-params.delta * u.grid().at(k)) * x_mean + drift[k];
    m[0] = x_mean;
    return GridFunction(u.grid(), std::move(m));
}

ProfitEstimate estimate_profit(const ModelParams& params, const GridFunction& q,
                               const GridFunction& u, const InitialDistribution& init,
                               std::size_t n_paths, std::uint64_t seed, unsigned threads) {
    params.validate();
    check_control(u);
    if (!(q.grid() == u.grid())) throw DomainError("q and u must share a grid");
    if (n_paths < 2) throw DomainError("a standard error needs at least 2 paths");
    const std::size_t n = u.size();
    const TimeGrid& grid = u.grid();
    const double h = grid.step();

    // integrand = w_k X_k - c_k with trapezoid weights folded in.
    std::vector<double> w(n), c(n), price(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(q[k] > 0.0)) throw DomainError("capacity path must be positive");
        const double trap = (k == 0 || k + 1 == n) ? 0.5 * h : h;
        const double disc = std::exp(-params.rho * grid.at(k));
        price[k] = std::pow(q[k], -params.beta);
        w[k] = trap * disc * price[k];
        c[k] = trap * disc * 0.5 * u[k] * u[k];
    }

    const std::size_t blocks = (n_paths + kBlockPaths - 1) / kBlockPaths;
    const PathGenerator gen(params, u, init, seed);
    std::vector<Moments> partial(blocks);
    std::vector<Moments> integrand_partial(blocks);
    for_each_block(blocks, threads, [&](std::size_t b) {
        Moments acc(1);
        Moments xs(n);
        std::vector<double> x(n);
        std::vector<double> one(1);
        const std::size_t first = b * kBlockPaths;
        const std::size_t last = std::min(n_paths, first + kBlockPaths);
        for (std::size_t i = first; i < last; ++i) {
            gen.run(i, x);
            double j = 0.0;
            for (std::size_t k = 0; k < n; ++k) j += w[k] * x[k] - c[k];
            one[0] = j;
            acc.add(one);
            xs.add(x);
        }
        partial[b] = std::move(acc);
        integrand_partial[b] = std::move(xs);
    });

    const Moments total = reduce_pairwise(partial, 0, blocks);
    const Moments xs = reduce_pairwise(integrand_partial, 0, blocks);
    double sup_integrand = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        sup_integrand = std::max(sup_integrand, std::abs(xs.mean[k] * price[k] - 0.5 * u[k] * u[k]));

    ProfitEstimate out;
    out.estimate = total.mean[0];
    out.std_error = std::sqrt(total.m2[0] / static_cast<double>(n_paths - 1)) /
                    std::sqrt(static_cast<double>(n_paths));
    out.tail_bound = std::exp(-params.rho * grid.t_end()) * sup_integrand / params.rho;
    return out;
}

SigmaGapRow consistency_gap(const PathEnsemble& ensemble, const GridFunction& reference) {
    if (!(ensemble.grid == reference.grid())) throw DomainError("reference path on a different grid");
    SigmaGapRow row;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        const double diff = std::abs(ensemble.mean_path[k] - reference[k]);
        row.max_abs_diff = std::max(row.max_abs_diff, diff);
        const double se = ensemble.standard_error(k);
        // Below this the spread is rounding noise and the point is checked absolutely.
        if (se > 1e-12 * (1.0 + std::abs(reference[k]))) {
            row.gap = std::max(row.gap, diff / se);
        } else if (diff > 1e-8) {
            row.flagged = true;
        }
    }
    row.std_at_end = ensemble.std_path.back();
    row.flagged = row.flagged || row.gap > 4.0;
    return row;
}

std::vector<SigmaGapRow> sigma_invariance_report(const std::vector<ModelParams>& params_list,
                                                 const GridFunction& u,
                                                 const InitialDistribution& init,
                                                 std::size_t n_paths, std::uint64_t seed,
                                                 unsigned threads) {
    std::vector<SigmaGapRow> rows;
    rows.reserve(params_list.size());
    for (const ModelParams& p : params_list) {
        if (!params_list.empty() &&
            (p.rho != params_list.front().rho || p.delta != params_list.front().delta ||
             p.beta != params_list.front().beta))
            throw DomainError("sigma_invariance_report: parameter sets may differ only in sigma");
        const PathEnsemble ens = simulate_paths(p, u, init, n_paths, seed, 0, threads);
        SigmaGapRow row = consistency_gap(ens, analytic_mean(p, u, init.mean()));
        row.sigma = p.sigma;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace mfgcap
