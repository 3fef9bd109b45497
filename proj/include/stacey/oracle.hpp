#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "stacey/geometry.hpp"
#include "stacey/problems.hpp"
#include "stacey/rng.hpp"

namespace stacey {

// Stochastic gradient source. Additive mode perturbs the exact gradient
// with the mean of n_t i.i.d. truncated-Gaussian draws (per-coordinate
// sigma_i, truncation at 6 sigma keeps every draw bounded); minibatch mode
// averages per-sample gradients over a uniform batch without replacement.
// Deterministic given (seed, t).
struct StochasticOracle {
    enum class Mode { Additive, Minibatch };

    Mode mode = Mode::Additive;
    Vec sigma;                     // per-coordinate noise scale (additive mode)
    long batch_size = 1;           // n_t when batch_schedule_T is false
    bool batch_schedule_T = false; // n_t = T (the tuned-bound configuration)
    long total_steps = 0;          // T, needed when batch_schedule_T
    std::uint64_t seed = 0;

    long batch_at(long /*t*/) const {
        return batch_schedule_T ? total_steps : batch_size;
    }

    static StochasticOracle noiseless() {
        StochasticOracle o;
        o.sigma.clear();
        return o;
    }
};

inline Vec stochastic_gradient(const Problem& problem, const Vec& theta,
                               const StochasticOracle& oracle, long t) {
    long n_t = oracle.batch_at(t);
    if (n_t < 1) throw Error("stochastic_gradient: batch size must be >= 1");

    if (oracle.mode == StochasticOracle::Mode::Minibatch) {
        if (problem.n_samples == 0 || !problem.batch_grad)
            throw Error("stochastic_gradient: problem has no sample-level gradients");
        if (static_cast<std::size_t>(n_t) > problem.n_samples)
            throw Error("stochastic_gradient: batch size exceeds dataset size");
        // Partial Fisher-Yates over sample indices.
        std::vector<std::uint32_t> idx(problem.n_samples);
        std::iota(idx.begin(), idx.end(), 0u);
        Rng rng = Rng::derived(oracle.seed, /*stream=*/0xba7c4ULL, static_cast<std::uint64_t>(t));
        for (long k = 0; k < n_t; ++k) {
            std::size_t j = k + rng.below(idx.size() - k);
            std::swap(idx[k], idx[j]);
        }
        idx.resize(n_t);
        return problem.batch_grad(theta, idx);
    }

    Vec g = problem.grad(theta);
    if (oracle.sigma.empty()) return g;
    check_same_dim(g, oracle.sigma, "stochastic_gradient sigma");
    Rng rng = Rng::derived(oracle.seed, /*stream=*/0xad41713eULL, static_cast<std::uint64_t>(t));
    double inv = 1.0 / static_cast<double>(n_t);
    for (long k = 0; k < n_t; ++k)
        for (std::size_t i = 0; i < g.size(); ++i)
            if (oracle.sigma[i] > 0.0)
                g[i] += inv * oracle.sigma[i] * rng.truncated_normal(6.0);
    check_finite(g, "stochastic_gradient");
    return g;
}

}  // namespace stacey
