#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stacey/geometry.hpp"
#include "stacey/oracle.hpp"
#include "stacey/pnorm.hpp"
#include "stacey/problems.hpp"
#include "stacey/rng.hpp"

namespace stacey {

namespace detail {

// G^e with the p=inf limit e -> 0, G^0 = 1.
inline double pow_G(double G, const PNorm& p, double numerator) {
    if (p.is_inf()) return 1.0;
    return std::pow(G, numerator / (p.value() - 1.0));
}

// (2p-1)/(p-1), limit 2 at p=inf.
inline double noise_coefficient(const PNorm& p) {
    if (p.is_inf()) return 2.0;
    return (2.0 * p.value() - 1.0) / (p.value() - 1.0);
}

}  // namespace detail

// (f0-f*)/(eta T) + L eta G^{2/(p-1)}/2
//   + (1/T) sum_t [(2p-1)/(p-1)] G^{1/(p-1)} sigma_l1 / sqrt(n_t).
inline double theorem1_bound(double f0, double f_star, double L, double G, double sigma_l1,
                             double eta, long T, const PNorm& p,
                             const std::vector<long>& n_schedule) {
    if (T < 1) throw Error("theorem1_bound: T must be >= 1");
    if (!(eta > 0.0)) throw Error("theorem1_bound: eta must be > 0");
    if (f0 < f_star) throw Error("theorem1_bound: f0 must be >= f_star");
    if (L < 0.0 || G < 0.0 || sigma_l1 < 0.0)
        throw Error("theorem1_bound: constants must be >= 0");
    if (n_schedule.size() != static_cast<std::size_t>(T))
        throw Error("theorem1_bound: n_schedule must have length T");

    double bound = (f0 - f_star) / (eta * static_cast<double>(T)) +
                   0.5 * L * eta * detail::pow_G(G, p, 2.0);
    double coef = detail::noise_coefficient(p) * detail::pow_G(G, p, 1.0) * sigma_l1;
    double noise = 0.0;
    for (long n : n_schedule) {
        if (n < 1) throw Error("theorem1_bound: batch sizes must be >= 1");
        noise += coef / std::sqrt(static_cast<double>(n));
    }
    return bound + noise / static_cast<double>(T);
}

inline double theorem1_bound(double f0, double f_star, double L, double G, double sigma_l1,
                             double eta, long T, const PNorm& p, long n_const) {
    return theorem1_bound(f0, f_star, L, G, sigma_l1, eta, T, p,
                          std::vector<long>(static_cast<std::size_t>(T), n_const));
}

// The tuned eta = 1/(sqrt(L) G^{1/(p-1)} sqrt(T)), n_t = T, N = T^2 form:
// N^{-1/4} [ sqrt(L) G^{1/(p-1)} (f0-f*+1/2) + (2p-1)/(p-1) G^{1/(p-1)} sigma_l1 ].
inline double theorem1_tuned_bound(double f0, double f_star, double L, double G,
                                   double sigma_l1, long T, const PNorm& p) {
    if (T < 1) throw Error("theorem1_tuned_bound: T must be >= 1");
    if (!(L > 0.0) || !(G > 0.0))
        throw Error("theorem1_tuned_bound: tuned eta needs L > 0 and G > 0");
    double gexp = detail::pow_G(G, p, 1.0);
    double bracket = std::sqrt(L) * gexp * (f0 - f_star + 0.5) +
                     detail::noise_coefficient(p) * gexp * sigma_l1;
    double N = static_cast<double>(T) * static_cast<double>(T);
    return bracket / std::pow(N, 0.25);
}

inline double tuned_eta(double L, double G, long T, const PNorm& p) {
    if (!(L > 0.0) || !(G > 0.0)) throw Error("tuned_eta: needs L > 0 and G > 0");
    return 1.0 / (std::sqrt(L) * detail::pow_G(G, p, 1.0) *
                  std::sqrt(static_cast<double>(T)));
}

// Axis-aligned sampling box: each coordinate uniform in [center_i - radius,
// center_i + radius].
struct Region {
    Vec center;
    double radius = 1.0;

    Vec sample(Rng& rng) const {
        Vec x(center.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = rng.uniform(center[i] - radius, center[i] + radius);
        return x;
    }
};

struct SmoothnessEstimate {
    PNorm p = PNorm(2.0);
    double L_hat = 0.0;  // empirical lower bound on the true L_p
    long n_pairs = 0;
    std::pair<Vec, Vec> max_ratio_pair;
};

// Running max of ||grad(x)-grad(y)||_{p*} / ||x-y||_p over sampled pairs.
// This is a certified LOWER bound on L_p over the region, never an upper one.
inline SmoothnessEstimate estimate_Lp(const Problem& problem, const PNorm& p,
                                      const Region& region, long n_pairs,
                                      std::uint64_t seed) {
    if (n_pairs < 1) throw Error("estimate_Lp: n_pairs must be >= 1");
    if (!(region.radius > 0.0) || region.center.size() != problem.dim)
        throw Error("estimate_Lp: degenerate region");
    SmoothnessEstimate est;
    est.p = p;
    est.n_pairs = n_pairs;
    Rng rng = Rng::derived(seed, /*stream=*/0x4c70ULL);
    for (long k = 0; k < n_pairs; ++k) {
        Vec x = region.sample(rng);
        Vec y = region.sample(rng);
        Vec dx(x.size()), dg;
        for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] - y[i];
        double denom = lp_norm(dx, p);
        if (denom == 0.0) continue;
        Vec gx = problem.grad(x), gy = problem.grad(y);
        dg.resize(gx.size());
        for (std::size_t i = 0; i < gx.size(); ++i) dg[i] = gx[i] - gy[i];
        double ratio = dual_norm(dg, p) / denom;
        if (ratio > est.L_hat) {
            est.L_hat = ratio;
            est.max_ratio_pair = {x, y};
        }
    }
    return est;
}

// Max ||g~||_{p*} over sampled (theta, draw) pairs, inflated by a safety
// factor; an empirical upper envelope for the gradient bound.
inline double estimate_G(const Problem& problem, const StochasticOracle& oracle,
                         const PNorm& p, long n_samples, const Region& region,
                         std::uint64_t seed, double safety = 1.1) {
    if (n_samples < 1) throw Error("estimate_G: n_samples must be >= 1");
    Rng rng = Rng::derived(seed, /*stream=*/0x47ULL);
    StochasticOracle o = oracle;
    double g_max = 0.0;
    for (long k = 0; k < n_samples; ++k) {
        Vec theta = region.sample(rng);
        o.seed = splitmix64(seed + static_cast<std::uint64_t>(k));
        Vec g = stochastic_gradient(problem, theta, o, k);
        g_max = std::max(g_max, dual_norm(g, p));
    }
    return safety * g_max;
}

// l2-majorization vector -> lp smoothness constant: ||L_vec||_{p/(p-2)}.
// Edge exponents: p=2 gives the max-norm limit, p=inf gives the l1 norm.
inline double majorization_to_lp(const Vec& L_vec, const PNorm& p) {
    check_finite(L_vec, "majorization_to_lp");
    for (double l : L_vec)
        if (l < 0.0) throw Error("majorization_to_lp: entries must be >= 0");
    if (p.is_inf()) return lp_norm(L_vec, 1.0);
    if (p.value() == 2.0)
        return lp_norm(L_vec, std::numeric_limits<double>::infinity());
    return lp_norm(L_vec, p.value() / (p.value() - 2.0));
}

struct BoundConstants {
    double L = 0.0;
    double G = 0.0;
    double sigma_l1 = 0.0;
    double f0 = 0.0;
    double f_star = 0.0;
    double eta = 0.0;
    long T = 0;
    long n_t = 1;
};

struct BoundReport {
    double bound_general = 0.0;
    double bound_tuned = 0.0;
    double empirical_mean_stationarity = 0.0;
    BoundConstants constants_used;
    bool satisfied = false;

    nlohmann::json to_json() const {
        return nlohmann::json{
            {"bound_general", bound_general},
            {"bound_tuned", bound_tuned},
            {"empirical_mean_stationarity", empirical_mean_stationarity},
            {"constants_used",
             {{"L", constants_used.L},
              {"G", constants_used.G},
              {"sigma_l1", constants_used.sigma_l1},
              {"f0", constants_used.f0},
              {"f_star", constants_used.f_star},
              {"eta", constants_used.eta},
              {"T", constants_used.T},
              {"n_t", constants_used.n_t}}},
            {"satisfied", satisfied}};
    }
};

// Seed-averaged mean stationarity vs. the Theorem-1 bound. Each inner
// vector holds the TRUE-gradient stationarity ||g_t||_{p*}^{p*} per
// iteration of one seed's trajectory.
inline BoundReport verify_run(const std::vector<std::vector<double>>& stationarity_per_seed,
                              const BoundConstants& c, const PNorm& p, double slack = 0.0) {
    if (stationarity_per_seed.empty())
        throw Error("verify_run: no trajectories supplied");
    for (const auto& traj : stationarity_per_seed)
        if (traj.empty() || traj.size() != static_cast<std::size_t>(c.T))
            throw Error("verify_run: trajectory length does not match T");

    double mean = 0.0;
    for (const auto& traj : stationarity_per_seed) {
        double avg = 0.0;
        for (double s : traj) avg += s;
        mean += avg / static_cast<double>(traj.size());
    }
    mean /= static_cast<double>(stationarity_per_seed.size());

    BoundReport rep;
    rep.constants_used = c;
    rep.empirical_mean_stationarity = mean;
    rep.bound_general =
        theorem1_bound(c.f0, c.f_star, c.L, c.G, c.sigma_l1, c.eta, c.T, p, c.n_t);
    rep.bound_tuned = (c.L > 0.0 && c.G > 0.0)
                          ? theorem1_tuned_bound(c.f0, c.f_star, c.L, c.G, c.sigma_l1, c.T, p)
                          : 0.0;
    rep.satisfied = mean <= rep.bound_general * (1.0 + slack);
    return rep;
}

}  // namespace stacey
