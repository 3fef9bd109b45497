#include <doctest.h>

#include <cmath>

#include "stacey/optimizers.hpp"
#include "stacey/theory.hpp"

using namespace stacey;

TEST_CASE("theorem1_bound examples") {
    PNorm p3(3.0);
    // only the telescoping term survives
    CHECK(theorem1_bound(2.0, 0.5, 0.0, 1.0, 0.0, 0.1, 5, p3, 1) ==
          doctest::Approx(1.5 / (0.1 * 5)).epsilon(1e-14));
    // hand value: 1/(0.1*10) + 0.5*1*0.1*1 = 1.05
    CHECK(theorem1_bound(1.0, 0.0, 1.0, 1.0, 0.0, 0.1, 10, p3, 1) ==
          doctest::Approx(1.05).epsilon(1e-14));
    // p = inf limit: (f0-f*)/(eta T) + L eta/2 + 2 sigma_l1/sqrt(n_t)
    double b = theorem1_bound(1.0, 0.0, 2.0, 7.0, 0.3, 0.05, 20, PNorm::infinity(), 4);
    CHECK(b == doctest::Approx(1.0 / (0.05 * 20) + 0.5 * 2.0 * 0.05 + 2.0 * 0.3 / 2.0)
                   .epsilon(1e-14));
}

TEST_CASE("theorem1_bound error paths and schedule overload") {
    PNorm p(3.0);
    CHECK_THROWS_AS(theorem1_bound(1, 0, 1, 1, 0, 0.1, 0, p, 1), Error);
    CHECK_THROWS_AS(theorem1_bound(1, 0, 1, 1, 0, 0.0, 10, p, 1), Error);
    CHECK_THROWS_AS(theorem1_bound(0, 1, 1, 1, 0, 0.1, 10, p, 1), Error);
    CHECK_THROWS_AS(theorem1_bound(1, 0, 1, 1, 0, 0.1, 3, p, std::vector<long>{1, 1}), Error);
    CHECK_THROWS_AS(theorem1_bound(1, 0, 1, 1, 1, 0.1, 2, p, std::vector<long>{1, 0}), Error);

    // vector schedule averages the per-step noise terms
    double sched = theorem1_bound(1, 0, 0, 1, 1.0, 0.1, 2, p, std::vector<long>{1, 4});
    double expect = 1.0 / 0.2 + 0.5 * (2.5 * 1.0 * (1.0 + 0.5));
    CHECK(sched == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("theorem1_bound monotonicity") {
    PNorm p(4.0);
    double base = theorem1_bound(1, 0, 1, 2, 0.5, 0.1, 10, p, 4);
    CHECK(theorem1_bound(1, 0, 2, 2, 0.5, 0.1, 10, p, 4) >= base);
    CHECK(theorem1_bound(1, 0, 1, 3, 0.5, 0.1, 10, p, 4) >= base);
    CHECK(theorem1_bound(1, 0, 1, 2, 0.9, 0.1, 10, p, 4) >= base);
    CHECK(theorem1_bound(1.5, 0, 1, 2, 0.5, 0.1, 10, p, 4) >= base);
    CHECK(theorem1_bound(1, 0, 1, 2, 0.5, 0.1, 20, p, 4) <= base);
    CHECK(theorem1_bound(1, 0, 1, 2, 0.5, 0.1, 10, p, 16) <= base);
}

TEST_CASE("theorem1_tuned_bound examples") {
    PNorm p3(3.0);
    // N = T^2 = 100, N^{1/4} = sqrt(10)
    CHECK(theorem1_tuned_bound(0.5, 0.0, 1.0, 1.0, 0.0, 10, p3) ==
          doctest::Approx(0.31622777).epsilon(1e-7));
    // quadrupling T halves the bound at sigma_l1 = 0
    double b1 = theorem1_tuned_bound(1.2, 0.1, 2.0, 3.0, 0.0, 50, p3);
    double b4 = theorem1_tuned_bound(1.2, 0.1, 2.0, 3.0, 0.0, 200, p3);
    CHECK(b4 == doctest::Approx(0.5 * b1).epsilon(1e-12));
    // G^{1/(p-1)} = 4 at p=3, G=16 multiplies both bracketed terms
    double g1 = theorem1_tuned_bound(1.0, 0.0, 1.0, 1.0, 0.7, 10, p3);
    double g16 = theorem1_tuned_bound(1.0, 0.0, 1.0, 16.0, 0.7, 10, p3);
    CHECK(g16 == doctest::Approx(4.0 * g1).epsilon(1e-12));
    CHECK_THROWS_AS(theorem1_tuned_bound(1, 0, 0.0, 1, 0, 10, p3), Error);
    CHECK_THROWS_AS(theorem1_tuned_bound(1, 0, 1, 0.0, 0, 10, p3), Error);
}

TEST_CASE("tuned bound scales exactly as N^{-1/4} when T doubles") {
    for (double pv : {2.5, 3.0, 4.0}) {
        PNorm p(pv);
        for (long T : {1L, 10L, 1000L}) {
            double a = theorem1_tuned_bound(1.0, 0.0, 3.0, 2.0, 0.0, T, p);
            double b = theorem1_tuned_bound(1.0, 0.0, 3.0, 2.0, 0.0, 2 * T, p);
            CHECK(std::fabs(b / a - std::pow(2.0, -0.5)) < 1e-12);
        }
    }
}

TEST_CASE("estimate_Lp on an isotropic quadratic is exactly c at p=2") {
    double c = 3.5;
    Problem pr = quadratic_problem({c, c, c}, {0, 0, 0});
    Region r{Vec(3, 0.0), 2.0};
    SmoothnessEstimate est = estimate_Lp(pr, PNorm(2.0), r, 50, 11);
    CHECK(est.L_hat == doctest::Approx(c).epsilon(1e-12));
    CHECK(est.n_pairs == 50);
}

TEST_CASE("estimate_Lp is zero for a linear objective") {
    Problem lin;
    lin.dim = 2;
    lin.value = [](const Vec& x) { return 3.0 * x[0] - x[1]; };
    lin.grad = [](const Vec&) { return Vec{3.0, -1.0}; };
    Region r{Vec(2, 0.0), 1.0};
    CHECK(estimate_Lp(lin, PNorm(3.0), r, 30, 4).L_hat == 0.0);
}

TEST_CASE("estimate_Lp is a running maximum over the pair prefix") {
    Problem pr = quadratic_problem({1, 5}, {0, 0});
    Region r{Vec(2, 0.0), 1.5};
    double prev = 0.0;
    for (long n : {1L, 5L, 20L, 100L}) {
        double cur = estimate_Lp(pr, PNorm(4.0), r, n, 23).L_hat;
        CHECK(cur >= prev);
        prev = cur;
    }
    CHECK_THROWS_AS(estimate_Lp(pr, PNorm(4.0), Region{Vec(2, 0.0), 0.0}, 10, 1), Error);
    CHECK_THROWS_AS(estimate_Lp(pr, PNorm(4.0), Region{Vec(3, 0.0), 1.0}, 10, 1), Error);
}

TEST_CASE("estimate_G examples") {
    Problem pr = quadratic_problem({1}, {0});
    StochasticOracle o = StochasticOracle::noiseless();
    Region r{Vec(1, 0.0), 2.0};
    double g = estimate_G(pr, o, PNorm(2.0), 500, r, 3);
    CHECK(g >= 2.0 * 0.9);  // close to sup |theta| = 2
    CHECK(g <= 2.2);

    Problem zero;
    zero.dim = 2;
    zero.value = [](const Vec&) { return 0.0; };
    zero.grad = [](const Vec&) { return Vec{0.0, 0.0}; };
    CHECK(estimate_G(zero, o, PNorm(2.0), 50, Region{Vec(2, 0.0), 1.0}, 3) == 0.0);

    double small = estimate_G(pr, o, PNorm(2.0), 200, Region{Vec(1, 0.0), 1.0}, 9);
    double large = estimate_G(pr, o, PNorm(2.0), 200, Region{Vec(1, 0.0), 3.0}, 9);
    CHECK(large >= small);
}

TEST_CASE("majorization_to_lp examples") {
    CHECK(majorization_to_lp({1, 1, 1, 1}, PNorm(4.0)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(majorization_to_lp({5, 0, 0}, PNorm(3.0)) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(majorization_to_lp({5, 0, 0}, PNorm(8.0)) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(majorization_to_lp({1, 100}, PNorm(4.0)) ==
          doctest::Approx(std::sqrt(10001.0)).epsilon(1e-14));
    // edge exponents
    CHECK(majorization_to_lp({3, 7, 2}, PNorm(2.0)) == 7.0);
    CHECK(majorization_to_lp({3, 7, 2}, PNorm::infinity()) == doctest::Approx(12.0));
    CHECK_THROWS_AS(majorization_to_lp({-1.0}, PNorm(4.0)), Error);
}

TEST_CASE("majorization_to_lp dominates the max entry") {
    Rng rng(31);
    for (int k = 0; k < 100; ++k) {
        Vec L(5);
        double mx = 0.0;
        for (double& l : L) {
            l = rng.uniform(0.0, 10.0);
            mx = std::max(mx, l);
        }
        PNorm p(rng.uniform(2.0 + 1e-6, 12.0));
        CHECK(majorization_to_lp(L, p) >= mx * (1.0 - 1e-13));
    }
}

TEST_CASE("majorization certificate dominates the empirical smoothness estimate") {
    Vec diag_a{1, 10, 100};
    Problem pr = quadratic_problem(diag_a, Vec(3, 0.0));
    for (double pv : {3.0, 4.0, 8.0}) {
        PNorm p(pv);
        double cert = majorization_to_lp(diag_a, p);
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            Region r{Vec(3, 0.0), 1.0 + static_cast<double>(seed)};
            SmoothnessEstimate est = estimate_Lp(pr, p, r, 400, seed);
            CHECK(est.L_hat <= cert * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("verify_run certifies a noiseless quadratic trajectory") {
    PNorm p(3.0);
    Problem pr = quadratic_problem({1, 1}, {0, 0});
    Region r{Vec(2, 0.0), 1.0};
    long T = 50;
    double L = 1.0;
    double G = estimate_G(pr, StochasticOracle::noiseless(), PNorm(2.0), 200, r, 5);
    double eta = tuned_eta(L, G, T, p);

    Vec theta{0.8, -0.6};
    double f0 = pr.value(theta);
    HyperParams hp;
    hp.p = p;
    hp.eta = eta;
    OptimizerState state = OptimizerState::init(theta);
    std::vector<double> stat(static_cast<std::size_t>(T));
    for (long t = 0; t < T; ++t) {
        Vec g = pr.grad(theta);
        stat[static_cast<std::size_t>(t)] = stationarity_measure(g, p);
        theta = lp_descent_step(theta, g, hp, state);
    }

    BoundConstants c;
    c.L = L;
    c.G = G;
    c.sigma_l1 = 0.0;
    c.f0 = f0;
    c.f_star = *pr.f_star_hint;
    c.eta = eta;
    c.T = T;
    c.n_t = T;
    BoundReport rep = verify_run({stat}, c, p);
    CHECK(rep.satisfied);
    CHECK(rep.empirical_mean_stationarity <= rep.bound_general);

    // inflating the constants keeps the bound satisfied
    BoundConstants big = c;
    big.L *= 10.0;
    big.G *= 10.0;
    CHECK(verify_run({stat}, big, p).satisfied);

    // error paths
    BoundConstants zt = c;
    zt.T = 0;
    CHECK_THROWS_AS(verify_run({stat}, zt, p), Error);
    CHECK_THROWS_AS(verify_run({}, c, p), Error);
    CHECK_THROWS_AS(verify_run({{}}, c, p), Error);
}

TEST_CASE("BoundReport serializes with the exact field names") {
    BoundReport rep;
    rep.bound_general = 2.0;
    rep.bound_tuned = 1.0;
    rep.empirical_mean_stationarity = 0.5;
    rep.constants_used = {1, 2, 0.1, 1.5, 0.0, 0.05, 100, 100};
    rep.satisfied = true;
    auto j = rep.to_json();
    CHECK(j["bound_general"] == 2.0);
    CHECK(j["bound_tuned"] == 1.0);
    CHECK(j["empirical_mean_stationarity"] == 0.5);
    CHECK(j["satisfied"] == true);
    CHECK(j["constants_used"]["L"] == 1.0);
    CHECK(j["constants_used"]["sigma_l1"] == 0.1);
    CHECK(j["constants_used"]["T"] == 100);
}
