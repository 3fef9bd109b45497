#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "stacey/dataset.hpp"
#include "stacey/oracle.hpp"
#include "stacey/problems.hpp"

using namespace stacey;

TEST_CASE("quadratic problem") {
    Problem iso = quadratic_problem({1, 1}, {0, 0});
    CHECK(iso.value({1, 2}) == doctest::Approx(2.5));
    Vec g = iso.grad({1, 2});
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 2.0);

    Problem pr = quadratic_problem({2}, {4});
    CHECK(*pr.f_star_hint == doctest::Approx(-4.0));
    CHECK(pr.value({2}) == doctest::Approx(-4.0));  // theta* = b/a = 2
    CHECK(pr.grad({2})[0] == doctest::Approx(0.0));

    CHECK_THROWS_AS(quadratic_problem({0.0}, {1.0}), Error);
    CHECK_THROWS_AS(quadratic_problem({1.0, -2.0}, {0.0, 0.0}), Error);
}

TEST_CASE("logistic problem basics") {
    // single sample x=(1,0), y=1
    Dataset d;
    d.n_samples = 1;
    d.n_features = 2;
    d.n_classes = 2;
    d.features = {1.0f, 0.0f};
    d.labels = {1};
    Problem pr = logistic_problem(d);
    CHECK(pr.value({0, 0}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    Vec g = pr.grad({0, 0});
    CHECK(g[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(0.0));

    Dataset bad = d;
    bad.n_classes = 3;
    CHECK_THROWS_AS(logistic_problem(bad), Error);
}

TEST_CASE("logistic loss decreases under plain descent on a separable pair") {
    Dataset d;
    d.n_samples = 2;
    d.n_features = 2;
    d.n_classes = 2;
    d.features = {1.0f, 0.5f, -1.0f, -0.5f};
    d.labels = {1, 0};
    Problem pr = logistic_problem(d);
    Vec theta(2, 0.0);
    double prev = pr.value(theta);
    for (int t = 0; t < 100; ++t) {
        Vec g = pr.grad(theta);
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= 0.1 * g[i];
        double cur = pr.value(theta);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("rosenbrock problem") {
    Problem pr = rosenbrock_problem(2);
    CHECK(pr.value({1, 1}) == 0.0);
    CHECK(pr.grad({1, 1}) == Vec{0, 0});
    CHECK(pr.value({0, 0}) == doctest::Approx(1.0));
    Vec g = pr.grad({0, 0});
    CHECK(g[0] == doctest::Approx(-2.0));
    CHECK(g[1] == doctest::Approx(0.0));
    CHECK(pr.value({-1, 1}) == doctest::Approx(4.0));
    CHECK_THROWS_AS(rosenbrock_problem(3), Error);
    CHECK_THROWS_AS(rosenbrock_problem(0), Error);
}

TEST_CASE("mlp at zero parameters predicts uniformly") {
    Dataset d = generate_two_gaussians(30, 5, 3);
    Problem pr = mlp_problem(d, 4, 7);
    Vec zero(pr.dim, 0.0);
    CHECK(pr.value(zero) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("mlp gradient matches finite differences") {
    Dataset d = generate_two_gaussians(24, 9, 3);
    Problem pr = mlp_problem(d, 5, 13);
    Rng rng(41);
    for (int k = 0; k < 3; ++k) {
        Vec th(pr.dim);
        for (double& x : th) x = rng.uniform(-0.5, 0.5);
        Vec g = pr.grad(th);
        Vec fd = fd_gradient(pr, th, 1e-5);
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(std::fabs(g[i] - fd[i]) / (1.0 + std::fabs(g[i])) < 1e-5);
    }
}

TEST_CASE("mlp trains to high accuracy on the two-gaussian task") {
    Dataset d = generate_two_gaussians(100, 3, 2);
    Problem pr = mlp_problem(d, 8, 3);
    Vec theta = pr.theta0;
    double acc = 0.0;
    for (int t = 0; t < 500; ++t) {
        Vec g = pr.grad(theta);
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= 0.5 * g[i];
        acc = pr.accuracy(theta, d);
        if (acc >= 0.95) break;
    }
    CHECK(acc >= 0.95);
}

TEST_CASE("fd_gradient examples") {
    Problem pr = quadratic_problem({2}, {0});
    CHECK(fd_gradient(pr, {3}, 1e-5)[0] == doctest::Approx(6.0).epsilon(1e-8));

    Problem flat;
    flat.dim = 3;
    flat.value = [](const Vec&) { return 1.0; };
    Vec z = fd_gradient(flat, {1, 2, 3}, 1e-5);
    CHECK(z == Vec{0, 0, 0});

    Problem rb = rosenbrock_problem(2);
    Vec fd = fd_gradient(rb, {0, 0}, 1e-5);
    CHECK(std::fabs(fd[0] + 2.0) < 1e-6);
    CHECK(std::fabs(fd[1]) < 1e-6);
}

TEST_CASE("every problem passes the finite-difference check at random points") {
    std::vector<Problem> problems;
    problems.push_back(quadratic_problem({1, 3, 0.5}, {0.2, -1, 0}));
    problems.push_back(rosenbrock_problem(4));
    problems.push_back(logistic_problem(generate_two_gaussians(40, 2, 3), 0.01));
    problems.push_back(mlp_problem(generate_two_gaussians(30, 4, 2), 4, 5));
    Rng rng(43);
    for (const Problem& pr : problems) {
        for (int k = 0; k < 20; ++k) {
            Vec th(pr.dim);
            for (double& x : th) x = rng.uniform(-1.0, 1.0);
            Vec g = pr.grad(th);
            Vec fd = fd_gradient(pr, th, 1e-5);
            for (std::size_t i = 0; i < g.size(); ++i)
                CHECK(std::fabs(g[i] - fd[i]) / (1.0 + std::fabs(g[i])) < 1e-5);
        }
    }
}

TEST_CASE("noiseless oracle returns the exact gradient") {
    Problem pr = quadratic_problem({1, 2}, {0.5, -0.5});
    StochasticOracle o = StochasticOracle::noiseless();
    Vec theta{0.3, -0.4};
    CHECK(stochastic_gradient(pr, theta, o, 0) == pr.grad(theta));
}

TEST_CASE("additive oracle matches its advertised mean and variance") {
    Problem pr = quadratic_problem({1, 1}, {0, 0});
    Vec theta{0.7, -0.2};
    Vec g = pr.grad(theta);
    StochasticOracle o;
    o.sigma = {0.3, 0.8};
    o.batch_size = 4;
    o.seed = 77;
    const int n_draws = 100000;
    Vec mean(2, 0.0), m2(2, 0.0);
    for (int t = 0; t < n_draws; ++t) {
        Vec gt = stochastic_gradient(pr, theta, o, t);
        for (int i = 0; i < 2; ++i) {
            double d = gt[i] - g[i];
            mean[i] += d;
            m2[i] += d * d;
        }
    }
    for (int i = 0; i < 2; ++i) {
        double target_var = o.sigma[i] * o.sigma[i] / static_cast<double>(o.batch_size);
        double emp_mean = mean[i] / n_draws;
        double emp_var = m2[i] / n_draws;
        double se = std::sqrt(target_var / n_draws);
        CHECK(std::fabs(emp_mean) <= 3.0 * se);
        CHECK(emp_var == doctest::Approx(target_var).epsilon(0.05));
    }
}

TEST_CASE("oracle draws are deterministic in (seed, t)") {
    Problem pr = quadratic_problem({1}, {0});
    StochasticOracle o;
    o.sigma = {1.0};
    o.seed = 5;
    Vec a = stochastic_gradient(pr, {0.5}, o, 3);
    Vec b = stochastic_gradient(pr, {0.5}, o, 3);
    Vec c = stochastic_gradient(pr, {0.5}, o, 4);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("minibatch oracle averages sample gradients and validates sizes") {
    Dataset d = generate_two_gaussians(20, 8, 2);
    Problem pr = logistic_problem(d);
    StochasticOracle o;
    o.mode = StochasticOracle::Mode::Minibatch;
    o.batch_size = 20;
    o.seed = 9;
    Vec theta(pr.dim, 0.1);
    // full-dataset batch equals the exact gradient
    Vec g = stochastic_gradient(pr, theta, o, 0);
    Vec exact = pr.grad(theta);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(g[i] == doctest::Approx(exact[i]).epsilon(1e-12));

    o.batch_size = 21;
    CHECK_THROWS_AS(stochastic_gradient(pr, theta, o, 0), Error);

    Problem quad = quadratic_problem({1}, {0});
    o.batch_size = 1;
    CHECK_THROWS_AS(stochastic_gradient(quad, {0.0}, o, 0), Error);
}

TEST_CASE("dataset DSB1 round trip is bit-identical") {
    Dataset d = generate_two_moons(40, 6);
    std::string path = (std::filesystem::temp_directory_path() / "stacey_rt.dsb1").string();
    save_dataset(d, path);
    Dataset back = load_dataset(path);
    CHECK(back.n_samples == d.n_samples);
    CHECK(back.n_features == d.n_features);
    CHECK(back.n_classes == d.n_classes);
    CHECK(back.features == d.features);
    CHECK(back.labels == d.labels);
    std::remove(path.c_str());
}

TEST_CASE("dataset loader error paths") {
    auto tmp = std::filesystem::temp_directory_path();
    std::string bad_magic = (tmp / "stacey_badmagic.dsb1").string();
    {
        std::ofstream out(bad_magic, std::ios::binary);
        out << "NOPE12345678";
    }
    CHECK_THROWS_AS(load_dataset(bad_magic), IoError);
    std::remove(bad_magic.c_str());

    Dataset d = generate_two_gaussians(10, 1, 2);
    std::string full = (tmp / "stacey_full.dsb1").string();
    save_dataset(d, full);
    std::string trunc = (tmp / "stacey_trunc.dsb1").string();
    {
        std::ifstream in(full, std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        bytes.resize(bytes.size() / 2);
        std::ofstream out(trunc, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    CHECK_THROWS_AS(load_dataset(trunc), IoError);
    std::remove(full.c_str());
    std::remove(trunc.c_str());
}

TEST_CASE("two-gaussians generator is stratified and reproducible") {
    Dataset a = generate_two_gaussians(100, 7);
    Dataset b = generate_two_gaussians(100, 7);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    int ones = 0;
    for (auto l : a.labels) ones += l == 1;
    CHECK(ones == 50);
    Dataset c = generate_two_gaussians(100, 8);
    CHECK(a.features != c.features);
}
