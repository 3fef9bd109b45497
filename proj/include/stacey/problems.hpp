#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stacey/dataset.hpp"
#include "stacey/geometry.hpp"

namespace stacey {

// An objective with exact value/gradient. Dataset-backed problems also
// expose per-batch gradients (for the minibatch oracle) and an accuracy
// channel.
struct Problem {
    std::string name;
    std::size_t dim = 0;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
    Vec theta0;
    std::optional<double> f_star_hint;

    std::size_t n_samples = 0;  // nonzero iff dataset-backed
    std::function<Vec(const Vec&, const std::vector<std::uint32_t>&)> batch_grad;
    std::function<double(const Vec&, const Dataset&)> accuracy;
};

// f(theta) = 1/2 sum a_i theta_i^2 - sum b_i theta_i, a_i > 0.
inline Problem quadratic_problem(const Vec& diag_a, const Vec& b) {
    check_same_dim(diag_a, b, "quadratic_problem");
    check_finite(diag_a, "quadratic_problem a");
    check_finite(b, "quadratic_problem b");
    for (double a : diag_a)
        if (!(a > 0.0)) throw Error("quadratic_problem: diag_a entries must be positive");
    Problem pr;
    pr.name = "quadratic";
    pr.dim = diag_a.size();
    pr.theta0.assign(pr.dim, 0.0);
    double fstar = 0.0;
    for (std::size_t i = 0; i < diag_a.size(); ++i) fstar -= 0.5 * b[i] * b[i] / diag_a[i];
    pr.f_star_hint = fstar;
    pr.value = [diag_a, b](const Vec& th) {
        double f = 0.0;
        for (std::size_t i = 0; i < th.size(); ++i)
            f += 0.5 * diag_a[i] * th[i] * th[i] - b[i] * th[i];
        return f;
    };
    pr.grad = [diag_a, b](const Vec& th) {
        Vec g(th.size());
        for (std::size_t i = 0; i < th.size(); ++i) g[i] = diag_a[i] * th[i] - b[i];
        return g;
    };
    return pr;
}

namespace detail {

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// log(1 + e^x) without overflow.
inline double log1pexp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

}  // namespace detail

// Mean binary cross-entropy over the dataset, optional ridge term.
// theta has one weight per feature (no intercept).
inline Problem logistic_problem(Dataset data, double l2_reg = 0.0) {
    if (data.n_classes != 2) throw Error("logistic_problem: needs exactly 2 classes");
    if (l2_reg < 0.0) throw Error("logistic_problem: l2_reg must be >= 0");
    auto ds = std::make_shared<Dataset>(std::move(data));
    Problem pr;
    pr.name = "logistic";
    pr.dim = ds->n_features;
    pr.n_samples = ds->n_samples;
    pr.theta0.assign(pr.dim, 0.0);

    auto margin = [](const Dataset& d, const Vec& th, std::size_t row) {
        double z = 0.0;
        for (std::size_t j = 0; j < th.size(); ++j) z += d.feature(row, j) * th[j];
        return z;
    };
    pr.value = [ds, l2_reg, margin](const Vec& th) {
        double loss = 0.0;
        for (std::size_t i = 0; i < ds->n_samples; ++i) {
            double z = margin(*ds, th, i);
            double y = ds->labels[i];
            loss += detail::log1pexp(z) - y * z;
        }
        loss /= static_cast<double>(ds->n_samples);
        for (double w : th) loss += 0.5 * l2_reg * w * w;
        return loss;
    };
    auto accum_grad = [ds, margin](const Vec& th, Vec& g, std::size_t row) {
        double r = detail::sigmoid(margin(*ds, th, row)) - ds->labels[row];
        for (std::size_t j = 0; j < th.size(); ++j) g[j] += r * ds->feature(row, j);
    };
    pr.grad = [ds, l2_reg, accum_grad](const Vec& th) {
        Vec g(th.size(), 0.0);
        for (std::size_t i = 0; i < ds->n_samples; ++i) accum_grad(th, g, i);
        double inv = 1.0 / static_cast<double>(ds->n_samples);
        for (std::size_t j = 0; j < th.size(); ++j) g[j] = g[j] * inv + l2_reg * th[j];
        return g;
    };
    pr.batch_grad = [ds, l2_reg, accum_grad](const Vec& th,
                                             const std::vector<std::uint32_t>& idx) {
        Vec g(th.size(), 0.0);
        for (std::uint32_t i : idx) accum_grad(th, g, i);
        double inv = 1.0 / static_cast<double>(idx.size());
        for (std::size_t j = 0; j < th.size(); ++j) g[j] = g[j] * inv + l2_reg * th[j];
        return g;
    };
    pr.accuracy = [margin](const Vec& th, const Dataset& d) {
        std::size_t hit = 0;
        for (std::size_t i = 0; i < d.n_samples; ++i) {
            std::uint32_t pred = margin(d, th, i) > 0.0 ? 1u : 0u;
            hit += pred == d.labels[i];
        }
        return static_cast<double>(hit) / static_cast<double>(d.n_samples);
    };
    return pr;
}

// Chained Rosenbrock over coordinate pairs: sum 100(y - x^2)^2 + (1 - x)^2.
inline Problem rosenbrock_problem(std::size_t dim) {
    if (dim < 2 || dim % 2 != 0) throw Error("rosenbrock_problem: dim must be even and >= 2");
    Problem pr;
    pr.name = "rosenbrock";
    pr.dim = dim;
    pr.f_star_hint = 0.0;
    pr.theta0.resize(dim);
    for (std::size_t i = 0; i < dim; i += 2) {
        pr.theta0[i] = -1.2;
        pr.theta0[i + 1] = 1.0;
    }
    pr.value = [](const Vec& th) {
        double f = 0.0;
        for (std::size_t i = 0; i + 1 < th.size(); i += 2) {
            double x = th[i], y = th[i + 1];
            double r = y - x * x;
            f += 100.0 * r * r + (1.0 - x) * (1.0 - x);
        }
        return f;
    };
    pr.grad = [](const Vec& th) {
        Vec g(th.size(), 0.0);
        for (std::size_t i = 0; i + 1 < th.size(); i += 2) {
            double x = th[i], y = th[i + 1];
            double r = y - x * x;
            g[i] = -400.0 * x * r - 2.0 * (1.0 - x);
            g[i + 1] = 200.0 * r;
        }
        return g;
    };
    return pr;
}

namespace detail {

// Parameter layout: W1 (hidden x in, row-major), b1, W2 (classes x hidden,
// row-major), b2. tanh hidden layer, softmax cross-entropy output.
struct MlpShape {
    std::size_t in, hidden, classes;
    std::size_t w1() const { return 0; }
    std::size_t b1() const { return hidden * in; }
    std::size_t w2() const { return b1() + hidden; }
    std::size_t b2() const { return w2() + classes * hidden; }
    std::size_t dim() const { return b2() + classes; }
};

// Forward + backward for one sample; adds the sample loss to *loss and the
// sample gradient into g (when g != nullptr).
inline void mlp_sample(const MlpShape& sh, const Dataset& d, const Vec& th,
                       std::size_t row, double* loss, Vec* g,
                       std::uint32_t* pred = nullptr) {
    std::vector<double> h(sh.hidden), a(sh.hidden);
    for (std::size_t k = 0; k < sh.hidden; ++k) {
        double z = th[sh.b1() + k];
        for (std::size_t j = 0; j < sh.in; ++j)
            z += th[sh.w1() + k * sh.in + j] * d.feature(row, j);
        a[k] = z;
        h[k] = std::tanh(z);
    }
    std::vector<double> logits(sh.classes);
    double zmax = -1e300;
    for (std::size_t c = 0; c < sh.classes; ++c) {
        double z = th[sh.b2() + c];
        for (std::size_t k = 0; k < sh.hidden; ++k)
            z += th[sh.w2() + c * sh.hidden + k] * h[k];
        logits[c] = z;
        zmax = std::max(zmax, z);
    }
    double lse = 0.0;
    for (double z : logits) lse += std::exp(z - zmax);
    lse = zmax + std::log(lse);
    std::uint32_t y = d.labels[row];
    if (loss) *loss += lse - logits[y];
    if (pred) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < sh.classes; ++c)
            if (logits[c] > logits[best]) best = c;
        *pred = static_cast<std::uint32_t>(best);
    }
    if (!g) return;

    std::vector<double> dlogit(sh.classes);
    for (std::size_t c = 0; c < sh.classes; ++c)
        dlogit[c] = std::exp(logits[c] - lse) - (c == y ? 1.0 : 0.0);
    std::vector<double> dh(sh.hidden, 0.0);
    for (std::size_t c = 0; c < sh.classes; ++c) {
        (*g)[sh.b2() + c] += dlogit[c];
        for (std::size_t k = 0; k < sh.hidden; ++k) {
            (*g)[sh.w2() + c * sh.hidden + k] += dlogit[c] * h[k];
            dh[k] += dlogit[c] * th[sh.w2() + c * sh.hidden + k];
        }
    }
    for (std::size_t k = 0; k < sh.hidden; ++k) {
        double da = dh[k] * (1.0 - h[k] * h[k]);
        (*g)[sh.b1() + k] += da;
        for (std::size_t j = 0; j < sh.in; ++j)
            (*g)[sh.w1() + k * sh.in + j] += da * d.feature(row, j);
    }
}

}  // namespace detail

// One-hidden-layer tanh network with softmax cross-entropy. init_seed
// controls the (small, Gaussian) starting point; init_seed with scale 0
// would make tanh units symmetric and untrainable.
inline Problem mlp_problem(Dataset data, std::size_t hidden, std::uint64_t init_seed = 0,
                           double init_scale = 0.2) {
    if (hidden < 1) throw Error("mlp_problem: hidden must be >= 1");
    if (data.n_features == 0 || data.n_classes < 2)
        throw Error("mlp_problem: dataset shape mismatch");
    auto ds = std::make_shared<Dataset>(std::move(data));
    detail::MlpShape sh{ds->n_features, hidden, ds->n_classes};

    Problem pr;
    pr.name = "mlp";
    pr.dim = sh.dim();
    pr.n_samples = ds->n_samples;
    pr.theta0.resize(sh.dim());
    Rng rng = Rng::derived(init_seed, /*stream=*/0x6d6c70ULL);
    for (double& w : pr.theta0) w = init_scale * rng.normal();

    pr.value = [ds, sh](const Vec& th) {
        if (th.size() != sh.dim()) throw DimMismatchError("mlp value: wrong theta dim");
        double loss = 0.0;
        for (std::size_t i = 0; i < ds->n_samples; ++i)
            detail::mlp_sample(sh, *ds, th, i, &loss, nullptr);
        return loss / static_cast<double>(ds->n_samples);
    };
    pr.grad = [ds, sh](const Vec& th) {
        if (th.size() != sh.dim()) throw DimMismatchError("mlp grad: wrong theta dim");
        Vec g(sh.dim(), 0.0);
        for (std::size_t i = 0; i < ds->n_samples; ++i)
            detail::mlp_sample(sh, *ds, th, i, nullptr, &g);
        double inv = 1.0 / static_cast<double>(ds->n_samples);
        for (double& x : g) x *= inv;
        return g;
    };
    pr.batch_grad = [ds, sh](const Vec& th, const std::vector<std::uint32_t>& idx) {
        Vec g(sh.dim(), 0.0);
        for (std::uint32_t i : idx) detail::mlp_sample(sh, *ds, th, i, nullptr, &g);
        double inv = 1.0 / static_cast<double>(idx.size());
        for (double& x : g) x *= inv;
        return g;
    };
    pr.accuracy = [sh](const Vec& th, const Dataset& d) {
        std::size_t hit = 0;
        for (std::size_t i = 0; i < d.n_samples; ++i) {
            std::uint32_t pred = 0;
            detail::mlp_sample(sh, d, th, i, nullptr, nullptr, &pred);
            hit += pred == d.labels[i];
        }
        return static_cast<double>(hit) / static_cast<double>(d.n_samples);
    };
    return pr;
}

// Central-difference gradient, the verification oracle for Problem::grad.
inline Vec fd_gradient(const Problem& problem, const Vec& theta, double h = 1e-5) {
    if (!(h > 0.0)) throw Error("fd_gradient: h must be > 0");
    Vec g(theta.size());
    Vec t = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double orig = t[i];
        t[i] = orig + h;
        double fp = problem.value(t);
        t[i] = orig - h;
        double fm = problem.value(t);
        t[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace stacey
