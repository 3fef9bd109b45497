#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "stacey/geometry.hpp"
#include "stacey/pnorm.hpp"
#include "stacey/schedule.hpp"

namespace stacey {

struct HyperParams {
    PNorm p = PNorm(2.0);
    double eta = 0.01;       // base learning rate
    double alpha = 0.1;      // dual step
    double tau = 0.0;        // primal-dual coupling weight
    double beta1 = 0.9;      // momentum interpolation
    double beta2 = 0.99;     // momentum decay
    double lambda = 0.0;     // decoupled weight decay
    double eps = 0.0;        // scaling-map regularizer
    double adam_eps = 1e-8;  // Adam-family denominator guard
    Schedule schedule;

    void validate() const {
        if (!(eta > 0.0)) throw ConfigError("HyperParams: eta must be > 0");
        if (!(alpha > 0.0)) throw ConfigError("HyperParams: alpha must be > 0");
        if (tau < 0.0 || tau > 1.0) throw ConfigError("HyperParams: tau must be in [0,1]");
        if (beta1 < 0.0 || beta1 >= 1.0) throw ConfigError("HyperParams: beta1 must be in [0,1)");
        if (beta2 < 0.0 || beta2 >= 1.0) throw ConfigError("HyperParams: beta2 must be in [0,1)");
        if (lambda < 0.0) throw ConfigError("HyperParams: lambda must be >= 0");
        if (eps < 0.0) throw ConfigError("HyperParams: eps must be >= 0");
        schedule.validate();
    }

    double eta_t(long t) const { return schedule.multiplier(t) * eta; }
};

struct OptimizerState {
    Vec m;  // momentum buffer
    Vec z;  // dual / mirror iterate
    Vec v;  // second moment (Adam family)
    long step = 0;

    // Default init keeps z at the starting point so the tau-interpolation at
    // t=0 stays near theta0. strict_zero_init zeroes everything, matching
    // the all-zero reference initialization; the first-step closed-form tests use it.
    static OptimizerState init(const Vec& theta0, bool strict_zero_init = false) {
        OptimizerState s;
        s.m.assign(theta0.size(), 0.0);
        s.v.assign(theta0.size(), 0.0);
        s.z = strict_zero_init ? Vec(theta0.size(), 0.0) : theta0;
        s.step = 0;
        return s;
    }
};

namespace detail {

constexpr double kDivergenceLimit = 1e12;

inline void check_iterate(const Vec& theta, const char* who) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!std::isfinite(theta[i]) || std::fabs(theta[i]) > kDivergenceLimit)
            throw DivergenceError(std::string(who) + ": iterate diverged at coordinate " +
                                  std::to_string(i));
    }
}

}  // namespace detail

// Algorithm: theta' = theta - eta_t * s(g~).
inline Vec lp_descent_step(const Vec& theta, const Vec& g_tilde, const HyperParams& hp,
                           OptimizerState& state) {
    check_same_dim(theta, g_tilde, "lp_descent_step");
    double eta = hp.eta_t(state.step);
    Vec s = scale_map(g_tilde, hp.p);
    Vec out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] - eta * s[i];
    detail::check_iterate(out, "lp_descent_step");
    ++state.step;
    return out;
}

namespace detail {

// Shared body of the two Stacey variants; the dual update differs.
template <typename DualUpdate>
Vec stacey_step(const Vec& theta, const Vec& g_tilde, const HyperParams& hp,
                OptimizerState& state, DualUpdate&& update_z, const char* who) {
    check_same_dim(theta, g_tilde, who);
    check_same_dim(theta, state.m, who);
    check_same_dim(theta, state.z, who);
    double eta = hp.eta_t(state.step);

    Vec c(theta.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * g_tilde[i];

    Vec s = scale_map_eps(c, hp.p, hp.eps);
    update_z(state.z, c);

    Vec out(theta.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double y = theta[i] - eta * s[i];
        out[i] = hp.tau * state.z[i] + (1.0 - hp.tau) * y - eta * hp.lambda * theta[i];
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        state.m[i] = hp.beta2 * state.m[i] + (1.0 - hp.beta2) * g_tilde[i];

    check_iterate(out, who);
    ++state.step;
    return out;
}

}  // namespace detail

// Stacey(p,2): Euclidean dual path z <- z - alpha*c.
inline Vec stacey_p2_step(const Vec& theta, const Vec& g_tilde, const HyperParams& hp,
                          OptimizerState& state) {
    return detail::stacey_step(
        theta, g_tilde, hp, state,
        [&](Vec& z, const Vec& c) {
            for (std::size_t i = 0; i < z.size(); ++i) z[i] -= hp.alpha * c[i];
        },
        "stacey_p2_step");
}

// Stacey(p,p): mirror dual path z <- s^eps(mirror_grad(z) - alpha*c).
inline Vec stacey_pp_step(const Vec& theta, const Vec& g_tilde, const HyperParams& hp,
                          OptimizerState& state) {
    if (hp.p.is_inf())
        throw UnsupportedExponentError("stacey_pp_step: mirror step requires finite p");
    return detail::stacey_step(
        theta, g_tilde, hp, state,
        [&](Vec& z, const Vec& c) {
            Vec w = mirror_grad(z, hp.p);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= hp.alpha * c[i];
            z = scale_map_eps(w, hp.p, hp.eps);
        },
        "stacey_pp_step");
}

// Heavy-ball SGD with coupled L2 decay: m <- beta2*m + (g + lambda*theta),
// theta' = theta - eta_t*m.
inline Vec sgd_momentum_step(const Vec& theta, const Vec& g_tilde, const HyperParams& hp,
                             OptimizerState& state) {
    check_same_dim(theta, g_tilde, "sgd_momentum_step");
    double eta = hp.eta_t(state.step);
    Vec out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double g = g_tilde[i] + hp.lambda * theta[i];
        state.m[i] = hp.beta1 * state.m[i] + g;
        out[i] = theta[i] - eta * state.m[i];
    }
    detail::check_iterate(out, "sgd_momentum_step");
    ++state.step;
    return out;
}

namespace detail {

inline Vec adam_family_step(const Vec& theta, const Vec& g_tilde, const HyperParams& hp,
                            OptimizerState& state, bool decoupled, const char* who) {
    check_same_dim(theta, g_tilde, who);
    double eta = hp.eta_t(state.step);
    long t = state.step + 1;
    double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(t));
    Vec out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double g = decoupled ? g_tilde[i] : g_tilde[i] + hp.lambda * theta[i];
        state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * g;
        state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * g * g;
        double mhat = state.m[i] / bc1;
        double vhat = state.v[i] / bc2;
        out[i] = theta[i] - eta * mhat / (std::sqrt(vhat) + hp.adam_eps);
        if (decoupled) out[i] -= eta * hp.lambda * theta[i];
    }
    check_iterate(out, who);
    ++state.step;
    return out;
}

}  // namespace detail

inline Vec adam_step(const Vec& theta, const Vec& g_tilde, const HyperParams& hp,
                     OptimizerState& state) {
    return detail::adam_family_step(theta, g_tilde, hp, state, false, "adam_step");
}

inline Vec adamw_step(const Vec& theta, const Vec& g_tilde, const HyperParams& hp,
                      OptimizerState& state) {
    return detail::adam_family_step(theta, g_tilde, hp, state, true, "adamw_step");
}

// Lion: sign of the beta1-interpolated momentum, decoupled decay.
inline Vec lion_step(const Vec& theta, const Vec& g_tilde, const HyperParams& hp,
                     OptimizerState& state) {
    check_same_dim(theta, g_tilde, "lion_step");
    double eta = hp.eta_t(state.step);
    Vec out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double c = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * g_tilde[i];
        out[i] = theta[i] - eta * (detail::sgn(c) + hp.lambda * theta[i]);
        state.m[i] = hp.beta2 * state.m[i] + (1.0 - hp.beta2) * g_tilde[i];
    }
    detail::check_iterate(out, "lion_step");
    ++state.step;
    return out;
}

enum class Method {
    LpDescent,
    StaceyP2,
    StaceyPP,
    SgdMomentum,
    Adam,
    AdamW,
    Lion,
};

inline Method method_from_name(const std::string& name) {
    if (name == "lp_descent") return Method::LpDescent;
    if (name == "stacey_p2") return Method::StaceyP2;
    if (name == "stacey_pp") return Method::StaceyPP;
    if (name == "sgd_momentum") return Method::SgdMomentum;
    if (name == "adam") return Method::Adam;
    if (name == "adamw") return Method::AdamW;
    if (name == "lion") return Method::Lion;
    throw ConfigError("unknown optimizer name: " + name);
}

inline const char* method_name(Method m) {
    switch (m) {
        case Method::LpDescent: return "lp_descent";
        case Method::StaceyP2: return "stacey_p2";
        case Method::StaceyPP: return "stacey_pp";
        case Method::SgdMomentum: return "sgd_momentum";
        case Method::Adam: return "adam";
        case Method::AdamW: return "adamw";
        case Method::Lion: return "lion";
    }
    return "?";
}

inline Vec optimizer_step(Method m, const Vec& theta, const Vec& g_tilde,
                          const HyperParams& hp, OptimizerState& state) {
    switch (m) {
        case Method::LpDescent: return lp_descent_step(theta, g_tilde, hp, state);
        case Method::StaceyP2: return stacey_p2_step(theta, g_tilde, hp, state);
        case Method::StaceyPP: return stacey_pp_step(theta, g_tilde, hp, state);
        case Method::SgdMomentum: return sgd_momentum_step(theta, g_tilde, hp, state);
        case Method::Adam: return adam_step(theta, g_tilde, hp, state);
        case Method::AdamW: return adamw_step(theta, g_tilde, hp, state);
        case Method::Lion: return lion_step(theta, g_tilde, hp, state);
    }
    throw Error("optimizer_step: unreachable");
}

enum class FirstStepMethod { Lion, StaceyP2 };

// The two displayed first-iterate formulas, evaluated directly (no stepper);
// serves as an oracle against the steppers started from the all-zero init.
inline Vec first_step_closed_form(FirstStepMethod method, const Vec& g0,
                                  const HyperParams& hp) {
    check_finite(g0, "first_step_closed_form");
    Vec out(g0.size());
    if (method == FirstStepMethod::Lion) {
        for (std::size_t i = 0; i < g0.size(); ++i)
            out[i] = -hp.eta * detail::sgn((1.0 - hp.beta1) * g0[i]);
        return out;
    }
    Vec c(g0.size());
    for (std::size_t i = 0; i < g0.size(); ++i) c[i] = (1.0 - hp.beta1) * g0[i];
    Vec s = scale_map_eps(c, hp.p, hp.eps);
    for (std::size_t i = 0; i < g0.size(); ++i)
        out[i] = -(1.0 - hp.tau) * hp.eta * s[i] - hp.tau * hp.alpha * c[i];
    return out;
}

}  // namespace stacey
