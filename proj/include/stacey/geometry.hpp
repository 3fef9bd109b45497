#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "stacey/errors.hpp"
#include "stacey/pnorm.hpp"

namespace stacey {

using Vec = std::vector<double>;

inline void check_finite(const Vec& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]))
            throw InvalidVectorError(std::string(what) + ": non-finite entry at coordinate " +
                                     std::to_string(i));
}

inline void check_same_dim(const Vec& a, const Vec& b, const char* what) {
    if (a.size() != b.size())
        throw DimMismatchError(std::string(what) + ": dim " + std::to_string(a.size()) +
                               " vs " + std::to_string(b.size()));
}

namespace detail {

// Magnitudes below this are treated as exact zeros before exponentiation;
// negative exponents on denormals would otherwise produce Inf.
constexpr double kUnderflowFloor = 1e-300;

// |x|^alpha via exp(alpha*ln|x|), with the underflow floor.
inline double pow_abs(double x, double alpha) {
    double a = std::fabs(x);
    if (a < kUnderflowFloor) return 0.0;
    if (alpha == 1.0) return a;
    return std::exp(alpha * std::log(a));
}

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

// (sum |v_i|^q)^(1/q), max|v_i| for q=inf. The largest magnitude is factored
// out before exponentiating so intermediate sums cannot overflow.
inline double lp_norm(const Vec& v, double q) {
    check_finite(v, "lp_norm");
    if (!(q >= 1.0)) throw Error("lp_norm: q must be >= 1");
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    if (m == 0.0) return 0.0;
    if (std::isinf(q)) return m;
    double acc = 0.0;
    for (double x : v) acc += detail::pow_abs(x / m, q);
    return m * detail::pow_abs(acc, 1.0 / q);
}

inline double lp_norm(const Vec& v, const PNorm& p) {
    return p.is_inf() ? lp_norm(v, std::numeric_limits<double>::infinity())
                      : lp_norm(v, p.value());
}

// Dual-norm evaluation ||v||_{p*}.
inline double dual_norm(const Vec& v, const PNorm& p) { return lp_norm(v, p.dual()); }

// Steepest-descent scaling map: s_i(x) = sgn(x_i)|x_i|^{1/(p-1)}.
// s(0)=0 by continuous extension; p=inf is the coordinate sign map.
inline Vec scale_map(const Vec& x, const PNorm& p) {
    check_finite(x, "scale_map");
    Vec out(x.size());
    if (p.is_inf()) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = detail::sgn(x[i]);
        return out;
    }
    if (p.value() == 2.0) return x;  // identity, kept bit-exact
    double inv = 1.0 / (p.value() - 1.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = detail::sgn(x[i]) * detail::pow_abs(x[i], inv);
    return out;
}

// Regularized form: x_i / (|x_i|^{(p-2)/(p-1)} + eps).
// eps=0 at x_i=0 yields 0 (same convention as scale_map).
inline Vec scale_map_eps(const Vec& x, const PNorm& p, double eps) {
    check_finite(x, "scale_map_eps");
    if (eps < 0.0) throw Error("scale_map_eps: eps must be >= 0");
    if (eps == 0.0) return scale_map(x, p);
    double e = p.scale_exponent();
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double denom = detail::pow_abs(x[i], e) + eps;
        out[i] = x[i] / denom;
    }
    return out;
}

// Gradient of the distance generating function (1/p)||.||_p^p:
// coordinate-wise |z_i|^{p-2} z_i. Finite p only.
inline Vec mirror_grad(const Vec& z, const PNorm& p) {
    if (p.is_inf())
        throw UnsupportedExponentError("mirror_grad: not defined at p=inf");
    check_finite(z, "mirror_grad");
    if (p.value() == 2.0) return z;  // identity, kept bit-exact
    double e = p.value() - 2.0;
    Vec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        out[i] = detail::pow_abs(z[i], e) * z[i];
    return out;
}

// ||g||_{p*}^{p*} = sum |g_i|^{p/(p-1)}; ||g||_1 for p=inf.
inline double stationarity_measure(const Vec& g, const PNorm& p) {
    check_finite(g, "stationarity_measure");
    double acc = 0.0;
    if (p.is_inf()) {
        for (double x : g) acc += std::fabs(x);
        return acc;
    }
    double q = p.dual();
    for (double x : g) acc += detail::pow_abs(x, q);
    return acc;
}

}  // namespace stacey
