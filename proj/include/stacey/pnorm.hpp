#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "stacey/errors.hpp"

namespace stacey {

// Exponent p in [2, inf]. Infinity is a distinct sentinel, never a large
// float: the infinite branch has its own code paths (sign semantics).
class PNorm {
  public:
    explicit PNorm(double p) : p_(p), inf_(false) {
        if (!(p >= 2.0) || std::isinf(p) || std::isnan(p))
            throw Error("PNorm: p must be a finite real >= 2, got " + std::to_string(p));
    }

    static PNorm infinity() {
        PNorm q;
        return q;
    }

    bool is_inf() const { return inf_; }

    double value() const {
        if (inf_) throw UnsupportedExponentError("PNorm: finite value requested for p=inf");
        return p_;
    }

    // p/(p-1); 1 at the inf sentinel, 2 at p=2.
    double dual() const { return inf_ ? 1.0 : p_ / (p_ - 1.0); }

    // (p-2)/(p-1) in [0,1); 0 at p=2, 1 at the inf sentinel.
    double scale_exponent() const { return inf_ ? 1.0 : (p_ - 2.0) / (p_ - 1.0); }

    bool operator==(const PNorm& o) const {
        return inf_ == o.inf_ && (inf_ || p_ == o.p_);
    }

    std::string str() const { return inf_ ? "inf" : std::to_string(p_); }

  private:
    PNorm() : p_(std::numeric_limits<double>::infinity()), inf_(true) {}
    double p_;
    bool inf_;
};

inline double dual_exponent(const PNorm& p) { return p.dual(); }

}  // namespace stacey
