#pragma once

#include <cmath>
#include <string>

#include "stacey/errors.hpp"

namespace stacey {

// Multiplier on the base learning rate; eta_t = multiplier(t) * eta.
// Warmup ramps linearly (never reaching an exact zero), cosine decays from
// 1 to floor_fraction over the remaining steps.
struct Schedule {
    enum class Kind { Constant, Cosine, CosineWarmup };

    Kind kind = Kind::Constant;
    long total_steps = 0;
    long warmup_steps = 0;
    double floor_fraction = 0.0;

    static Schedule constant() { return Schedule{}; }

    static Schedule cosine(long total, double floor_frac = 0.0) {
        Schedule s;
        s.kind = Kind::Cosine;
        s.total_steps = total;
        s.floor_fraction = floor_frac;
        s.validate();
        return s;
    }

    static Schedule cosine_warmup(long total, long warmup, double floor_frac = 0.0) {
        Schedule s;
        s.kind = Kind::CosineWarmup;
        s.total_steps = total;
        s.warmup_steps = warmup;
        s.floor_fraction = floor_frac;
        s.validate();
        return s;
    }

    void validate() const {
        if (kind != Kind::Constant && total_steps < 1)
            throw ConfigError("Schedule: total_steps must be >= 1");
        if (warmup_steps < 0 || warmup_steps > total_steps)
            throw ConfigError("Schedule: warmup_steps out of range");
        if (floor_fraction < 0.0 || floor_fraction > 1.0)
            throw ConfigError("Schedule: floor_fraction must be in [0,1]");
    }

    double multiplier(long t) const {
        switch (kind) {
            case Kind::Constant:
                return 1.0;
            case Kind::Cosine:
                return cosine_mult(t, 0);
            case Kind::CosineWarmup:
                if (t < warmup_steps)
                    return static_cast<double>(t + 1) / static_cast<double>(warmup_steps);
                return cosine_mult(t, warmup_steps);
        }
        return 1.0;
    }

  private:
    double cosine_mult(long t, long start) const {
        long span = total_steps - start;
        if (span <= 1) return 1.0;
        double frac = static_cast<double>(t - start) / static_cast<double>(span);
        if (frac > 1.0) frac = 1.0;
        double c = 0.5 * (1.0 + std::cos(M_PI * frac));
        return floor_fraction + (1.0 - floor_fraction) * c;
    }
};

inline Schedule::Kind schedule_kind_from_name(const std::string& name) {
    if (name == "constant") return Schedule::Kind::Constant;
    if (name == "cosine") return Schedule::Kind::Cosine;
    if (name == "cosine-with-warmup") return Schedule::Kind::CosineWarmup;
    throw ConfigError("unknown schedule kind: " + name);
}

}  // namespace stacey
