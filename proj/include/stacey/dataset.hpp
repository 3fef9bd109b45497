#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "stacey/errors.hpp"
#include "stacey/rng.hpp"

namespace stacey {

struct Dataset {
    std::uint32_t n_samples = 0;
    std::uint32_t n_features = 0;
    std::uint32_t n_classes = 0;
    std::vector<float> features;         // row-major, n_samples x n_features
    std::vector<std::uint32_t> labels;   // in [0, n_classes)

    double feature(std::size_t row, std::size_t col) const {
        return features[row * n_features + col];
    }
};

// DSB1 binary format (little-endian): magic "DSB1", u32 n_samples,
// u32 n_features, u32 n_classes, f32 features row-major, u32 labels.
inline void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_dataset: cannot open " + path);
    out.write("DSB1", 4);
    auto put_u32 = [&](std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), 4);
    };
    put_u32(d.n_samples);
    put_u32(d.n_features);
    put_u32(d.n_classes);
    out.write(reinterpret_cast<const char*>(d.features.data()),
              static_cast<std::streamsize>(d.features.size() * sizeof(float)));
    out.write(reinterpret_cast<const char*>(d.labels.data()),
              static_cast<std::streamsize>(d.labels.size() * sizeof(std::uint32_t)));
    if (!out) throw IoError("save_dataset: write failed for " + path);
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_dataset: cannot open " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "DSB1", 4) != 0)
        throw IoError("load_dataset: bad magic in " + path);
    auto get_u32 = [&](const char* what) {
        std::uint32_t v;
        if (!in.read(reinterpret_cast<char*>(&v), 4))
            throw IoError(std::string("load_dataset: truncated file reading ") + what);
        return v;
    };
    Dataset d;
    d.n_samples = get_u32("n_samples");
    d.n_features = get_u32("n_features");
    d.n_classes = get_u32("n_classes");
    d.features.resize(static_cast<std::size_t>(d.n_samples) * d.n_features);
    d.labels.resize(d.n_samples);
    if (!in.read(reinterpret_cast<char*>(d.features.data()),
                 static_cast<std::streamsize>(d.features.size() * sizeof(float))))
        throw IoError("load_dataset: truncated feature block in " + path);
    if (!in.read(reinterpret_cast<char*>(d.labels.data()),
                 static_cast<std::streamsize>(d.labels.size() * sizeof(std::uint32_t))))
        throw IoError("load_dataset: truncated label block in " + path);
    for (float f : d.features)
        if (!std::isfinite(f)) throw IoError("load_dataset: non-finite feature in " + path);
    for (std::uint32_t l : d.labels)
        if (l >= d.n_classes)
            throw IoError("load_dataset: label out of range in " + path);
    return d;
}

// Two isotropic Gaussian blobs at +/-mu, stratified 50/50 (class i gets
// sample slots i < n/2 and i >= n/2 after an interleaved layout).
inline Dataset generate_two_gaussians(std::uint32_t n, std::uint64_t seed,
                                      std::uint32_t n_features = 2, double mu = 1.5,
                                      double sigma = 1.0) {
    if (n < 2) throw ConfigError("generate_two_gaussians: n must be >= 2");
    Dataset d;
    d.n_samples = n;
    d.n_features = n_features;
    d.n_classes = 2;
    d.features.resize(static_cast<std::size_t>(n) * n_features);
    d.labels.resize(n);
    Rng rng = Rng::derived(seed, /*stream=*/0x6761757373ULL);
    std::uint32_t half = n / 2;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t cls = i < half ? 0u : 1u;
        double center = cls == 0 ? -mu : mu;
        d.labels[i] = cls;
        for (std::uint32_t j = 0; j < n_features; ++j)
            d.features[static_cast<std::size_t>(i) * n_features + j] =
                static_cast<float>(center + sigma * rng.normal());
    }
    return d;
}

// Classic two interleaved half circles with Gaussian jitter.
inline Dataset generate_two_moons(std::uint32_t n, std::uint64_t seed,
                                  double noise = 0.1) {
    if (n < 2) throw ConfigError("generate_two_moons: n must be >= 2");
    Dataset d;
    d.n_samples = n;
    d.n_features = 2;
    d.n_classes = 2;
    d.features.resize(static_cast<std::size_t>(n) * 2);
    d.labels.resize(n);
    Rng rng = Rng::derived(seed, /*stream=*/0x6d6f6f6e73ULL);
    std::uint32_t half = n / 2;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t cls = i < half ? 0u : 1u;
        double t = M_PI * rng.uniform();
        double x, y;
        if (cls == 0) {
            x = std::cos(t);
            y = std::sin(t);
        } else {
            x = 1.0 - std::cos(t);
            y = 0.5 - std::sin(t);
        }
        d.features[static_cast<std::size_t>(i) * 2 + 0] =
            static_cast<float>(x + noise * rng.normal());
        d.features[static_cast<std::size_t>(i) * 2 + 1] =
            static_cast<float>(y + noise * rng.normal());
        d.labels[i] = cls;
    }
    return d;
}

inline Dataset generate_synthetic(const std::string& kind, std::uint32_t n,
                                  std::uint64_t seed) {
    if (kind == "two-gaussians") return generate_two_gaussians(n, seed);
    if (kind == "two-moons") return generate_two_moons(n, seed);
    throw ConfigError("generate_synthetic: unknown kind " + kind);
}

}  // namespace stacey
