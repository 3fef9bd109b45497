#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stacey/errors.hpp"
#include "stacey/optimizers.hpp"
#include "stacey/pnorm.hpp"

namespace stacey {

// Flat key/value config with dotted sections:
//
//   [problem]
//   name = "logistic"        # string
//   l2_reg = 0.01            # number
//   [run]
//   seeds = [1, 2, 3]        # integer list
//
// Keys resolve to "section.key". Later assignments override earlier ones.
class ConfigMap {
  public:
    static ConfigMap parse(const std::string& text) {
        ConfigMap cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": unterminated section header");
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": empty section name");
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty() || val.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty key or value");
            std::string full = section.empty() ? key : section + "." + key;
            cfg.values_[full] = val;
        }
        return cfg;
    }

    static ConfigMap parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    void set(const std::string& key, const std::string& raw) { values_[key] = raw; }

    // Sets only if absent; presets use this so explicit keys win.
    void set_default(const std::string& key, const std::string& raw) {
        values_.emplace(key, raw);
    }

    std::string raw(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing config key: " + key);
        return it->second;
    }

    std::string get_string(const std::string& key) const {
        std::string v = raw(key);
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            return v.substr(1, v.size() - 2);
        return v;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        return has(key) ? get_string(key) : fallback;
    }

    double get_double(const std::string& key) const {
        return parse_double(raw(key), key);
    }

    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    long get_long(const std::string& key) const {
        std::string v = raw(key);
        std::size_t pos = 0;
        long out;
        try {
            out = std::stol(v, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": not an integer: " + v);
        }
        if (pos != v.size())
            throw ConfigError("config key " + key + ": not an integer: " + v);
        return out;
    }

    long get_long(const std::string& key, long fallback) const {
        return has(key) ? get_long(key) : fallback;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        std::string v = raw(key);
        if (v == "true") return true;
        if (v == "false") return false;
        throw ConfigError("config key " + key + ": expected true/false, got " + v);
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        for (const std::string& item : split_list(raw(key), key))
            out.push_back(parse_double(item, key));
        return out;
    }

    std::vector<std::uint64_t> get_u64_list(const std::string& key) const {
        std::vector<std::uint64_t> out;
        for (const std::string& item : split_list(raw(key), key)) {
            try {
                out.push_back(std::stoull(item));
            } catch (const std::exception&) {
                throw ConfigError("config key " + key + ": not an integer: " + item);
            }
        }
        return out;
    }

    // Canonical sorted key=value text; basis for the config hash and the
    // round-trip property.
    std::string canonical() const {
        std::ostringstream ss;
        for (const auto& [k, v] : values_) ss << k << " = " << v << "\n";
        return ss.str();
    }

    std::string hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : canonical()) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    static std::string strip_comment(const std::string& s) {
        bool in_quote = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_quote = !in_quote;
            if (s[i] == '#' && !in_quote) return s.substr(0, i);
        }
        return s;
    }

    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    static double parse_double(const std::string& v, const std::string& key) {
        std::size_t pos = 0;
        double out;
        try {
            out = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": not a number: " + v);
        }
        if (pos != v.size())
            throw ConfigError("config key " + key + ": not a number: " + v);
        return out;
    }

    static std::vector<std::string> split_list(const std::string& v, const std::string& key) {
        std::string s = trim(v);
        if (s.size() < 2 || s.front() != '[' || s.back() != ']')
            throw ConfigError("config key " + key + ": expected [a, b, ...], got " + v);
        s = s.substr(1, s.size() - 2);
        std::vector<std::string> out;
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    std::map<std::string, std::string> values_;
};

// Named hyperparameter presets from the published grid searches (CIFAR /
// ImageNet / LLM rows). Applied as defaults; explicit keys in the config
// override them.
inline void apply_preset(ConfigMap& cfg, const std::string& name) {
    struct P {
        const char* name;
        const char* optimizer;
        const char* p;  // nullptr for the Euclidean baselines
        double lr, alpha, beta1, beta2, lambda, tau, eps;
    };
    static const P table[] = {
        // CIFAR (batch 128, cosine decay)
        {"cifar-sgdm", "sgd_momentum", nullptr, 0.02, 0, 0.9, 0, 0.0002, 0, 0},
        {"cifar-adam", "adam", nullptr, 0.001, 0, 0.9, 0.999, 0.0005, 0, 1e-8},
        {"cifar-adamw", "adamw", nullptr, 0.01, 0, 0.9, 0.999, 0.0005, 0, 1e-8},
        {"cifar-lion", "lion", nullptr, 0.001, 0, 0.9, 0.99, 0.01, 0, 0},
        {"cifar-stacey-pp", "stacey_pp", "2", 0.1, 0.1, 0.9, 0.99, 0.01, 0.001, 1e-12},
        {"cifar-stacey-p2", "stacey_p2", "2", 0.1, 0.1, 0.9, 0.99, 0.01, 0.001, 1e-12},
        // ImageNet (batch 256, cosine decay)
        {"imagenet-sgdm", "sgd_momentum", nullptr, 0.01, 0, 0.9, 0, 0.0005, 0, 0},
        {"imagenet-adamw", "adamw", nullptr, 0.002, 0, 0.9, 0.999, 0.005, 0, 1e-4},
        {"imagenet-lion", "lion", nullptr, 3e-4, 0, 0.9, 0.99, 0.01, 0, 0},
        {"imagenet-stacey-pp", "stacey_pp", "3", 0.01, 0.001, 0.9, 0.999, 0.001, 0.001, 1e-8},
        {"imagenet-stacey-p2", "stacey_p2", "2.8", 0.01, 0.001, 0.9, 0.999, 0.001, 0.001, 1e-8},
        // LLM pretraining (batch 16, cosine decay)
        {"llm-sgdm", "sgd_momentum", nullptr, 0.01, 0, 0.9, 0, 0.0005, 0, 0},
        {"llm-adam", "adam", nullptr, 0.0001, 0, 0.9, 0.999, 0.01, 0, 1e-8},
        {"llm-adamw", "adamw", nullptr, 0.0001, 0, 0.9, 0.999, 0.05, 0, 1e-8},
        {"llm-lion", "lion", nullptr, 0.05, 0, 0.9, 0.999, 0.01, 0, 0},
        {"llm-stacey-pp", "stacey_pp", "3", 0.01, 0.1, 0.9, 0.99, 0.01, 0.001, 1e-8},
        {"llm-stacey-p2", "stacey_p2", "2.8", 0.01, 0.1, 0.9, 0.99, 0.0005, 0.001, 1e-8},
    };
    for (const P& row : table) {
        if (name != row.name) continue;
        auto num = [](double x) {
            std::ostringstream ss;
            ss.precision(17);
            ss << x;
            return ss.str();
        };
        cfg.set_default("optimizer.name", row.optimizer);
        if (row.p) cfg.set_default("optimizer.p", row.p);
        cfg.set_default("optimizer.eta", num(row.lr));
        if (row.alpha > 0) cfg.set_default("optimizer.alpha", num(row.alpha));
        cfg.set_default("optimizer.beta1", num(row.beta1));
        if (row.beta2 > 0) cfg.set_default("optimizer.beta2", num(row.beta2));
        cfg.set_default("optimizer.lambda", num(row.lambda));
        if (row.tau > 0) cfg.set_default("optimizer.tau", num(row.tau));
        if (row.eps > 0) cfg.set_default("optimizer.eps", num(row.eps));
        cfg.set_default("optimizer.schedule", "cosine");
        return;
    }
    throw ConfigError("unknown preset: " + name);
}

inline PNorm pnorm_from_config(const ConfigMap& cfg, const std::string& key,
                               double fallback = 2.0) {
    if (!cfg.has(key)) return PNorm(fallback);
    std::string v = cfg.get_string(key);
    if (v == "inf" || v == "infinity") return PNorm::infinity();
    return PNorm(cfg.get_double(key));
}

inline HyperParams hyperparams_from_config(const ConfigMap& cfg, long total_steps) {
    HyperParams hp;
    hp.p = pnorm_from_config(cfg, "optimizer.p");
    hp.eta = cfg.get_double("optimizer.eta", 0.01);
    hp.alpha = cfg.get_double("optimizer.alpha", 0.1);
    hp.tau = cfg.get_double("optimizer.tau", 0.0);
    hp.beta1 = cfg.get_double("optimizer.beta1", 0.9);
    hp.beta2 = cfg.get_double("optimizer.beta2", 0.99);
    hp.lambda = cfg.get_double("optimizer.lambda", 0.0);
    hp.eps = cfg.get_double("optimizer.eps", 0.0);
    hp.adam_eps = cfg.get_double("optimizer.adam_eps", 1e-8);
    std::string kind = cfg.get_string("optimizer.schedule", "constant");
    switch (schedule_kind_from_name(kind)) {
        case Schedule::Kind::Constant:
            hp.schedule = Schedule::constant();
            break;
        case Schedule::Kind::Cosine:
            hp.schedule = Schedule::cosine(
                total_steps, cfg.get_double("optimizer.floor_fraction", 0.0));
            break;
        case Schedule::Kind::CosineWarmup:
            hp.schedule = Schedule::cosine_warmup(
                total_steps, cfg.get_long("optimizer.warmup_steps", total_steps / 10),
                cfg.get_double("optimizer.floor_fraction", 0.0));
            break;
    }
    hp.validate();
    return hp;
}

}  // namespace stacey
