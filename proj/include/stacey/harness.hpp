#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "stacey/config.hpp"
#include "stacey/dataset.hpp"
#include "stacey/optimizers.hpp"
#include "stacey/oracle.hpp"
#include "stacey/problems.hpp"
#include "stacey/record.hpp"

namespace stacey {

struct BuiltProblem {
    Problem problem;
    std::optional<Dataset> test_split;
};

namespace detail {

// Seeded-shuffle 80/20 (or configured fraction) split for the accuracy
// channel.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double holdout,
                                                 std::uint64_t seed) {
    std::vector<std::uint32_t> idx(d.n_samples);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng = Rng::derived(seed, /*stream=*/0x5709177ULL);
    for (std::size_t k = d.n_samples; k > 1; --k)
        std::swap(idx[k - 1], idx[rng.below(k)]);
    std::uint32_t n_test = static_cast<std::uint32_t>(holdout * d.n_samples);
    if (n_test >= d.n_samples) throw ConfigError("holdout fraction leaves no training data");
    auto take = [&](std::uint32_t lo, std::uint32_t hi) {
        Dataset out;
        out.n_samples = hi - lo;
        out.n_features = d.n_features;
        out.n_classes = d.n_classes;
        for (std::uint32_t k = lo; k < hi; ++k) {
            std::uint32_t i = idx[k];
            for (std::uint32_t j = 0; j < d.n_features; ++j)
                out.features.push_back(d.features[static_cast<std::size_t>(i) * d.n_features + j]);
            out.labels.push_back(d.labels[i]);
        }
        return out;
    };
    return {take(n_test, d.n_samples), take(0, n_test)};
}

inline Dataset dataset_from_config(const ConfigMap& cfg, std::uint64_t run_seed) {
    std::string src = cfg.get_string("problem.dataset", "two-gaussians");
    std::uint64_t dseed =
        cfg.has("problem.data_seed")
            ? static_cast<std::uint64_t>(cfg.get_long("problem.data_seed"))
            : run_seed;
    if (src == "two-gaussians")
        return generate_two_gaussians(
            static_cast<std::uint32_t>(cfg.get_long("problem.n", 200)), dseed,
            static_cast<std::uint32_t>(cfg.get_long("problem.n_features", 2)),
            cfg.get_double("problem.mu", 1.5), cfg.get_double("problem.noise", 1.0));
    if (src == "two-moons")
        return generate_two_moons(static_cast<std::uint32_t>(cfg.get_long("problem.n", 200)),
                                  dseed, cfg.get_double("problem.noise", 0.1));
    return load_dataset(src);
}

}  // namespace detail

inline BuiltProblem build_problem(const ConfigMap& cfg, std::uint64_t run_seed) {
    std::string name = cfg.get_string("problem.name");
    BuiltProblem out;
    if (name == "quadratic") {
        Vec a, b;
        if (cfg.has("problem.diag_a")) {
            a = cfg.get_double_list("problem.diag_a");
            b = cfg.has("problem.b") ? cfg.get_double_list("problem.b")
                                     : Vec(a.size(), 0.0);
        } else {
            // log-spaced spectrum between 1 and cond
            long dim = cfg.get_long("problem.dim", 10);
            double cond = cfg.get_double("problem.cond", 1.0);
            a.resize(dim);
            b.assign(dim, cfg.get_double("problem.b_const", 1.0));
            for (long i = 0; i < dim; ++i)
                a[i] = dim > 1 ? std::pow(cond, static_cast<double>(i) / (dim - 1)) : 1.0;
        }
        out.problem = quadratic_problem(a, b);
        return out;
    }
    if (name == "rosenbrock") {
        out.problem = rosenbrock_problem(cfg.get_long("problem.dim", 2));
        return out;
    }
    if (name == "logistic" || name == "mlp") {
        Dataset full = detail::dataset_from_config(cfg, run_seed);
        double holdout = cfg.get_double("run.holdout", 0.2);
        Dataset train = full;
        if (holdout > 0.0) {
            auto [tr, te] = detail::split_dataset(full, holdout, run_seed);
            train = std::move(tr);
            out.test_split = std::move(te);
        }
        if (name == "logistic")
            out.problem = logistic_problem(std::move(train),
                                           cfg.get_double("problem.l2_reg", 0.0));
        else
            out.problem = mlp_problem(std::move(train), cfg.get_long("problem.hidden", 8),
                                      run_seed, cfg.get_double("problem.init_scale", 0.2));
        return out;
    }
    throw ConfigError("unknown problem name: " + name);
}

inline StochasticOracle oracle_from_config(const ConfigMap& cfg, std::size_t dim, long T,
                                           std::uint64_t run_seed) {
    StochasticOracle o;
    std::string mode = cfg.get_string("oracle.mode", "additive");
    if (mode == "additive")
        o.mode = StochasticOracle::Mode::Additive;
    else if (mode == "minibatch")
        o.mode = StochasticOracle::Mode::Minibatch;
    else
        throw ConfigError("unknown oracle mode: " + mode);
    if (cfg.has("oracle.sigma")) {
        std::string raw = cfg.raw("oracle.sigma");
        if (!raw.empty() && raw.front() == '[')
            o.sigma = cfg.get_double_list("oracle.sigma");
        else
            o.sigma.assign(dim, cfg.get_double("oracle.sigma"));
    }
    o.batch_size = cfg.get_long("oracle.batch_size", 1);
    o.batch_schedule_T = cfg.get_bool("oracle.n_t_equals_T", false);
    o.total_steps = T;
    o.seed = splitmix64(run_seed ^ 0x07ac1eULL);
    return o;
}

// One trajectory; logs the true full-batch gradient channels every
// log_every steps (and always the final step). A divergence is recorded as
// a terminal flagged row, never swallowed.
inline RunRecord run_trajectory(const Problem& pr, Method method, const HyperParams& hp,
                                const StochasticOracle& oracle, long T, long log_every,
                                std::uint64_t seed, bool strict_zero_init = false,
                                const Dataset* test_split = nullptr,
                                const std::string& config_hash = "") {
    if (T < 1) throw ConfigError("run: T must be >= 1");
    if (log_every < 1) throw ConfigError("run: log_every must be >= 1");
    auto t_start = std::chrono::steady_clock::now();

    RunRecord rec;
    rec.config_hash = config_hash;
    rec.seed = seed;
    rec.has_test_acc = test_split != nullptr && static_cast<bool>(pr.accuracy);

    Vec theta = strict_zero_init ? Vec(pr.dim, 0.0) : pr.theta0;
    OptimizerState state = OptimizerState::init(theta, strict_zero_init);

    for (long t = 0; t < T; ++t) {
        bool log_now = (t % log_every == 0) || t == T - 1;
        RunRow row;
        if (log_now) {
            row.t = t;
            row.eta_t = hp.eta_t(t);
            row.loss = pr.value(theta);
            Vec g = pr.grad(theta);
            row.stationarity = stationarity_measure(g, hp.p);
            row.grad_l2 = lp_norm(g, 2.0);
            row.grad_linf = lp_norm(g, std::numeric_limits<double>::infinity());
            if (rec.has_test_acc) row.test_acc = pr.accuracy(theta, *test_split);
        }
        Vec g_tilde = stochastic_gradient(pr, theta, oracle, t);
        try {
            Vec next = optimizer_step(method, theta, g_tilde, hp, state);
            if (log_now) {
                double up = 0.0;
                for (std::size_t i = 0; i < theta.size(); ++i)
                    up = std::max(up, std::fabs(next[i] - theta[i]));
                row.update_linf = up;
                rec.rows.push_back(row);
            }
            theta = std::move(next);
        } catch (const DivergenceError&) {
            row.t = t;
            row.eta_t = hp.eta_t(t);
            if (!log_now) {
                row.loss = pr.value(theta);
                Vec g = pr.grad(theta);
                row.stationarity = stationarity_measure(g, hp.p);
                row.grad_l2 = lp_norm(g, 2.0);
                row.grad_linf = lp_norm(g, std::numeric_limits<double>::infinity());
                if (rec.has_test_acc) row.test_acc = pr.accuracy(theta, *test_split);
            }
            row.diverged = true;
            rec.rows.push_back(row);
            rec.diverged = true;
            break;
        }
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rec;
}

inline int worker_count() {
    const char* env = std::getenv("STACEY_WORKERS");
    if (env) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// One record per seed; seeds run in parallel up to the worker count, output
// files are written after all workers join.
inline std::vector<RunRecord> run_experiment(const ConfigMap& cfg_in) {
    ConfigMap cfg = cfg_in;
    if (cfg.has("optimizer.preset")) apply_preset(cfg, cfg.get_string("optimizer.preset"));

    long T = cfg.get_long("run.T");
    if (T < 1) throw ConfigError("run.T must be >= 1");
    std::vector<std::uint64_t> seeds =
        cfg.has("run.seeds") ? cfg.get_u64_list("run.seeds") : std::vector<std::uint64_t>{0};
    if (seeds.empty()) throw ConfigError("run.seeds must name at least one seed");
    long log_every = cfg.get_long("run.log_every", 1);
    bool strict = cfg.get_bool("run.strict_zero_init", false);
    Method method = method_from_name(cfg.get_string("optimizer.name"));
    HyperParams hp = hyperparams_from_config(cfg, T);
    std::string hash = cfg.hash();

    std::vector<RunRecord> records(seeds.size());
    std::vector<std::string> failures(seeds.size());
    auto work = [&](std::size_t k) {
        try {
            BuiltProblem bp = build_problem(cfg, seeds[k]);
            StochasticOracle oracle = oracle_from_config(cfg, bp.problem.dim, T, seeds[k]);
            const Dataset* test = bp.test_split ? &*bp.test_split : nullptr;
            records[k] = run_trajectory(bp.problem, method, hp, oracle, T, log_every,
                                        seeds[k], strict, test, hash);
        } catch (const std::exception& e) {
            failures[k] = e.what();
        }
    };

    int workers = std::min<int>(worker_count(), static_cast<int>(seeds.size()));
    if (workers <= 1) {
        for (std::size_t k = 0; k < seeds.size(); ++k) work(k);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t k = next.fetch_add(1);
                    if (k >= seeds.size()) return;
                    work(k);
                }
            });
        for (auto& th : pool) th.join();
    }
    for (const std::string& f : failures)
        if (!f.empty()) throw Error("run_experiment: " + f);

    std::string out_path = cfg.get_string("run.output", "");
    if (!out_path.empty()) {
        for (std::size_t k = 0; k < records.size(); ++k) {
            std::string path = out_path;
            auto dot = path.rfind(".csv");
            std::string suffix = "-seed" + std::to_string(seeds[k]);
            if (dot != std::string::npos && dot == path.size() - 4)
                path.insert(dot, suffix);
            else
                path += suffix + ".csv";
            write_record_csv(records[k], path);
        }
    }
    return records;
}

struct SweepCell {
    std::map<std::string, std::string> overrides;  // key -> value, sorted
    double final_loss = 0.0;                       // seed mean
    double best_stationarity = 0.0;                // min over seeds
    bool diverged = false;
};

// Cartesian product over the grid, keys in lexicographic order, last key
// varying fastest. Diverged cells are flagged and the sweep continues.
inline std::vector<SweepCell> sweep(const ConfigMap& base,
                                    const std::map<std::string, std::vector<std::string>>& grid) {
    for (const auto& [key, vals] : grid)
        if (vals.empty()) throw ConfigError("sweep: empty value list for " + key);
    std::vector<std::string> keys;
    for (const auto& [key, vals] : grid) keys.push_back(key);  // std::map is sorted

    std::vector<SweepCell> cells;
    std::vector<std::size_t> odometer(keys.size(), 0);
    for (;;) {
        SweepCell cell;
        ConfigMap cfg = base;
        for (std::size_t i = 0; i < keys.size(); ++i) {
            const auto& vals = grid.at(keys[i]);
            cell.overrides[keys[i]] = vals[odometer[i]];
            cfg.set(keys[i], vals[odometer[i]]);
        }
        try {
            std::vector<RunRecord> recs = run_experiment(cfg);
            double loss = 0.0, best = std::numeric_limits<double>::infinity();
            for (const auto& r : recs) {
                loss += r.final_loss();
                best = std::min(best, r.best_stationarity());
                cell.diverged = cell.diverged || r.diverged;
            }
            cell.final_loss = loss / static_cast<double>(recs.size());
            cell.best_stationarity = best;
        } catch (const DivergenceError&) {
            cell.diverged = true;
            cell.final_loss = std::numeric_limits<double>::quiet_NaN();
            cell.best_stationarity = std::numeric_limits<double>::quiet_NaN();
        }
        cells.push_back(std::move(cell));

        if (keys.empty()) break;
        bool done = false;
        for (std::size_t i = keys.size(); i-- > 0;) {
            if (++odometer[i] < grid.at(keys[i]).size()) break;
            odometer[i] = 0;
            done = i == 0;  // full carry out of the slowest digit
        }
        if (done) break;
    }
    return cells;
}

inline void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out) {
    if (cells.empty()) return;
    out << "cell";
    for (const auto& [k, v] : cells.front().overrides) out << ',' << k;
    out << ",final_loss,best_stationarity,diverged\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out << i;
        for (const auto& [k, v] : cells[i].overrides) out << ',' << v;
        out << ',' << fmt_g17(cells[i].final_loss) << ','
            << fmt_g17(cells[i].best_stationarity) << ','
            << (cells[i].diverged ? "true" : "false") << '\n';
    }
}

namespace detail {

inline double channel_value(const RunRow& r, const std::string& channel) {
    if (channel == "loss") return r.loss;
    if (channel == "stationarity") return r.stationarity;
    if (channel == "grad_l2") return r.grad_l2;
    if (channel == "grad_linf") return r.grad_linf;
    if (channel == "update_linf") return r.update_linf;
    if (channel == "eta_t") return r.eta_t;
    if (channel == "test_acc") return r.test_acc;
    throw ConfigError("unknown channel '" + channel +
                      "'; available: loss, stationarity, grad_l2, grad_linf, "
                      "update_linf, eta_t, test_acc");
}

}  // namespace detail

// Long-format export: (run_id, seed, t, channel, value) plus seed-mean and
// seed-stddev rows per channel and logged step.
inline void export_plot_data(const std::vector<RunRecord>& records,
                             const std::vector<std::string>& channels, std::ostream& out) {
    if (records.empty()) throw Error("export_plot_data: no records");
    for (const auto& r : records)
        if (r.config_hash != records.front().config_hash)
            throw Error("export_plot_data: records come from different configs");
    for (const auto& ch : channels)
        if (ch == "test_acc" && !records.front().has_test_acc)
            throw ConfigError("channel 'test_acc' absent from these records");

    const std::string& run_id = records.front().config_hash;
    out << "run_id,seed,t,channel,value\n";
    for (const auto& rec : records)
        for (const auto& row : rec.rows)
            for (const auto& ch : channels)
                out << run_id << ',' << rec.seed << ',' << row.t << ',' << ch << ','
                    << fmt_g17(detail::channel_value(row, ch)) << '\n';

    // mean/std across seeds at matching t (two-pass sample stddev)
    std::map<long, std::vector<const RunRow*>> by_t;
    for (const auto& rec : records)
        for (const auto& row : rec.rows) by_t[row.t].push_back(&row);
    for (const auto& ch : channels) {
        for (const auto& [t, rows] : by_t) {
            double mean = 0.0;
            for (const RunRow* r : rows) mean += detail::channel_value(*r, ch);
            mean /= static_cast<double>(rows.size());
            double var = 0.0;
            for (const RunRow* r : rows) {
                double d = detail::channel_value(*r, ch) - mean;
                var += d * d;
            }
            double sd = rows.size() > 1
                            ? std::sqrt(var / static_cast<double>(rows.size() - 1))
                            : 0.0;
            out << run_id << ",mean," << t << ',' << ch << ',' << fmt_g17(mean) << '\n';
            out << run_id << ",std," << t << ',' << ch << ',' << fmt_g17(sd) << '\n';
        }
    }
}

}  // namespace stacey
