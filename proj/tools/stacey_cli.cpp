// Experiment runner and verification front end.
//
// Subcommands:
//   stacey run <config>
//   stacey sweep <config> --grid "key=v1,v2;key2=v3,v4"
//   stacey verify <suite>          suites: reductions mirror gradients
//                                          theorem1 firststep all
//   stacey export <csv...> --channels loss,stationarity --out <path>
//
// Exit codes: 0 success, 1 check failure, 2 config error, 3 divergence.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stacey/stacey.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitDivergence = 3;

// "optimizer.p=2,2.5;optimizer.eta=0.1" -> {key -> values}
std::map<std::string, std::vector<std::string>> parse_grid(const std::string& spec) {
    std::map<std::string, std::vector<std::string>> grid;
    std::istringstream terms(spec);
    std::string term;
    while (std::getline(terms, term, ';')) {
        if (term.empty()) continue;
        auto eq = term.find('=');
        if (eq == std::string::npos)
            throw stacey::ConfigError("grid term missing '=': " + term);
        std::string key = term.substr(0, eq);
        std::vector<std::string> vals;
        std::istringstream vs(term.substr(eq + 1));
        std::string v;
        while (std::getline(vs, v, ',')) vals.push_back(v);
        if (vals.empty()) throw stacey::ConfigError("grid term has no values: " + term);
        grid[key] = vals;
    }
    return grid;
}

int cmd_run(const std::string& config_path) {
    stacey::ConfigMap cfg = stacey::ConfigMap::parse_file(config_path);
    std::vector<stacey::RunRecord> records = stacey::run_experiment(cfg);
    bool diverged = false;
    for (const auto& rec : records) {
        std::cout << "seed " << rec.seed << ": " << rec.rows.size() << " logged rows, final loss "
                  << stacey::fmt_g17(rec.final_loss())
                  << (rec.diverged ? " [DIVERGED]" : "") << "\n";
        diverged = diverged || rec.diverged;
    }
    return diverged ? kExitDivergence : kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_spec,
              const std::string& out_path) {
    stacey::ConfigMap cfg = stacey::ConfigMap::parse_file(config_path);
    auto grid = parse_grid(grid_spec);
    std::vector<stacey::SweepCell> cells = stacey::sweep(cfg, grid);
    if (out_path.empty()) {
        stacey::write_sweep_csv(cells, std::cout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw stacey::IoError("cannot open " + out_path);
        stacey::write_sweep_csv(cells, out);
    }
    return kExitOk;
}

int cmd_verify(const std::string& suite) {
    std::vector<stacey::verify::SuiteResult> results = stacey::verify::run_suites(suite);
    nlohmann::json report = nlohmann::json::array();
    bool ok = true;
    for (const auto& r : results) {
        report.push_back(r.to_json());
        ok = ok && r.all_pass();
        for (const auto& c : r.checks)
            std::cerr << (c.pass ? "[pass] " : "[FAIL] ") << r.suite << "/" << c.name
                      << "  (" << c.detail << ")\n";
    }
    std::cout << report.dump(2) << "\n";
    return ok ? kExitOk : kExitCheckFailure;
}

// Reads one of our run CSVs back in (metadata + data section).
stacey::RunRecord read_record_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw stacey::IoError("cannot open " + path);
    stacey::RunRecord rec;
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# config_hash = ", 0) == 0) {
            rec.config_hash = line.substr(16);
            continue;
        }
        if (line.rfind("# seed = ", 0) == 0) {
            rec.seed = std::stoull(line.substr(9));
            continue;
        }
        if (line.front() == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header.empty()) {
            header = cells;
            for (const auto& h : header) rec.has_test_acc |= h == "test_acc";
            continue;
        }
        if (cells.size() != header.size())
            throw stacey::IoError("malformed row in " + path);
        stacey::RunRow row;
        for (std::size_t i = 0; i < header.size(); ++i) {
            const std::string& h = header[i];
            if (h == "t") row.t = std::stol(cells[i]);
            else if (h == "eta_t") row.eta_t = std::stod(cells[i]);
            else if (h == "loss") row.loss = std::stod(cells[i]);
            else if (h == "stationarity") row.stationarity = std::stod(cells[i]);
            else if (h == "grad_l2") row.grad_l2 = std::stod(cells[i]);
            else if (h == "grad_linf") row.grad_linf = std::stod(cells[i]);
            else if (h == "update_linf") row.update_linf = std::stod(cells[i]);
            else if (h == "test_acc") row.test_acc = std::stod(cells[i]);
            else if (h == "diverged") row.diverged = cells[i] == "true";
        }
        rec.diverged |= row.diverged;
        rec.rows.push_back(row);
    }
    if (header.empty()) throw stacey::IoError("no data section in " + path);
    return rec;
}

int cmd_export(const std::vector<std::string>& paths, const std::string& channels_csv,
               const std::string& out_path) {
    std::vector<stacey::RunRecord> records;
    for (const auto& p : paths) records.push_back(read_record_csv(p));
    std::vector<std::string> channels;
    std::istringstream ss(channels_csv);
    std::string ch;
    while (std::getline(ss, ch, ',')) channels.push_back(ch);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw stacey::IoError("cannot open " + out_path);
    stacey::export_plot_data(records, channels, out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lp steepest-descent optimizer harness"};
    app.require_subcommand(1);

    std::string config_path, grid_spec, suite, channels, out_path;
    std::vector<std::string> export_paths;

    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path)->required();

    auto* sweep = app.add_subcommand("sweep", "grid sweep over a base config");
    sweep->add_option("config", config_path)->required();
    sweep->add_option("--grid", grid_spec, "key=v1,v2;key2=v3,v4")->required();
    sweep->add_option("--out", out_path, "summary CSV path (default stdout)");

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite)->required();

    auto* exp = app.add_subcommand("export", "long-format plot data from run CSVs");
    exp->add_option("records", export_paths)->required()->expected(-1);
    exp->add_option("--channels", channels)->required();
    exp->add_option("--out", out_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path);
        if (*sweep) return cmd_sweep(config_path, grid_spec, out_path);
        if (*verify) return cmd_verify(suite);
        if (*exp) return cmd_export(export_paths, channels, out_path);
    } catch (const stacey::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const stacey::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
    return kExitOk;
}
