#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "stacey/errors.hpp"

namespace stacey {

struct RunRow {
    long t = 0;
    double eta_t = 0.0;
    double loss = 0.0;
    double stationarity = 0.0;  // ||g_t||_{p*}^{p*}, true full-batch gradient
    double grad_l2 = 0.0;
    double grad_linf = 0.0;
    double update_linf = 0.0;
    double test_acc = std::numeric_limits<double>::quiet_NaN();
    bool diverged = false;
};

struct RunRecord {
    std::string config_hash;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;  // metadata only, excluded from determinism
    bool has_test_acc = false;
    bool diverged = false;
    std::vector<RunRow> rows;

    double final_loss() const {
        if (rows.empty()) throw Error("RunRecord: empty record");
        return rows.back().loss;
    }

    double best_stationarity() const {
        if (rows.empty()) throw Error("RunRecord: empty record");
        double best = rows.front().stationarity;
        for (const auto& r : rows)
            if (!r.diverged && r.stationarity < best) best = r.stationarity;
        return best;
    }
};

// Round-trip exact for 64-bit reals.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Metadata lives in a '#' header block; everything from the column header
// down is the deterministic data section.
inline void write_record_csv(const RunRecord& rec, std::ostream& out,
                             bool with_metadata = true) {
    if (with_metadata) {
        out << "# stacey run record\n";
        out << "# config_hash = " << rec.config_hash << "\n";
        out << "# seed = " << rec.seed << "\n";
        if (rec.has_test_acc)
            out << "# note = test_acc is a held-out-split analogue, not comparable to "
                   "published benchmark accuracy\n";
        out << "# wall_time_seconds = " << fmt_g17(rec.wall_seconds) << "\n";
    }
    out << "t,eta_t,loss,stationarity,grad_l2,grad_linf,update_linf";
    if (rec.has_test_acc) out << ",test_acc";
    out << ",diverged\n";
    for (const auto& r : rec.rows) {
        out << r.t << ',' << fmt_g17(r.eta_t) << ',' << fmt_g17(r.loss) << ','
            << fmt_g17(r.stationarity) << ',' << fmt_g17(r.grad_l2) << ','
            << fmt_g17(r.grad_linf) << ',' << fmt_g17(r.update_linf);
        if (rec.has_test_acc) out << ',' << fmt_g17(r.test_acc);
        out << ',' << (r.diverged ? "true" : "false") << '\n';
    }
}

inline void write_record_csv(const RunRecord& rec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_record_csv: cannot open " + path);
    write_record_csv(rec, out);
}

inline std::string record_data_section(const RunRecord& rec) {
    std::ostringstream ss;
    write_record_csv(rec, ss, /*with_metadata=*/false);
    return ss.str();
}

}  // namespace stacey
