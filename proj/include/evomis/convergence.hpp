#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evomis/graph.hpp"

namespace evomis {

struct ConvergenceRecord {
    double t;    // elapsed seconds (or improvement counter in deterministic mode)
    NodeID size; // best-so-far solution size
};

/// Time-stamped best-so-far improvements of one run. Records are
/// strictly increasing in both time and size; the value before the
/// first record is the best individual of the initial population.
struct ConvergenceLog {
    std::vector<ConvergenceRecord> records;
    std::optional<NodeID> initial_size;

    std::string instance;
    std::string algo;
    std::uint64_t seed = 0;

    void add(double t, NodeID size) {
        if (!records.empty()) {
            if (t <= records.back().t)
                throw std::logic_error("convergence timestamps must be strictly increasing");
            if (size <= records.back().size)
                throw std::logic_error("convergence records are emitted only on improvement");
        }
        records.push_back({t, size});
    }

    NodeID final_size() const {
        if (!records.empty()) return records.back().size;
        if (initial_size) return *initial_size;
        return 0;
    }

    /// Step-function evaluation: the best-so-far at time t.
    NodeID value_at(double t) const {
        NodeID value = initial_size.value_or(records.empty() ? 0 : records.front().size);
        for (const auto& r : records) {
            if (r.t > t) break;
            value = r.size;
        }
        return value;
    }

    void write_jsonl(std::ostream& out) const {
        char buf[96];
        for (const auto& r : records) {
            std::snprintf(buf, sizeof(buf), "{\"t\": %.6f, \"size\": %u}\n", r.t, r.size);
            out << buf;
        }
    }
};

struct AggregatePoint {
    double t;
    double avg_size;
};

/// Avg/Max/Min of final sizes over repetitions plus the merged
/// convergence curve: sorted union of all timestamps, and at each the
/// mean over repetitions of the run's best-so-far at that time.
struct AggregateReport {
    std::string instance;
    NodeID n = 0;
    std::string algo;
    double avg = 0.0;
    NodeID max = 0;
    NodeID min = 0;
    std::size_t reps = 0;
    std::vector<AggregatePoint> curve;
};

inline AggregateReport merge_convergence(const std::vector<ConvergenceLog>& logs) {
    if (logs.empty()) throw std::invalid_argument("merge_convergence needs at least one log");

    AggregateReport report;
    report.instance = logs.front().instance;
    report.algo = logs.front().algo;
    report.reps = logs.size();

    std::vector<double> stamps;
    for (const auto& log : logs)
        for (const auto& r : log.records) stamps.push_back(r.t);
    std::sort(stamps.begin(), stamps.end());
    stamps.erase(std::unique(stamps.begin(), stamps.end()), stamps.end());

    report.curve.reserve(stamps.size());
    for (double t : stamps) {
        double sum = 0.0;
        for (const auto& log : logs) sum += log.value_at(t);
        report.curve.push_back({t, sum / logs.size()});
    }

    NodeID lo = logs.front().final_size(), hi = lo;
    double sum = 0.0;
    for (const auto& log : logs) {
        NodeID f = log.final_size();
        lo = std::min(lo, f);
        hi = std::max(hi, f);
        sum += f;
    }
    report.min = lo;
    report.max = hi;
    report.avg = sum / logs.size();
    return report;
}

inline void write_aggregate_csv(const AggregateReport& r, std::ostream& out,
                                bool with_header = true) {
    if (with_header) out << "instance,n,algo,avg,max,min,reps\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", r.avg);
    out << r.instance << ',' << r.n << ',' << r.algo << ',' << buf << ',' << r.max << ','
        << r.min << ',' << r.reps << '\n';
}

inline void write_curve_csv(const AggregateReport& r, std::ostream& out) {
    out << "t,avg_size\n";
    char buf[96];
    for (const auto& p : r.curve) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", p.t, p.avg_size);
        out << buf;
    }
}

} // namespace evomis
