#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evomis/construction.hpp"
#include "evomis/convergence.hpp"
#include "evomis/evolution.hpp"
#include "evomis/graph.hpp"
#include "evomis/local_search.hpp"

namespace evomis {

// exit codes of the CLI
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitInvariant = 3;

/// Reads a graph file, auto-detecting DIMACS ("c"/"p" lines) vs METIS.
inline Graph load_graph_auto(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    std::string first;
    while (std::getline(in, first)) {
        auto pos = first.find_first_not_of(" \t\r");
        if (pos != std::string::npos) {
            first = first.substr(pos);
            break;
        }
    }
    in.clear();
    in.seekg(0);
    if (!first.empty() && (first[0] == 'c' || first[0] == 'p')) return parse_dimacs(in);
    return parse_metis(in);
}

struct VerifyReport {
    bool valid = false;
    bool maximal = false;
    NodeID size = 0;
    std::string message;
};

/// Independent checker for solution files: validity (independence),
/// maximality, and size.
inline VerifyReport verify_solution(const Graph& g, const std::vector<NodeID>& nodes) {
    VerifyReport report;
    Individual ind(g.num_nodes());
    for (NodeID v : nodes) {
        if (v >= g.num_nodes()) {
            report.message = "node id " + std::to_string(v) + " out of range";
            return report;
        }
        if (ind.contains(v)) {
            report.message = "duplicate node id " + std::to_string(v);
            return report;
        }
        ind.insert(v);
    }
    report.size = ind.size();
    for (NodeID v : nodes) {
        for (NodeID u : g.neighbors(v)) {
            if (ind.contains(u)) {
                report.message = "edge (" + std::to_string(v) + ", " + std::to_string(u) +
                                 ") has both endpoints in the solution";
                return report;
            }
        }
    }
    report.valid = true;
    report.maximal = is_maximal(g, ind);
    report.message = report.maximal ? "valid, maximal" : "valid, not maximal";
    return report;
}

inline std::vector<NodeID> read_solution_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open solution file: " + path);
    std::vector<NodeID> nodes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%' || line[0] == '#') continue;
        std::istringstream tok(line);
        long long v = -1;
        if (!(tok >> v) || v < 0)
            throw GraphFormatError("line " + std::to_string(line_no) + ": expected a node id");
        nodes.push_back(static_cast<NodeID>(v));
    }
    return nodes;
}

struct SolveOptions {
    std::string graph_path;
    std::string algo = "evomis"; // evomis|arw|greedy-deg|greedy-vc|random
    int repetitions = 5;
    std::string out_dir = ".";
    EvoConfig evo; // time limit, seed and algorithm parameters live here
};

namespace detail {

// Pure ARW baseline: greedy start, then perturb + local search until
// the time limit, logging every improvement.
inline EvolveResult arw_solve(const Graph& g, const EvoConfig& cfg) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto deadline =
        start + std::chrono::duration_cast<Clock::duration>(
                    std::chrono::duration<double>(cfg.time_limit_seconds));
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    Rng rng(cfg.seed);
    EvolveResult result;
    result.log.seed = cfg.seed;
    result.log.algo = "arw";

    SolutionState st(g, greedy_min_residual(g, rng));
    local_search(st, rng);
    result.best = st.to_individual();
    result.log.initial_size = result.best.size();
    result.log.records.push_back({0.0, result.best.size()});
    std::uint64_t improvement_counter = 1;

    auto done = [&] {
        if (cfg.target_size && result.best.size() >= *cfg.target_size) return true;
        return Clock::now() >= deadline;
    };
    while (!done()) {
        perturb(st, rng, cfg.arw);
        local_search(st, rng);
        if (st.size() > result.best.size()) {
            result.best = st.to_individual();
            double t = cfg.deterministic_time ? static_cast<double>(improvement_counter++)
                                              : elapsed();
            if (t <= result.log.records.back().t) t = result.log.records.back().t + 1e-9;
            result.log.add(t, result.best.size());
        }
    }
    return result;
}

inline EvolveResult construct_solve(const Graph& g, const EvoConfig& cfg,
                                    const std::string& algo) {
    Rng rng(cfg.seed);
    EvolveResult result;
    result.log.seed = cfg.seed;
    result.log.algo = algo;
    if (algo == "greedy-deg")
        result.best = greedy_min_residual(g, rng);
    else if (algo == "greedy-vc")
        result.best = greedy_vertex_cover(g, rng);
    else
        result.best = random_maximal(g, rng);
    result.log.initial_size = result.best.size();
    result.log.records.push_back({0.0, result.best.size()});
    return result;
}

inline std::string instance_name(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

} // namespace detail

inline EvolveResult run_single(const Graph& g, const SolveOptions& opt, std::uint64_t seed) {
    EvoConfig cfg = opt.evo;
    cfg.seed = seed;
    if (opt.algo == "evomis") return evolve(g, cfg);
    if (opt.algo == "arw") return detail::arw_solve(g, cfg);
    if (opt.algo == "greedy-deg" || opt.algo == "greedy-vc" || opt.algo == "random")
        return detail::construct_solve(g, cfg, opt.algo);
    throw std::invalid_argument("unknown algorithm: " + opt.algo);
}

/// Runs `repetitions` independent repetitions (seeds = base + index),
/// writes one JSONL convergence log and one solution file per
/// repetition plus the aggregate CSV and the merged convergence curve.
/// Every emitted solution is re-checked before it is written.
inline int run_solve(const SolveOptions& opt, std::ostream& err = std::cerr) {
    Graph g;
    try {
        g = load_graph_auto(opt.graph_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }

    const std::string instance = detail::instance_name(opt.graph_path);
    std::filesystem::create_directories(opt.out_dir);
    const std::string prefix = opt.out_dir + "/" + instance + "." + opt.algo;

    std::vector<ConvergenceLog> logs;
    try {
        for (int rep = 0; rep < opt.repetitions; ++rep) {
            EvolveResult result = run_single(g, opt, opt.evo.seed + static_cast<std::uint64_t>(rep));
            result.log.instance = instance;

            VerifyReport check = verify_solution(g, result.best.to_nodes());
            if (!check.valid || !check.maximal) {
                err << "internal error: emitted solution failed verification: " << check.message
                    << "\n";
                return kExitInvariant;
            }

            std::string rep_tag = prefix + ".rep" + std::to_string(rep);
            std::ofstream log_out(rep_tag + ".jsonl");
            result.log.write_jsonl(log_out);
            std::ofstream sol_out(rep_tag + ".sol");
            for (NodeID v : result.best.to_nodes()) sol_out << v << '\n';
            if (!log_out || !sol_out) {
                err << "error: cannot write outputs under " << opt.out_dir << "\n";
                return kExitIo;
            }
            logs.push_back(std::move(result.log));
        }

        AggregateReport report = merge_convergence(logs);
        report.instance = instance;
        report.algo = opt.algo;
        report.n = g.num_nodes();
        std::ofstream agg_out(prefix + ".aggregate.csv");
        write_aggregate_csv(report, agg_out);
        std::ofstream curve_out(prefix + ".curve.csv");
        write_curve_csv(report, curve_out);
        if (!agg_out || !curve_out) {
            err << "error: cannot write outputs under " << opt.out_dir << "\n";
            return kExitIo;
        }
    } catch (const std::logic_error& e) {
        err << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

inline int run_verify(const std::string& graph_path, const std::string& solution_path,
                      std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        Graph g = load_graph_auto(graph_path);
        std::vector<NodeID> nodes = read_solution_file(solution_path);
        VerifyReport report = verify_solution(g, nodes);
        out << "size: " << report.size << "\n"
            << "independent: " << (report.valid ? "yes" : "no") << "\n"
            << "maximal: " << (report.valid && report.maximal ? "yes" : "no") << "\n";
        if (!report.message.empty()) out << report.message << "\n";
        return report.valid ? kExitOk : kExitInvariant;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

} // namespace evomis
