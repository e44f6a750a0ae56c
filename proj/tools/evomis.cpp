#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evomis/harness.hpp"

namespace {

evomis::InitKind parse_init(const std::string& name) {
    if (name == "mix") return evomis::InitKind::kMix;
    if (name == "random") return evomis::InitKind::kRandom;
    if (name == "greedy-deg") return evomis::InitKind::kGreedyDegree;
    if (name == "greedy-vc") return evomis::InitKind::kGreedyVertexCover;
    throw CLI::ValidationError("--init", "expected one of mix|random|greedy-deg|greedy-vc");
}

void parse_partitioner(const std::string& spec, evomis::EvoConfig& cfg) {
    if (spec == "builtin") {
        cfg.partitioner = evomis::PartitionerKind::kBuiltin;
    } else if (spec == "bfs") {
        cfg.partitioner = evomis::PartitionerKind::kBfs;
    } else if (spec.rfind("import:", 0) == 0) {
        cfg.partitioner = evomis::PartitionerKind::kImport;
        cfg.import_path_template = spec.substr(7);
        if (cfg.import_path_template.empty())
            throw CLI::ValidationError("--partitioner", "import requires a path template");
    } else {
        throw CLI::ValidationError("--partitioner",
                                   "expected builtin, bfs or import:<path-template>");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evomis - evolutionary maximum independent set solver"};
    app.require_subcommand(1);

    evomis::SolveOptions opt;
    std::string init_name = "mix";
    std::string partitioner_spec = "builtin";
    std::uint32_t target = 0;

    auto* solve = app.add_subcommand("solve", "run a solver and write logs + solutions");
    solve->add_option("--graph", opt.graph_path, "input graph (METIS or DIMACS, auto-detected)")
        ->required();
    solve->add_option("--algo", opt.algo, "evomis|arw|greedy-deg|greedy-vc|random")
        ->check(CLI::IsMember({"evomis", "arw", "greedy-deg", "greedy-vc", "random"}));
    solve->add_option("--time-limit", opt.evo.time_limit_seconds, "per-repetition budget, seconds");
    solve->add_option("--seed", opt.evo.seed, "base seed; repetition i uses seed + i")
        ->envname("EVOMIS_SEED");
    solve->add_option("--repetitions", opt.repetitions, "independent repetitions")
        ->check(CLI::PositiveNumber);
    solve->add_option("--out", opt.out_dir, "output directory");
    solve->add_option("--population-size", opt.evo.population_size, "population size");
    solve->add_option("--pool-size", opt.evo.pool_size, "partition pool entries per flavor");
    solve->add_option("--blocks", opt.evo.multiway_k, "blocks for multi-way combines");
    solve->add_option("--arw-iterations", opt.evo.arw_iterations,
                      "ARW budget after an offspring is accepted");
    solve->add_option("--unsuccessful-threshold", opt.evo.unsuccessful_threshold,
                      "unsuccessful combines before the pool is rebuilt");
    solve->add_option("--multiway-parents", opt.evo.multiway_parents,
                      "parents per multi-way combine");
    solve->add_option("--perturb-candidates", opt.evo.arw.perturb_candidates,
                      "random candidates per forced insertion");
    solve->add_option("--force-cap", opt.evo.arw.force_cap, "cap on forced insertions");
    solve->add_option("--partitioner", partitioner_spec, "builtin|bfs|import:<path-template>");
    solve->add_option("--init", init_name, "mix|random|greedy-deg|greedy-vc");
    solve->add_flag("--init-refine,!--no-init-refine", opt.evo.init_refine,
                    "local-search pass on initial individuals");
    solve->add_flag("--deterministic-time", opt.evo.deterministic_time,
                    "improvement-counter timestamps for reproducible logs");
    solve->add_flag("--distinct-parents", opt.evo.distinct_parents,
                    "redraw tournaments that return the same parent");
    solve->add_flag("--uniform-ops", opt.evo.uniform_over_four_ops,
                    "draw uniformly over all four combine operators");
    solve->add_option("--target-size", target, "stop early once this size is reached");

    std::string verify_graph, verify_solution_path;
    auto* verify = app.add_subcommand("verify", "check a solution file against a graph");
    verify->add_option("--graph", verify_graph, "input graph")->required();
    verify->add_option("--solution", verify_solution_path, "node ids, one per line")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return evomis::kExitUsage;
    }

    if (solve->parsed()) {
        try {
            opt.evo.init = parse_init(init_name);
            parse_partitioner(partitioner_spec, opt.evo);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return evomis::kExitUsage;
        }
        if (target > 0) opt.evo.target_size = target;
        return evomis::run_solve(opt);
    }
    return evomis::run_verify(verify_graph, verify_solution_path);
}
