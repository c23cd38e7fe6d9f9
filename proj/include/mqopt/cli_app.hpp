#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mqopt/bounds.hpp"
#include "mqopt/costing.hpp"
#include "mqopt/instances.hpp"
#include "mqopt/json_io.hpp"
#include "mqopt/solvers.hpp"

namespace mqopt {

namespace cli_detail {

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct RunConfig {
    std::string workload_path;
    std::string algo = "marginal";
    std::optional<std::size_t> k;
    bool prune = true;
    std::uint64_t seed = 0;
    std::string report = "text";
    bool trace = false;
    std::string out_path;
};

struct AlgoRun {
    std::string name;
    SolverResult result;     // empty chosen for "none"
    double plan_cost = 0.0;  // bc of the chosen set
    double mb = 0.0;
    std::size_t oracle_calls = 0;
    double wall_ms = 0.0;
};

/// Runs one algorithm against a fresh benefit oracle so reported call
/// counts and timings never depend on what ran before.
inline AlgoRun run_algorithm(const std::string& algo, const QueryDag& dag, const CostModel& model,
                             std::optional<std::size_t> k, bool prune) {
    AlgoRun run;
    run.name = algo;
    const auto start = std::chrono::steady_clock::now();
    BenefitOracle oracle(dag, model);
    if (algo == "none") {
        run.result.chosen = SubsetBitset(oracle.universe().size());
        run.plan_cost = oracle.baseline();
        run.oracle_calls = 0;
    } else if (algo == "roy") {
        SetFunction bc(oracle.universe().size(),
                       [oracle](const SubsetBitset& s) { return oracle.best_cost_of(s); });
        run.result = roy_greedy(bc, oracle.universe());
        run.plan_cost = run.result.objective;
        run.oracle_calls = run.result.oracle_calls;
    } else {
        const SetFunction mb = oracle.function();
        if (algo == "exhaustive") {
            run.result = exhaustive_max(mb, oracle.universe());
        } else {
            const Decomposition d = canonical_decomposition(mb, oracle.universe());
            run.result = (algo == "lazy") ? lazy_marginal_greedy(d, oracle.universe(), k, prune)
                                          : marginal_greedy(d, oracle.universe(), k, prune);
        }
        run.plan_cost = oracle.best_cost_of(run.result.chosen);
        run.oracle_calls = run.result.oracle_calls;
    }
    run.mb = 0.0;
    if (algo != "none") run.mb = oracle.baseline() - run.plan_cost;
    const auto stop = std::chrono::steady_clock::now();
    run.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return run;
}

inline std::string chosen_labels(const SolverResult& r, const GroundSet& u) {
    std::string out;
    for (std::size_t id : r.chosen.to_ids()) {
        if (!out.empty()) out += "; ";
        out += u.label(id);
    }
    return out.empty() ? "-" : out;
}

inline void write_report(const std::string& text, const std::string& out_path, std::ostream& fallback) {
    if (out_path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw ValidationError("cannot open output file '" + out_path + "'");
    f << text;
}

inline int cmd_optimize(const RunConfig& cfg, std::ostream& out) {
    const Workload w = load_workload_file(cfg.workload_path);
    const QueryDag dag = build_dag(w);
    const CostModel model(w.cost_model);
    BenefitOracle oracle(dag, model);
    const double bc0 = oracle.baseline();

    AlgoRun run;
    const bool solver_ran = cfg.algo != "none";
    if (solver_ran) run = run_algorithm(cfg.algo, dag, model, cfg.k, cfg.prune);

    std::string text;
    if (cfg.report == "json") {
        json j;
        j["workload"] = cfg.workload_path;
        j["algorithm"] = cfg.algo;
        j["seed"] = cfg.seed;
        j["equivalence_nodes"] = dag.equivalence_nodes().size();
        j["operator_nodes"] = dag.operator_nodes().size();
        j["shareable_nodes"] = oracle.universe().size();
        j["bc_empty"] = bc0;
        if (solver_ran) {
            j["bc_chosen"] = run.plan_cost;
            j["mb"] = run.mb;
            j["result"] = solver_result_to_json(run.result, oracle.universe(), cfg.trace);
        }
        text = j.dump(2) + "\n";
    } else if (cfg.report == "csv") {
        text = "algorithm,bc_empty,bc_chosen,mb,materialized,oracle_calls\n";
        text += cfg.algo + "," + fixed6(bc0) + ",";
        if (solver_ran)
            text += fixed6(run.plan_cost) + "," + fixed6(run.mb) + "," +
                    std::to_string(run.result.chosen.count()) + "," + std::to_string(run.oracle_calls);
        else
            text += ",,,";
        text += "\n";
    } else {
        text += "workload: " + cfg.workload_path + "\n";
        text += "algorithm: " + cfg.algo + "\n";
        text += "equivalence nodes: " + std::to_string(dag.equivalence_nodes().size()) + "\n";
        text += "operator nodes: " + std::to_string(dag.operator_nodes().size()) + "\n";
        text += "shareable nodes: " + std::to_string(oracle.universe().size()) + "\n";
        text += "bc(empty): " + fixed6(bc0) + "\n";
        if (solver_ran) {
            text += "materialized (" + std::to_string(run.result.chosen.count()) +
                    "): " + chosen_labels(run.result, oracle.universe()) + "\n";
            text += "bc(X): " + fixed6(run.plan_cost) + "\n";
            text += "mb(X): " + fixed6(run.mb) + "\n";
            text += "oracle calls: " + std::to_string(run.oracle_calls) + "\n";
            if (cfg.trace) {
                text += "trace:\n";
                for (const auto& rec : run.result.trace) {
                    const std::string ratio =
                        std::isinf(rec.ratio) ? std::string(rec.ratio > 0 ? "inf" : "-inf") : fixed6(rec.ratio);
                    text += std::string("  [") + to_string(rec.phase) + "] pick " +
                            oracle.universe().label(rec.element) + " ratio=" + ratio +
                            " f=" + fixed6(rec.f_value_after) + " f_m=" + fixed6(rec.f_m_value_after) + "\n";
                }
            }
        }
    }
    write_report(text, cfg.out_path, out);
    return 0;
}

inline int cmd_compare(const RunConfig& cfg, std::ostream& out) {
    const Workload w = load_workload_file(cfg.workload_path);
    const QueryDag dag = build_dag(w);
    const CostModel model(w.cost_model);

    std::vector<std::string> algos{"none", "roy", "marginal", "lazy"};
    {
        BenefitOracle probe(dag, model);
        if (probe.universe().size() <= 22) algos.push_back("exhaustive");
    }
    std::vector<AlgoRun> rows;
    for (const auto& a : algos) rows.push_back(run_algorithm(a, dag, model, cfg.k, cfg.prune));

    std::string text;
    if (cfg.report == "json") {
        json j = json::array();
        for (const auto& r : rows)
            j.push_back({{"algorithm", r.name},
                         {"plan_cost", r.plan_cost},
                         {"materialized", r.result.chosen.count()},
                         {"oracle_calls", r.oracle_calls},
                         {"wall_ms", r.wall_ms}});
        text = j.dump(2) + "\n";
    } else if (cfg.report == "csv") {
        text = "algorithm,plan_cost,materialized,oracle_calls,wall_ms\n";
        for (const auto& r : rows)
            text += r.name + "," + fixed6(r.plan_cost) + "," + std::to_string(r.result.chosen.count()) + "," +
                    std::to_string(r.oracle_calls) + "," + fixed6(r.wall_ms) + "\n";
    } else {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-12s %16s %13s %13s %12s\n", "algorithm", "plan_cost", "materialized",
                      "oracle_calls", "wall_ms");
        text = buf;
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%-12s %16s %13zu %13zu %12s\n", r.name.c_str(),
                          fixed6(r.plan_cost).c_str(), r.result.chosen.count(), r.oracle_calls,
                          fixed6(r.wall_ms).c_str());
            text += buf;
        }
    }
    write_report(text, cfg.out_path, out);
    return 0;
}

struct GenConfig {
    std::string kind;
    std::size_t queries = 2;
    std::size_t relations = 3;
    double overlap = 0.5;
    std::size_t n = 12;
    std::size_t l = 3;
    std::size_t extra = 2;
    double gamma = 1.0;
    std::uint64_t seed = 0;
    std::string out_path;
};

inline int cmd_gen(const GenConfig& cfg, std::ostream& out) {
    json j;
    if (cfg.kind == "demo") {
        j = json::parse(demo_workload_json());
    } else if (cfg.kind == "join-workload") {
        j = workload_to_json(gen_join_workload(cfg.queries, cfg.relations, cfg.overlap, cfg.seed));
    } else if (cfg.kind == "planted-cover") {
        j = coverage_instance_to_json(gen_planted_cover(cfg.n, cfg.l, cfg.extra, cfg.seed, cfg.gamma));
    } else {
        throw ValidationError("unknown gen kind '" + cfg.kind + "' (expected demo | join-workload | planted-cover)");
    }
    write_report(j.dump(2) + "\n", cfg.out_path, out);
    return 0;
}

inline int cmd_selfcheck(const std::string& workload_path, std::ostream& out) {
    bool all_ok = true;
    const auto check = [&](const std::string& name, bool ok) {
        out << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        if (!ok) all_ok = false;
    };
    const auto near = [](double a, double b) { return std::abs(a - b) <= kTol; };

    const bool builtin = workload_path.empty();
    const Workload w = builtin ? parse_workload_text(demo_workload_json()) : load_workload_file(workload_path);
    const QueryDag dag = build_dag(w);
    const CostModel model(w.cost_model);
    BenefitOracle oracle(dag, model);
    out << "workload: " << (builtin ? "<built-in demo workload>" : workload_path) << "\n";
    out << "bc(empty): " << fixed6(oracle.baseline()) << "\n";

    const SetFunction mb = oracle.function();
    const GroundSet& universe = oracle.universe();
    if (universe.size() > 0) {
        const Decomposition d = canonical_decomposition(mb, universe);
        const SolverResult greedy = marginal_greedy(d, universe);
        const SolverResult lazy = lazy_marginal_greedy(d, universe);
        const double bc_greedy = oracle.best_cost_of(greedy.chosen);
        out << "bc(greedy): " << fixed6(bc_greedy) << "\n";
        out << "mb(greedy): " << fixed6(oracle.baseline() - bc_greedy) << "\n";
        check("greedy never worse than the no-sharing baseline", bc_greedy <= oracle.baseline() + kTol);
        check("lazy greedy matches eager greedy", lazy.chosen == greedy.chosen);
        const CostReport report = best_cost(dag, oracle.nodes_of(greedy.chosen), model);
        check("bc(S) = bestUseCost(S) + c(S) on the greedy pick",
              near(report.total, report.use_cost + report.materialization_cost));
    }
    if (builtin) {
        check("demo fixture bc(empty) = 460", near(oracle.baseline(), 460.0));
        const auto bc_node = dag.find(canonical_signature({"B", "C"}, {}));
        bool ok = bc_node.has_value();
        if (ok) ok = near(best_cost(dag, {*bc_node}, model).total, 370.0);
        check("demo fixture bc({B join C}) = 370", ok);
        const SolverResult greedy = marginal_greedy(canonical_decomposition(mb, universe), universe);
        check("demo fixture greedy materializes {B join C}",
              greedy.chosen.count() == 1 && oracle.nodes_of(greedy.chosen) == std::vector<std::size_t>{*bc_node});
    }

    // Fast property suites on seeded instances.
    {
        bool identity_ok = true, monotone_ok = true;
        for (std::uint64_t seed = 1; seed <= 5 && (identity_ok || monotone_ok); ++seed) {
            const Decomposition gen = gen_random_submodular(6, seed);
            const GroundSet u(6);
            const SetFunction f = gen.function();
            const Decomposition canon = canonical_decomposition(f, u);
            for (std::uint64_t mask = 0; mask < 64; ++mask) {
                const auto s = SubsetBitset::from_mask(6, mask);
                if (!near(f(s), canon.monotone_part()(s) - canon.cost(s))) identity_ok = false;
            }
            if (!is_monotone(canon.monotone_part(), u)) monotone_ok = false;
        }
        check("canonical decomposition identity f = f_m - c", identity_ok);
        check("canonical monotone part is monotone", monotone_ok);
    }
    {
        bool equal_ok = true;
        for (std::uint64_t seed = 11; seed <= 20; ++seed) {
            const Decomposition gen = gen_random_submodular(10, seed);
            const GroundSet u(10);
            const Decomposition canon = canonical_decomposition(gen.function(), u);
            if (!(lazy_marginal_greedy(canon, u).chosen == marginal_greedy(canon, u).chosen)) equal_ok = false;
        }
        check("lazy greedy = eager greedy on random instances", equal_ok);
    }
    {
        bool reduce_ok = true;
        for (std::uint64_t seed = 21; seed <= 30; ++seed) {
            const Decomposition gen = gen_random_submodular(9, seed);
            const GroundSet u(9);
            const Decomposition canon = canonical_decomposition(gen.function(), u);
            const std::size_t k = 1 + static_cast<std::size_t>(seed % 8);
            const GroundSet reduced = universe_reduce(canon, u, k);
            if (!(marginal_greedy(canon, reduced, k).chosen == marginal_greedy(canon, u, k).chosen))
                reduce_ok = false;
        }
        check("universe reduction preserves the k-capped greedy answer", reduce_ok);
    }

    out << (all_ok ? "selfcheck: OK\n" : "selfcheck: FAILED\n");
    return all_ok ? 0 : 1;
}

}  // namespace cli_detail

/// Entry point shared by the binary and the tests. Returns the process
/// exit code: 0 on success, 2 on workload/validation errors.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-query optimization by submodular benefit maximization"};
    app.require_subcommand(1);

    cli_detail::RunConfig cfg;
    std::size_t k_value = 0;

    auto* optimize = app.add_subcommand("optimize", "Optimize one workload with a chosen solver");
    optimize->add_option("workload", cfg.workload_path, "Workload JSON file")->required();
    optimize->add_option("--algo", cfg.algo, "marginal | lazy | roy | exhaustive | none")
        ->check(CLI::IsMember({"marginal", "lazy", "roy", "exhaustive", "none"}));
    auto* opt_k = optimize->add_option("--k", k_value, "Cardinality cap on materialized nodes");
    optimize->add_flag("--prune,!--no-prune", cfg.prune, "Drop candidates whose ratio fell to 1 (default on)");
    optimize->add_option("--seed", cfg.seed, "Seed echoed into reports");
    optimize->add_option("--report", cfg.report, "text | json | csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    optimize->add_flag("--trace", cfg.trace, "Include per-iteration trace");
    optimize->add_option("--out", cfg.out_path, "Write the report to a file instead of stdout");

    auto* compare = app.add_subcommand("compare", "Run all solvers on one workload and tabulate");
    compare->add_option("workload", cfg.workload_path, "Workload JSON file")->required();
    auto* cmp_k = compare->add_option("--k", k_value, "Cardinality cap on materialized nodes");
    compare->add_flag("--prune,!--no-prune", cfg.prune, "Candidate pruning (default on)");
    compare->add_option("--seed", cfg.seed, "Seed echoed into reports");
    compare->add_option("--report", cfg.report, "text | json | csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    compare->add_option("--out", cfg.out_path, "Write the report to a file instead of stdout");

    cli_detail::GenConfig gen;
    auto* gencmd = app.add_subcommand("gen", "Generate a workload or coverage-instance JSON");
    gencmd->add_option("kind", gen.kind, "demo | join-workload | planted-cover")->required();
    gencmd->add_option("--queries", gen.queries, "join-workload: number of queries");
    gencmd->add_option("--relations", gen.relations, "join-workload: relations per query");
    gencmd->add_option("--overlap", gen.overlap, "join-workload: shared-core fraction in [0,1]");
    gencmd->add_option("--n", gen.n, "planted-cover: ground elements");
    gencmd->add_option("--l", gen.l, "planted-cover: number of planted blocks");
    gencmd->add_option("--extra", gen.extra, "planted-cover: extra random subsets");
    gencmd->add_option("--gamma", gen.gamma, "planted-cover: profit parameter");
    gencmd->add_option("--seed", gen.seed, "Generator seed");
    gencmd->add_option("--out", gen.out_path, "Output file (stdout when omitted)");

    std::string selfcheck_workload;
    auto* selfcheck = app.add_subcommand("selfcheck", "Run the built-in fixture and fast property suites");
    selfcheck->add_option("workload", selfcheck_workload, "Optional workload JSON to check instead");

    // CLI11 parses argv-style reversed vectors.
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (optimize->parsed()) {
            if (*opt_k) cfg.k = k_value;
            return cli_detail::cmd_optimize(cfg, out);
        }
        if (compare->parsed()) {
            if (*cmp_k) cfg.k = k_value;
            return cli_detail::cmd_compare(cfg, out);
        }
        if (gencmd->parsed()) return cli_detail::cmd_gen(gen, out);
        if (selfcheck->parsed()) return cli_detail::cmd_selfcheck(selfcheck_workload, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace mqopt
