// pcstar: generate networks, sample data, run independence tests, learn
// structures and run the benchmark experiments.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 search stalled
// (outputs are still written).

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcstar/bench.hpp"
#include "pcstar/config.hpp"
#include "pcstar/gtt.hpp"
#include "pcstar/io.hpp"
#include "pcstar/pc.hpp"
#include "pcstar/stats/hybrid.hpp"

namespace {

using namespace pcstar;

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitStalled = 3;

struct UsageError : Error {
    using Error::Error;
};

int find_variable(const Dataset& data, const std::string& name) {
    for (const auto& v : data.variables()) {
        if (v.name == name) return v.id;
    }
    throw UsageError("unknown variable '" + name + "'");
}

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

nlohmann::json read_config(const std::string& path) {
    try {
        return nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw config::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

struct GenerateOpts {
    std::size_t nodes = 0;
    int max_parents = 5;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_generate(const GenerateOpts& o) {
    if (o.nodes < 1) throw UsageError("--nodes must be at least 1");
    if (o.max_parents < 0) throw UsageError("--max-parents must be non-negative");
    Rng rng(o.seed);
    const auto dag = bench::random_structure(o.nodes, o.max_parents, rng);
    io::write_network(o.out, sample_uniform_parameters(dag, rng));
    return 0;
}

struct SampleOpts {
    std::string net;
    std::size_t records = 0;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_sample(const SampleOpts& o) {
    const auto bn = io::read_network(o.net);
    Rng rng(o.seed);
    io::write_dataset(o.out, sample_records(bn, o.records, rng));
    return 0;
}

struct CitestOpts {
    std::string data;
    std::string x, y, z;
    double alpha = 0.05;
    std::string method = "hybrid";
};

void check_alpha(double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw UsageError("--alpha must lie strictly between 0 and 1");
}

int cmd_citest(const CitestOpts& o) {
    check_alpha(o.alpha);
    const auto data = io::read_dataset(o.data);
    const int x = find_variable(data, o.x);
    const int y = find_variable(data, o.y);
    if (x == y) throw UsageError("--x and --y must name different variables");
    std::vector<int> z;
    for (const auto& name : split_names(o.z)) z.push_back(find_variable(data, name));
    try {
        stats::check_query(data.variables(), x, y, z);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const auto r = o.method == "std" ? stats::std_it(data, x, y, z, o.alpha) : stats::hybrid_it(data, x, y, z, o.alpha);
    const nlohmann::json j{{"statistic", r.statistic}, {"dof", r.dof}, {"p", r.p_value}, {"independent", r.independent}};
    std::cout << j.dump() << "\n";
    return 0;
}

struct LearnOpts {
    std::string data;
    std::string method = "pcstar";
    double alpha = 0.05;
    std::string out;
    std::string dot;
    std::optional<double> time_budget;
    std::optional<std::uint64_t> work_budget;
    std::optional<std::size_t> max_cond_size;
};

int cmd_learn(const LearnOpts& o) {
    check_alpha(o.alpha);
    if (o.time_budget && *o.time_budget < 0) throw UsageError("--time-budget must be non-negative");
    const auto data = io::read_dataset(o.data);
    nlohmann::json summary{{"method", o.method}};
    if (o.method == "gtt") {
        const auto start = std::chrono::steady_clock::now();
        const auto dag = gtt::gtt_search(data);
        summary["elapsed"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        summary["edges"] = dag.edge_count();
        summary["stalled"] = false;
        io::write_atomic(o.out, io::dag_to_json(dag).dump(2) + "\n");
        if (!o.dot.empty()) io::write_atomic(o.dot, io::dag_to_dot(dag));
        std::cout << summary.dump() << "\n";
        return 0;
    }
    pc::SearchConfig cfg;
    cfg.alpha = o.alpha;
    cfg.tester = o.method == "pc" ? pc::TestKind::standard : pc::TestKind::hybrid;
    cfg.time_budget = o.time_budget;
    cfg.work_budget = o.work_budget;
    cfg.max_cond_size = o.max_cond_size;
    const auto outcome = pc::pc_search(data, cfg);
    io::write_atomic(o.out, io::pattern_to_json(outcome.pattern).dump(2) + "\n");
    if (!o.dot.empty()) io::write_atomic(o.dot, io::pattern_to_dot(outcome.pattern));
    summary["elapsed"] = outcome.elapsed;
    summary["tests"] = outcome.tests;
    summary["work"] = outcome.work;
    summary["stalled"] = outcome.stalled;
    std::cout << summary.dump() << "\n";
    return outcome.stalled ? kExitStalled : 0;
}

struct ExperimentOpts {
    std::string config;
    std::string out;
    std::string raw;
    unsigned parallel = 1;
};

int cmd_bench(const ExperimentOpts& o) {
    const auto cfgs = config::experiments_from_json(read_config(o.config));
    std::string report = bench::kReportHeader;
    std::string raw;
    for (const auto& c : cfgs) {
        const auto results = bench::run_experiment(c, o.parallel);
        report += bench::report_rows(c, results);
        raw += bench::trials_jsonl(results);
    }
    io::write_atomic(o.out, report);
    if (!o.raw.empty()) io::write_atomic(o.raw, raw);
    return 0;
}

int cmd_stall(const ExperimentOpts& o) {
    const auto cfg = config::stall_from_json(read_config(o.config));
    const auto cells = bench::stall_experiment(cfg, o.parallel);
    io::write_atomic(o.out, bench::stall_report(cells));
    if (!o.raw.empty()) {
        std::string raw;
        for (const auto& c : cells) {
            for (std::size_t t = 0; t < c.runs.size(); ++t) {
                const auto& r = c.runs[t];
                raw += nlohmann::json{{"N", c.nodes},
                                      {"N_r", c.records},
                                      {"trial", t},
                                      {"work_pc", r.work_pc},
                                      {"stalled_pc", r.stalled_pc},
                                      {"work_pcstar", r.work_pcstar},
                                      {"stalled_pcstar", r.stalled_pcstar}}
                           .dump() +
                       "\n";
            }
        }
        io::write_atomic(o.raw, raw);
    }
    return 0;
}

int cmd_alpha_sweep(const ExperimentOpts& o) {
    const auto cfg = config::alpha_sweep_from_json(read_config(o.config));
    std::vector<std::vector<bench::TrialResult>> raw_results;
    const auto rows = bench::alpha_sweep(cfg, o.parallel, &raw_results);
    io::write_atomic(o.out, bench::alpha_report(cfg, rows));
    if (!o.raw.empty()) {
        std::string raw;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (const auto& r : raw_results[i]) {
                auto j = bench::to_json(r);
                j["alpha"] = rows[i].alpha;
                raw += j.dump() + "\n";
            }
        }
        io::write_atomic(o.raw, raw);
    }
    return 0;
}

void add_experiment_flags(CLI::App* sub, ExperimentOpts& o) {
    sub->add_option("--config", o.config, "Experiment configuration (JSON)")->required();
    sub->add_option("--out", o.out, "Report CSV")->required();
    sub->add_option("--raw", o.raw, "Per-trial results (JSON lines)");
    sub->add_option("--parallel", o.parallel, "Worker threads; output does not depend on it")->check(CLI::Range(1u, 1024u));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal structure learning with smoothed-table independence tests (PC, PC*, GTT)"};
    app.require_subcommand(1);

    GenerateOpts gen;
    auto* g = app.add_subcommand("generate", "Random network: sparse random DAG with uniform-simplex CPTs");
    g->add_option("--nodes", gen.nodes, "Number of variables N")->required();
    g->add_option("--max-parents", gen.max_parents, "Maximum parents per node K")->capture_default_str();
    g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    g->add_option("--out", gen.out, "Output network JSON")->required();

    SampleOpts smp;
    auto* s = app.add_subcommand("sample", "Forward-sample records from a network");
    s->add_option("--net", smp.net, "Network JSON")->required();
    s->add_option("--records", smp.records, "Number of records N_r")->required();
    s->add_option("--seed", smp.seed, "Random seed")->capture_default_str();
    s->add_option("--out", smp.out, "Output CSV")->required();

    CitestOpts ci;
    auto* c = app.add_subcommand("citest", "Conditional independence test; prints {statistic, dof, p, independent}");
    c->add_option("--data", ci.data, "Dataset CSV")->required();
    c->add_option("--x", ci.x, "First variable name")->required();
    c->add_option("--y", ci.y, "Second variable name")->required();
    c->add_option("--z", ci.z, "Comma-separated conditioning variable names");
    c->add_option("--alpha", ci.alpha, "Significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    c->add_option("--method", ci.method, "std (raw table) or hybrid (smoothed table)")
        ->capture_default_str()
        ->check(CLI::IsMember({"std", "hybrid"}));

    LearnOpts ln;
    auto* l = app.add_subcommand("learn", "Learn a structure with PC, PC* or GTT");
    l->add_option("--data", ln.data, "Dataset CSV")->required();
    l->add_option("--method", ln.method, "pc, pcstar or gtt")->capture_default_str()->check(CLI::IsMember({"pc", "pcstar", "gtt"}));
    l->add_option("--alpha", ln.alpha, "Significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    l->add_option("--out", ln.out, "Output pattern JSON (DAG JSON for gtt)")->required();
    l->add_option("--dot", ln.dot, "Also write Graphviz DOT");
    l->add_option("--time-budget", ln.time_budget, "Wall-clock budget in seconds (pc/pcstar)");
    l->add_option("--work-budget", ln.work_budget, "Budget in deterministic work units (pc/pcstar)");
    l->add_option("--max-cond-size", ln.max_cond_size, "Largest conditioning set to try (pc/pcstar)");

    ExperimentOpts bench_o, stall_o, sweep_o;
    add_experiment_flags(app.add_subcommand("bench", "Testing loop over random networks; Table-style CSV report"), bench_o);
    add_experiment_flags(app.add_subcommand("stall", "Stall probabilities of PC and PC*"), stall_o);
    add_experiment_flags(app.add_subcommand("alpha-sweep", "PC vs PC* as the significance level varies"), sweep_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand("generate")) return cmd_generate(gen);
        if (app.got_subcommand("sample")) return cmd_sample(smp);
        if (app.got_subcommand("citest")) return cmd_citest(ci);
        if (app.got_subcommand("learn")) return cmd_learn(ln);
        if (app.got_subcommand("bench")) return cmd_bench(bench_o);
        if (app.got_subcommand("stall")) return cmd_stall(stall_o);
        if (app.got_subcommand("alpha-sweep")) return cmd_alpha_sweep(sweep_o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const config::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        // Malformed input files surface here.
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
