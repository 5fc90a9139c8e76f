#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <iterator>
#include <vector>

#include <json.hpp>

#include "pcstar/bayes_net.hpp"
#include "pcstar/equivalence.hpp"
#include "pcstar/graph.hpp"
#include "pcstar/gtt.hpp"
#include "pcstar/pc.hpp"
#include "pcstar/rng.hpp"

namespace pcstar::bench {

enum class Method { pc, pcstar, gtt };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::pc: return "pc";
        case Method::pcstar: return "pcstar";
        case Method::gtt: return "gtt";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "pc") return Method::pc;
    if (s == "pcstar") return Method::pcstar;
    if (s == "gtt") return Method::gtt;
    throw Error("unknown method '" + s + "'");
}

/// Random DAG: node i (0-based) draws a parent count uniformly from
/// {0..min(i, k)} and that many distinct parents uniformly from 0..i-1.
inline Dag random_structure(std::size_t n, int k, Rng& rng, int arity = 2) {
    if (n < 1) throw Error("need at least one node");
    if (k < 0) throw Error("max parents must be non-negative");
    Dag dag(make_variables(n, arity));
    std::vector<int> pool;
    for (std::size_t i = 0; i < n; ++i) {
        const int cap = std::min(static_cast<int>(i), k);
        const int count = rng.between(0, cap);
        pool.resize(i);
        for (std::size_t j = 0; j < i; ++j) pool[j] = static_cast<int>(j);
        for (int j = 0; j < count; ++j) {
            const auto pick = static_cast<std::size_t>(j) + rng.below(i - static_cast<std::size_t>(j));
            std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
            dag.add_edge(pool[static_cast<std::size_t>(j)], static_cast<int>(i));
        }
    }
    return dag;
}

struct StructuralErrors {
    std::size_t adjacencies = 0;
    std::size_t v_structures = 0;
};

/// Symmetric differences of skeletons and of v-structure sets, against the
/// essential graph of the true DAG.
inline StructuralErrors structural_errors(const Pattern& learned, const Dag& truth) {
    if (learned.variables() != truth.variables()) throw Error("learned and true graphs differ in variables");
    StructuralErrors e;
    const int n = static_cast<int>(truth.size());
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) e.adjacencies += learned.adjacent(a, b) != truth.adjacent(a, b);
    }
    const auto lv = v_structures(learned);
    const auto tv = v_structures(pattern_of_dag(truth));
    std::vector<VStructure> diff;
    std::set_symmetric_difference(lv.begin(), lv.end(), tv.begin(), tv.end(), std::back_inserter(diff));
    e.v_structures = diff.size();
    return e;
}

/// Percent increase of kl_method over kl_star. nullopt marks an infinite or
/// undefined ratio (excluded from means).
inline std::optional<double> delta_kl(double kl_method, double kl_star) {
    if (std::isinf(kl_method) || std::isinf(kl_star) || std::isnan(kl_method) || std::isnan(kl_star)) return std::nullopt;
    if (kl_star == 0) {
        if (kl_method == 0) return 0.0;
        return std::nullopt;
    }
    return 100.0 * (kl_method - kl_star) / kl_star;
}

struct ExperimentConfig {
    std::size_t nodes = 10;
    int max_parents = 5;
    std::size_t records = 50;
    std::size_t trials = 100;
    double alpha = 0.05;
    std::optional<double> pcstar_alpha;  // unset: same as alpha
    std::uint64_t seed = 1;
    std::vector<Method> methods{Method::pc, Method::pcstar};
    bool stall_budget = false;  // cap PC at the stall cutoff of PC* work
    std::size_t kl_samples = kDefaultKlSamples;

    void validate() const {
        if (nodes < 2) throw Error("N must be at least 2");
        if (max_parents < 0) throw Error("K must be non-negative");
        if (trials < 1) throw Error("need at least one trial");
        if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0, 1)");
        if (pcstar_alpha && !(*pcstar_alpha > 0 && *pcstar_alpha < 1)) throw Error("pcstar alpha must lie in (0, 1)");
        if (methods.empty()) throw Error("no methods selected");
    }
    bool uses(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }
};

struct MethodResult {
    std::size_t adj_errors = 0;
    std::size_t v_errors = 0;
    double kl = 0;
    double kl_se = 0;
    std::uint64_t work = 0;
    std::uint64_t tests = 0;
    bool stalled = false;
    bool fallback = false;
};

struct TrialResult {
    std::size_t nodes = 0;
    std::size_t records = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t true_edges = 0;
    std::map<Method, MethodResult> methods;

    friend bool operator==(const TrialResult& a, const TrialResult& b) {
        return a.nodes == b.nodes && a.records == b.records && a.trial == b.trial && a.seed == b.seed && a.true_edges == b.true_edges && a.methods.size() == b.methods.size() &&
               std::equal(a.methods.begin(), a.methods.end(), b.methods.begin(), [](const auto& x, const auto& y) {
                   const auto& p = x.second;
                   const auto& q = y.second;
                   return x.first == y.first && p.adj_errors == q.adj_errors && p.v_errors == q.v_errors &&
                          (p.kl == q.kl || (std::isnan(p.kl) && std::isnan(q.kl))) && p.work == q.work && p.tests == q.tests &&
                          p.stalled == q.stalled && p.fallback == q.fallback;
               });
    }
};

/// Trial seed for one (N, N_r) cell; independent of run order and grid layout.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t nodes, std::size_t records, std::size_t trial) {
    return derive_seed(derive_seed(master, nodes * 1000003ULL + records), trial);
}

/// The generating network and its records for one trial.
struct TrialData {
    BayesNet truth;
    Dataset data;
};

inline TrialData generate_trial(std::size_t nodes, int max_parents, std::size_t records, std::uint64_t seed) {
    Rng structure_rng(derive_seed(seed, 0));
    Rng param_rng(derive_seed(seed, 1));
    Rng data_rng(derive_seed(seed, 2));
    auto dag = random_structure(nodes, max_parents, structure_rng);
    auto truth = sample_uniform_parameters(dag, param_rng);
    auto data = sample_records(truth, records, data_rng);
    return {std::move(truth), std::move(data)};
}

/// Evaluates a learned pattern and the DAG used for its parameters.
inline MethodResult score_learned(const TrialData& td, const Pattern& pattern, const Dag& dag, std::uint64_t kl_seed,
                                  std::size_t kl_samples) {
    MethodResult r;
    const auto err = structural_errors(pattern, td.truth.dag());
    r.adj_errors = err.adjacencies;
    r.v_errors = err.v_structures;
    const auto learned = map_parameters(dag, td.data, PriorSpec::k2());
    Rng kl_rng(kl_seed);
    const auto kl = kl_divergence(td.truth, learned, kl_rng, kl_samples);
    r.kl = kl.value;
    r.kl_se = kl.std_error;
    return r;
}

/// Runs PC (standard tests) or PC* (hybrid tests) on the trial's records,
/// extends the pattern to a DAG and scores it.
inline MethodResult run_pc_method(const TrialData& td, bool hybrid, double alpha, std::optional<std::uint64_t> work_budget,
                                  std::uint64_t seed, std::size_t kl_samples) {
    pc::SearchConfig sc;
    sc.alpha = alpha;
    sc.tester = hybrid ? pc::TestKind::hybrid : pc::TestKind::standard;
    sc.work_budget = work_budget;
    const auto outcome = pc::pc_search(td.data, sc);
    Rng ext_rng(derive_seed(seed, 0));
    const auto ext = extend_pattern(outcome.pattern, ext_rng);
    auto r = score_learned(td, outcome.pattern, ext.dag, derive_seed(seed, 1), kl_samples);
    r.work = outcome.work;
    r.tests = outcome.tests;
    r.stalled = outcome.stalled;
    r.fallback = ext.fallback;
    return r;
}

inline MethodResult run_gtt_method(const TrialData& td, std::uint64_t seed, std::size_t kl_samples) {
    const auto dag = gtt::gtt_search(td.data, PriorSpec::k2());
    auto r = score_learned(td, pattern_of_dag(dag), dag, derive_seed(seed, 1), kl_samples);
    return r;
}

/// One pass of the testing loop: random network, records, every configured
/// learner, structural errors and KL against the generating network.
/// Fully determined by the trial seed.
inline TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial, std::uint64_t seed,
                             std::optional<std::uint64_t> pc_work_budget = std::nullopt) {
    const auto td = generate_trial(cfg.nodes, cfg.max_parents, cfg.records, seed);
    TrialResult res;
    res.nodes = cfg.nodes;
    res.records = cfg.records;
    res.trial = trial;
    res.seed = seed;
    res.true_edges = td.truth.dag().edge_count();
    for (Method m : cfg.methods) {
        const std::uint64_t mseed = derive_seed(seed, 100 + static_cast<std::uint64_t>(m));
        switch (m) {
            case Method::pc:
                res.methods[m] = run_pc_method(td, false, cfg.alpha, pc_work_budget, mseed, cfg.kl_samples);
                break;
            case Method::pcstar:
                res.methods[m] = run_pc_method(td, true, cfg.pcstar_alpha.value_or(cfg.alpha), std::nullopt, mseed, cfg.kl_samples);
                break;
            case Method::gtt:
                res.methods[m] = run_gtt_method(td, mseed, cfg.kl_samples);
                break;
        }
    }
    return res;
}

/// Runs f(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; the first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                    next.store(n);
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/// PC* work per trial, for budgeting PC.
inline std::vector<double> pcstar_work(const ExperimentConfig& cfg, unsigned threads) {
    std::vector<double> work(cfg.trials);
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
        const auto td = generate_trial(cfg.nodes, cfg.max_parents, cfg.records, trial_seed(cfg.seed, cfg.nodes, cfg.records, t));
        pc::SearchConfig sc;
        sc.alpha = cfg.pcstar_alpha.value_or(cfg.alpha);
        sc.tester = pc::TestKind::hybrid;
        work[t] = static_cast<double>(pc::pc_search(td.data, sc).work);
    });
    return work;
}

/// All trials of one configuration, in trial order regardless of threads.
inline std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg, unsigned threads = 1) {
    cfg.validate();
    std::optional<std::uint64_t> budget;
    if (cfg.stall_budget && cfg.uses(Method::pc) && cfg.trials >= 2) {
        budget = static_cast<std::uint64_t>(std::ceil(pc::stall_cutoff(pcstar_work(cfg, threads))));
    }
    std::vector<TrialResult> out(cfg.trials);
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
        out[t] = run_trial(cfg, t, trial_seed(cfg.seed, cfg.nodes, cfg.records, t), budget);
    });
    return out;
}

/// Mean with a one-sided confidence half-width z * sd / sqrt(n).
struct MeanCi {
    double mean = 0;
    double half_width = 0;
    std::size_t n = 0;

    double lower() const { return mean - half_width; }
    double upper() const { return mean + half_width; }
};

/// Standard normal quantile for a one-sided confidence level, by bisection.
inline double one_sided_z(double level) {
    if (!(level > 0.5 && level < 1)) throw Error("confidence level must lie in (0.5, 1)");
    double lo = 0, hi = 40;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (0.5 * std::erfc(mid / std::sqrt(2.0)) > 1 - level) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline MeanCi mean_ci(const std::vector<double>& xs, double z) {
    MeanCi m;
    m.n = xs.size();
    if (xs.empty()) return m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return m;
    double ss = 0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.half_width = z * std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
    return m;
}

struct SummaryStats {
    Method method = Method::pc;
    MeanCi delta_adj;
    MeanCi delta_v;
    MeanCi delta_kl;  // percent; excludes infinite/undefined trials
    std::size_t n_trials = 0;
    std::size_t n_excluded = 0;
    double stall_prob = 0;
    double mean_work = 0;
    double mean_kl = 0;        // this method's KL, finite trials only
    double mean_kl_star = 0;   // PC*'s KL over the same trials
};

/// Deltas of `method` relative to PC* (positive favours PC*).
inline SummaryStats summarize(const std::vector<TrialResult>& results, Method method, double confidence = 0.99) {
    const double z = one_sided_z(confidence);
    SummaryStats s;
    s.method = method;
    s.n_trials = results.size();
    std::vector<double> adj, v, kl;
    double stalls = 0, work = 0, kl_sum = 0, kl_star_sum = 0;
    std::size_t kl_n = 0;
    for (const auto& r : results) {
        const auto& m = r.methods.at(method);
        const auto& star = r.methods.at(Method::pcstar);
        adj.push_back(static_cast<double>(m.adj_errors) - static_cast<double>(star.adj_errors));
        v.push_back(static_cast<double>(m.v_errors) - static_cast<double>(star.v_errors));
        if (auto d = delta_kl(m.kl, star.kl)) {
            kl.push_back(*d);
            kl_sum += m.kl;
            kl_star_sum += star.kl;
            ++kl_n;
        } else {
            ++s.n_excluded;
        }
        stalls += m.stalled;
        work += static_cast<double>(m.work);
    }
    s.delta_adj = mean_ci(adj, z);
    s.delta_v = mean_ci(v, z);
    s.delta_kl = mean_ci(kl, z);
    if (!results.empty()) {
        s.stall_prob = stalls / static_cast<double>(results.size());
        s.mean_work = work / static_cast<double>(results.size());
    }
    if (kl_n) {
        s.mean_kl = kl_sum / static_cast<double>(kl_n);
        s.mean_kl_star = kl_star_sum / static_cast<double>(kl_n);
    }
    return s;
}

// ---- reports --------------------------------------------------------------

inline std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline const char* kReportHeader =
    "N,N_r,method,mean_delta_adj,ci_adj,mean_delta_v,ci_v,mean_delta_kl_pct,ci_kl,stall_prob,mean_time_s,n_trials,n_excluded\n";

/// One report row. mean_time_s carries the mean deterministic work units.
inline std::string report_row(std::size_t nodes, std::size_t records, const SummaryStats& s) {
    std::string row = std::to_string(nodes) + "," + std::to_string(records) + "," + to_string(s.method);
    for (double x : {s.delta_adj.mean, s.delta_adj.half_width, s.delta_v.mean, s.delta_v.half_width, s.delta_kl.mean, s.delta_kl.half_width,
                     s.stall_prob, s.mean_work}) {
        row += "," + fmt_num(x);
    }
    return row + "," + std::to_string(s.n_trials) + "," + std::to_string(s.n_excluded) + "\n";
}

/// Report rows for every method of one experiment, PC* last.
inline std::string report_rows(const ExperimentConfig& cfg, const std::vector<TrialResult>& results) {
    std::string out;
    for (Method m : {Method::pc, Method::gtt, Method::pcstar}) {
        if (cfg.uses(m) && cfg.uses(Method::pcstar)) out += report_row(cfg.nodes, cfg.records, summarize(results, m));
    }
    return out;
}

inline nlohmann::json to_json(const TrialResult& r) {
    nlohmann::json methods = nlohmann::json::object();
    for (const auto& [m, mr] : r.methods) {
        nlohmann::json kl = std::isfinite(mr.kl) ? nlohmann::json(mr.kl) : nlohmann::json(nullptr);
        methods[to_string(m)] = {{"adj_errors", mr.adj_errors}, {"v_errors", mr.v_errors}, {"kl", kl},
                                 {"kl_se", mr.kl_se},           {"work", mr.work},         {"tests", mr.tests},
                                 {"stalled", mr.stalled},       {"fallback", mr.fallback}};
    }
    return {{"N", r.nodes}, {"N_r", r.records}, {"trial", r.trial}, {"seed", r.seed}, {"true_edges", r.true_edges}, {"methods", methods}};
}

inline TrialResult trial_from_json(const nlohmann::json& j) {
    TrialResult r;
    r.nodes = j.at("N").get<std::size_t>();
    r.records = j.at("N_r").get<std::size_t>();
    r.trial = j.at("trial").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.true_edges = j.at("true_edges").get<std::size_t>();
    for (const auto& [name, mj] : j.at("methods").items()) {
        MethodResult mr;
        mr.adj_errors = mj.at("adj_errors").get<std::size_t>();
        mr.v_errors = mj.at("v_errors").get<std::size_t>();
        mr.kl = mj.at("kl").is_null() ? std::numeric_limits<double>::infinity() : mj.at("kl").get<double>();
        mr.kl_se = mj.at("kl_se").get<double>();
        mr.work = mj.at("work").get<std::uint64_t>();
        mr.tests = mj.at("tests").get<std::uint64_t>();
        mr.stalled = mj.at("stalled").get<bool>();
        mr.fallback = mj.at("fallback").get<bool>();
        r.methods[method_from_string(name)] = mr;
    }
    return r;
}

inline std::string trials_jsonl(const std::vector<TrialResult>& results) {
    std::string out;
    for (const auto& r : results) out += to_json(r).dump() + "\n";
    return out;
}

// ---- stall experiment -------------------------------------------------------

struct StallConfig {
    std::vector<std::pair<std::size_t, std::size_t>> grid{{10, 100}};  // (N, N_r)
    int max_parents = 5;
    std::size_t trials = 50;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    bool unbounded = false;        // no budgets: stall probabilities are 0
    double pcstar_factor = 100.0;  // PC* stalls beyond this multiple of its median work
};

struct StallTrial {
    double work_pc = 0;
    double work_pcstar = 0;
    bool stalled_pc = false;
    bool stalled_pcstar = false;
};

struct StallCell {
    std::size_t nodes = 0;
    std::size_t records = 0;
    std::size_t trials = 0;
    double tau = 0;  // PC work budget
    double stall_pc = 0;
    double stall_pcstar = 0;
    double mean_work_pc = 0;
    double mean_work_pcstar = 0;
    std::vector<StallTrial> runs;
};

inline double median(std::vector<double> xs) {
    if (xs.empty()) return 0;
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

/// For each (N, N_r) cell: run PC* on every trial first to get its work
/// distribution, set tau = stall_cutoff(PC* work), then run PC with budget
/// tau. PC* counts as stalled past pcstar_factor x its median work.
inline std::vector<StallCell> stall_experiment(const StallConfig& cfg, unsigned threads = 1) {
    if (cfg.trials < 2 && !cfg.unbounded) throw Error("stall experiment needs at least two trials");
    std::vector<StallCell> cells;
    for (auto [nodes, records] : cfg.grid) {
        if (nodes < 2) throw Error("N must be at least 2");
        std::vector<double> star_work(cfg.trials);
        std::vector<std::uint8_t> star_truncated(cfg.trials, 0);
        parallel_for(cfg.trials, threads, [&](std::size_t t) {
            const auto td = generate_trial(nodes, cfg.max_parents, records, trial_seed(cfg.seed, nodes, records, t));
            pc::SearchConfig sc;
            sc.alpha = cfg.alpha;
            sc.tester = pc::TestKind::hybrid;
            const auto o = pc::pc_search(td.data, sc);
            star_work[t] = static_cast<double>(o.work);
            star_truncated[t] = o.stalled;
        });
        StallCell cell;
        cell.nodes = nodes;
        cell.records = records;
        cell.trials = cfg.trials;
        std::optional<std::uint64_t> budget;
        cell.runs.resize(cfg.trials);
        if (!cfg.unbounded) {
            cell.tau = pc::stall_cutoff(star_work);
            budget = static_cast<std::uint64_t>(std::ceil(cell.tau));
            const double star_limit = cfg.pcstar_factor * median(star_work);
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                cell.runs[t].stalled_pcstar = star_truncated[t] || star_work[t] > star_limit;
                cell.stall_pcstar += cell.runs[t].stalled_pcstar ? 1.0 : 0.0;
            }
        } else {
            cell.tau = std::numeric_limits<double>::infinity();
        }
        std::vector<double> pc_work(cfg.trials);
        std::vector<std::uint8_t> pc_stalled(cfg.trials, 0);
        parallel_for(cfg.trials, threads, [&](std::size_t t) {
            const auto td = generate_trial(nodes, cfg.max_parents, records, trial_seed(cfg.seed, nodes, records, t));
            pc::SearchConfig sc;
            sc.alpha = cfg.alpha;
            sc.tester = pc::TestKind::standard;
            sc.work_budget = budget;
            const auto o = pc::find_independence_graph(td.data.variables(), pc::DataTester(td.data, sc.alpha, sc.tester), sc);
            pc_work[t] = static_cast<double>(o.work);
            pc_stalled[t] = o.stalled;
        });
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            cell.runs[t].work_pc = pc_work[t];
            cell.runs[t].work_pcstar = star_work[t];
            cell.runs[t].stalled_pc = pc_stalled[t];
            cell.stall_pc += pc_stalled[t];
            cell.mean_work_pc += pc_work[t];
            cell.mean_work_pcstar += star_work[t];
        }
        const auto n = static_cast<double>(cfg.trials);
        cell.stall_pc /= n;
        cell.stall_pcstar /= n;
        cell.mean_work_pc /= n;
        cell.mean_work_pcstar /= n;
        cells.push_back(cell);
    }
    return cells;
}

inline std::string stall_report(const std::vector<StallCell>& cells) {
    std::string out = "N,N_r,method,stall_prob,tau,mean_work,n_trials\n";
    for (const auto& c : cells) {
        for (auto [name, prob, work] : {std::tuple{"pc", c.stall_pc, c.mean_work_pc}, std::tuple{"pcstar", c.stall_pcstar, c.mean_work_pcstar}}) {
            out += std::to_string(c.nodes) + "," + std::to_string(c.records) + "," + name + "," + fmt_num(prob) + "," + fmt_num(c.tau) + "," +
                   fmt_num(work) + "," + std::to_string(c.trials) + "\n";
        }
    }
    return out;
}

// ---- alpha sweep ----------------------------------------------------------

struct AlphaSweepConfig {
    std::size_t nodes = 10;
    std::size_t records = 100;
    int max_parents = 5;
    std::vector<double> alphas{0.0001, 0.001, 0.01, 0.05, 0.2};
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::optional<double> pcstar_alpha;  // unset: PC* uses each swept alpha too
};

struct AlphaRow {
    double alpha = 0;
    SummaryStats summary;
};

/// Runs the testing loop once per alpha over the same networks.
inline std::vector<AlphaRow> alpha_sweep(const AlphaSweepConfig& cfg, unsigned threads = 1,
                                         std::vector<std::vector<TrialResult>>* raw = nullptr) {
    std::vector<AlphaRow> rows;
    for (double a : cfg.alphas) {
        ExperimentConfig ec;
        ec.nodes = cfg.nodes;
        ec.records = cfg.records;
        ec.max_parents = cfg.max_parents;
        ec.trials = cfg.trials;
        ec.alpha = a;
        ec.pcstar_alpha = cfg.pcstar_alpha;
        ec.seed = cfg.seed;
        ec.methods = {Method::pc, Method::pcstar};
        auto results = run_experiment(ec, threads);
        rows.push_back({a, summarize(results, Method::pc)});
        if (raw) raw->push_back(std::move(results));
    }
    return rows;
}

inline std::string alpha_report(const AlphaSweepConfig& cfg, const std::vector<AlphaRow>& rows) {
    std::string out = "alpha,N,N_r,mean_delta_kl_pct,ci_kl,mean_kl_pc,mean_kl_pcstar,mean_delta_adj,ci_adj,mean_delta_v,ci_v,n_trials,n_excluded\n";
    for (const auto& r : rows) {
        const auto& s = r.summary;
        out += fmt_num(r.alpha) + "," + std::to_string(cfg.nodes) + "," + std::to_string(cfg.records);
        for (double x : {s.delta_kl.mean, s.delta_kl.half_width, s.mean_kl, s.mean_kl_star, s.delta_adj.mean, s.delta_adj.half_width,
                         s.delta_v.mean, s.delta_v.half_width}) {
            out += "," + fmt_num(x);
        }
        out += "," + std::to_string(s.n_trials) + "," + std::to_string(s.n_excluded) + "\n";
    }
    return out;
}

}  // namespace pcstar::bench
