// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Reports from the experiment criteria are also written
// next to the binary for inspection.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "pcstar/bayes_net.hpp"
#include "pcstar/bench.hpp"
#include "pcstar/equivalence.hpp"
#include "pcstar/gtt.hpp"
#include "pcstar/pc.hpp"
#include "pcstar/stats/hybrid.hpp"

using namespace pcstar;

namespace {

constexpr std::uint64_t kMasterSeed = 1;
constexpr unsigned kThreads = 2;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<double> random_simplex(std::size_t n, Rng& rng) {
    std::vector<double> p(n);
    double s = 0;
    for (auto& x : p) s += (x = rng.exponential());
    for (auto& x : p) x /= s;
    return p;
}

// ---- 1 -------------------------------------------------------------------

Verdict projection_preserves_ci() {
    Rng rng(derive_seed(kMasterSeed, 1));
    int agree = 0, ci_cases = 0;
    const int total = 1000;
    for (int i = 0; i < total; ++i) {
        const std::size_t nz = static_cast<std::size_t>(i % 3);
        const auto vars = make_variables(2 + nz);
        const std::size_t qz = std::size_t{1} << nz;
        std::vector<double> probs;
        if (i < 500) {
            probs = random_simplex(4 * qz, rng);
        } else {
            // P(x, y, z) = P(x | z) P(y | z) P(z); x is the most significant index digit.
            probs.assign(4 * qz, 0.0);
            const auto pz = random_simplex(qz, rng);
            for (std::size_t z = 0; z < qz; ++z) {
                const double px1 = rng.uniform(), py1 = rng.uniform();
                for (int x = 0; x < 2; ++x) {
                    for (int y = 0; y < 2; ++y) {
                        probs[(static_cast<std::size_t>(x) * 2 + static_cast<std::size_t>(y)) * qz + z] =
                            (x ? px1 : 1 - px1) * (y ? py1 : 1 - py1) * pz[z];
                    }
                }
            }
        }
        const JointTable joint(vars, probs);
        std::vector<int> z;
        for (std::size_t k = 0; k < nz; ++k) z.push_back(static_cast<int>(2 + k));
        const auto fragment = stats::build_fragment(vars[0], vars[1], std::vector<Variable>(vars.begin() + 2, vars.end()));
        const auto projected = joint_table(project(joint, fragment));
        const bool in_p = ci_by_conditionals(joint, 0, 1, z, 1e-9);
        const bool in_proj = ci_by_conditionals(projected, 0, 1, z, 1e-9);
        agree += in_p == in_proj;
        ci_cases += in_p;
    }
    return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agree (" + std::to_string(ci_cases) + " CI cases)"};
}

// ---- 2 -------------------------------------------------------------------

Verdict chi_squared_calibration() {
    Rng rng(derive_seed(kMasterSeed, 2));
    const int reps = 5000;
    int std_rej = 0, hyb_rej = 0;
    Dataset proto(make_variables(2));
    for (int r = 0; r < reps; ++r) {
        Dataset data = proto;
        data.reserve(200);
        for (int i = 0; i < 200; ++i) {
            const int row[2] = {static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2))};
            data.add_row(row);
        }
        std_rej += !stats::std_it(data, 0, 1, {}, 0.05).independent;
        hyb_rej += !stats::hybrid_it(data, 0, 1, {}, 0.05).independent;
    }
    const double s = static_cast<double>(std_rej) / reps, h = static_cast<double>(hyb_rej) / reps;
    return {std::abs(s - 0.05) <= 0.015 && h <= s + 0.01, "std rate " + fmt("%.4f", s) + ", hybrid rate " + fmt("%.4f", h)};
}

// ---- 3 -------------------------------------------------------------------

Verdict oracle_soundness() {
    Rng rng(derive_seed(kMasterSeed, 3));
    int exact = 0;
    for (int t = 0; t < 200; ++t) {
        const auto truth = bench::random_structure(8, 5, rng);
        pc::OracleTester oracle(truth);
        exact += pc::pc_search(truth.variables(), oracle, pc::SearchConfig{}).pattern == pattern_of_dag(truth);
    }
    return {exact == 200, std::to_string(exact) + "/200 patterns recovered"};
}

// ---- 4 -------------------------------------------------------------------

double factorial(unsigned n) {
    double f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

double factorial_log_score(const Dag& dag, const Dataset& data) {
    double log_p = 0;
    for (std::size_t v = 0; v < dag.size(); ++v) {
        const int node = static_cast<int>(v);
        const auto r = static_cast<unsigned>(dag.arity(node));
        std::size_t q = 1;
        for (int p : dag.parents(node)) q *= static_cast<std::size_t>(dag.arity(p));
        std::vector<unsigned> n(q * r, 0);
        for (std::size_t row = 0; row < data.rows(); ++row) {
            std::size_t j = 0;
            for (int p : dag.parents(node)) j = j * static_cast<std::size_t>(dag.arity(p)) + static_cast<std::size_t>(data.at(row, p));
            ++n[j * r + static_cast<std::size_t>(data.at(row, node))];
        }
        for (std::size_t j = 0; j < q; ++j) {
            unsigned nij = 0;
            double term = factorial(r - 1);
            for (unsigned k = 0; k < r; ++k) {
                nij += n[j * r + k];
                term *= factorial(n[j * r + k]);
            }
            log_p += std::log(term / factorial(nij + r - 1));
        }
    }
    return log_p;
}

Verdict score_oracle() {
    double worst = 0;
    Dataset four(make_variables(2));
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const int row[2] = {x, y};
            four.add_row(row);
        }
    }
    Dag empty(make_variables(2)), arc(make_variables(2));
    arc.add_edge(0, 1);
    const double e0 = gtt::log_marginal_likelihood(empty, four), e1 = gtt::log_marginal_likelihood(arc, four);
    worst = std::max({worst, std::abs(e0 - std::log(1.0 / 900)), std::abs(e1 - std::log(1.0 / 1080)),
                      std::abs(e0 - factorial_log_score(empty, four)), std::abs(e1 - factorial_log_score(arc, four))});

    Rng rng(derive_seed(kMasterSeed, 4));
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng.below(3);
        auto vars = make_variables(n);
        for (auto& v : vars) v.arity = 2 + static_cast<int>(rng.below(2));
        Dag dag(vars);
        for (int a = 0; a < static_cast<int>(n); ++a) {
            for (int b = 0; b < static_cast<int>(n); ++b) {
                if (a != b && !dag.adjacent(a, b) && !dag.would_create_cycle(a, b) && rng.uniform() < 0.4) dag.add_edge(a, b);
            }
        }
        Dataset data(vars);
        const auto records = rng.below(9);
        for (std::uint64_t r = 0; r < records; ++r) {
            std::vector<int> row;
            for (const auto& v : vars) row.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(v.arity))));
            data.add_row(row);
        }
        worst = std::max(worst, std::abs(gtt::log_marginal_likelihood(dag, data) - factorial_log_score(dag, data)));
    }
    return {worst <= 1e-9, "max |error| " + fmt("%.3g", worst) + " over 102 instances"};
}

// ---- 5, 6 ----------------------------------------------------------------

struct BenchRun {
    std::string report;
    bench::SummaryStats pc;
};

BenchRun table_cell(std::size_t records, std::size_t trials, unsigned threads) {
    bench::ExperimentConfig cfg;
    cfg.nodes = 10;
    cfg.max_parents = 5;
    cfg.records = records;
    cfg.trials = trials;
    cfg.seed = kMasterSeed;
    cfg.methods = {bench::Method::pc, bench::Method::pcstar};
    const auto results = bench::run_experiment(cfg, threads);
    return {std::string(bench::kReportHeader) + bench::report_rows(cfg, results) + bench::trials_jsonl(results),
            bench::summarize(results, bench::Method::pc)};
}

std::string describe(const char* name, const bench::MeanCi& m) {
    return std::string(name) + " " + fmt("%.3f", m.mean) + " (lower " + fmt("%.3f", m.lower()) + ")";
}

bool within_factor(double value, double target, double factor) { return value >= target / factor && value <= target * factor; }

Verdict table_small_sample(std::string& report) {
    const auto run = table_cell(50, 200, kThreads);
    report = run.report;
    const auto& s = run.pc;
    const bool bounds = s.delta_adj.lower() > 0 && s.delta_v.lower() > 0 && s.delta_kl.lower() > 0;
    const bool points = within_factor(s.delta_adj.mean, 1.63, 2.5) && within_factor(s.delta_v.mean, 8.07, 2.5) &&
                        within_factor(s.delta_kl.mean, 21.8, 2.5);
    return {bounds && points, describe("d_adj", s.delta_adj) + ", " + describe("d_v", s.delta_v) + ", " + describe("d_kl%", s.delta_kl) +
                                  ", excluded " + std::to_string(s.n_excluded)};
}

Verdict table_large_sample(std::string& report) {
    const auto run = table_cell(6400, 100, kThreads);
    report = run.report;
    const auto& s = run.pc;
    return {!(s.delta_adj.lower() > 0), describe("d_adj", s.delta_adj)};
}

// ---- 7 -------------------------------------------------------------------

bench::StallConfig stall_config() {
    bench::StallConfig cfg;
    cfg.grid = {{40, 100}};
    cfg.max_parents = 5;
    cfg.trials = 50;
    cfg.seed = kMasterSeed;
    return cfg;
}

Verdict stall_reduction(std::string& report) {
    const auto cells = bench::stall_experiment(stall_config(), kThreads);
    report = bench::stall_report(cells);
    const auto& c = cells.front();
    return {c.stall_pcstar < 0.05 && c.stall_pc >= c.stall_pcstar + 0.10,
            "stall(PC) " + fmt("%.2f", c.stall_pc) + ", stall(PC*) " + fmt("%.2f", c.stall_pcstar) + ", tau " + fmt("%.0f", c.tau) + " work units"};
}

// ---- 8 -------------------------------------------------------------------

bench::AlphaSweepConfig sweep_config() {
    bench::AlphaSweepConfig cfg;
    cfg.nodes = 10;
    cfg.records = 100;
    cfg.max_parents = 5;
    cfg.alphas = {0.0001, 0.001, 0.01, 0.05, 0.2};
    cfg.trials = 200;
    cfg.seed = kMasterSeed;
    return cfg;
}

Verdict alpha_direction(std::string& report) {
    const auto cfg = sweep_config();
    const auto rows = bench::alpha_sweep(cfg, kThreads);
    report = bench::alpha_report(cfg, rows);
    std::size_t best = 0;
    bool significant_negative = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].summary.mean_kl < rows[best].summary.mean_kl) best = i;
        significant_negative = significant_negative || rows[i].summary.delta_kl.upper() < 0;
    }
    const double at_best = rows[best].summary.delta_kl.mean;
    const double at_smallest = rows.front().summary.delta_kl.mean;
    return {at_best >= at_smallest && !significant_negative,
            "argmin KL(PC) alpha " + fmt("%g", rows[best].alpha) + ": d_kl " + fmt("%.2f", at_best) + "% vs " + fmt("%.2f", at_smallest) +
                "% at alpha 1e-4; significantly negative somewhere: " + (significant_negative ? "yes" : "no")};
}

// ---- 9 -------------------------------------------------------------------

Verdict determinism(const std::vector<std::string>& first) {
    std::vector<std::string> again;
    again.push_back(table_cell(50, 200, 1).report);
    again.push_back(table_cell(6400, 100, 1).report);
    again.push_back(bench::stall_report(bench::stall_experiment(stall_config(), 1)));
    const auto cfg = sweep_config();
    again.push_back(bench::alpha_report(cfg, bench::alpha_sweep(cfg, 1)));
    int same = 0;
    for (std::size_t i = 0; i < first.size(); ++i) same += first[i] == again[i];
    return {same == static_cast<int>(first.size()), std::to_string(same) + "/" + std::to_string(first.size()) +
                                                        " reports byte-identical on rerun (threads " + std::to_string(kThreads) + " then 1)"};
}

void save(const std::string& name, const std::string& text) { std::ofstream(name, std::ios::binary) << text; }

}  // namespace

int main() {
    int failures = 0;
    auto check = [&](int id, const char* what, double limit_s, const std::function<Verdict()>& f) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = f();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (limit_s > 0 && secs > limit_s) {
            v.pass = false;
            v.detail += "; over time limit";
        }
        failures += !v.pass;
        std::printf("[%s] criterion %d: %s -- %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, what, v.detail.c_str(), secs);
        std::fflush(stdout);
    };

    std::vector<std::string> reports(4);
    check(1, "projection preserves conditional independence", 60, projection_preserves_ci);
    check(2, "chi-squared calibration", 120, chi_squared_calibration);
    check(3, "oracle PC recovers the pattern", 60, oracle_soundness);
    check(4, "marginal likelihood matches factorial formula", 60, score_oracle);
    check(5, "PC* beats PC at N=10, N_r=50", 15 * 60, [&] { return table_small_sample(reports[0]); });
    check(6, "advantage vanishes at N=10, N_r=6400", 20 * 60, [&] { return table_large_sample(reports[1]); });
    check(7, "stall reduction at N=40, N_r=100", 30 * 60, [&] { return stall_reduction(reports[2]); });
    check(8, "alpha sweep direction at N=10, N_r=100", 45 * 60, [&] { return alpha_direction(reports[3]); });
    check(9, "reports are reproducible", 0, [&] { return determinism(reports); });

    save("acceptance_table_n10_nr50.txt", reports[0]);
    save("acceptance_table_n10_nr6400.txt", reports[1]);
    save("acceptance_stall_n40_nr100.csv", reports[2]);
    save("acceptance_alpha_sweep.csv", reports[3]);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
