#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "pcstar/bayes_net.hpp"
#include "pcstar/equivalence.hpp"
#include "pcstar/graph.hpp"
#include "pcstar/stats/hybrid.hpp"

namespace pcstar::pc {

/// Outcome of one conditional-independence query, with its cost in work units.
struct CiDecision {
    bool independent = false;
    std::uint64_t work = 1;
};

/// Removed pair (min, max) -> conditioning set that separated it.
using SepsetMap = std::map<Edge, std::vector<int>>;

enum class TestKind { standard, hybrid };

struct SearchConfig {
    double alpha = 0.05;
    std::optional<std::size_t> max_cond_size;  // unset: no cap
    std::optional<double> time_budget;         // wall-clock seconds
    std::optional<std::uint64_t> work_budget;  // deterministic work units
    TestKind tester = TestKind::hybrid;
    PriorSpec priors = PriorSpec::k2();

    void validate() const {
        if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0, 1)");
        if (time_budget && *time_budget < 0) throw Error("time budget must be non-negative");
    }
};

struct Skeleton {
    Pattern graph;
    SepsetMap sepsets;
    bool stalled = false;
    std::uint64_t tests = 0;
    std::uint64_t work = 0;
};

struct SearchOutcome {
    Pattern pattern;
    SepsetMap sepsets;
    bool stalled = false;
    double elapsed = 0;  // seconds
    std::uint64_t tests = 0;
    std::uint64_t work = 0;
};

/// Std-IT (raw table) or Hybrid-IT (smoothed table) over a dataset.
class DataTester {
public:
    DataTester(const Dataset& data, double alpha, TestKind kind, PriorSpec priors = PriorSpec::k2())
        : data_(data), alpha_(alpha), kind_(kind), priors_(std::move(priors)) {}

    CiDecision operator()(int x, int y, const std::vector<int>& z) const {
        const auto counts = stats::count_table(data_, x, y, z);
        const bool hybrid = kind_ == TestKind::hybrid;
        const auto result = hybrid ? stats::chi_squared_test(stats::smoothed_table(counts, priors_), alpha_)
                                   : stats::chi_squared_test(counts, alpha_);
        return {result.independent, stats::test_work(data_.rows(), z.size(), counts.cell_count(), hybrid)};
    }

private:
    const Dataset& data_;
    double alpha_;
    TestKind kind_;
    PriorSpec priors_;
};

/// Perfect tester answering with d-separation in a known DAG.
class OracleTester {
public:
    explicit OracleTester(const Dag& truth) : truth_(truth) {}
    CiDecision operator()(int x, int y, const std::vector<int>& z) const { return {d_separated(truth_, x, y, z), 1}; }

private:
    const Dag& truth_;
};

namespace detail {

/// Advances a sorted index combination of size k over [0, n). False when done.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Skeleton phase. Starting from the complete graph, level n tests every
/// adjacent pair (ascending) against each size-n subset of Adj(x)\{y}, then
/// of Adj(y)\{x}, lexicographically and without repeats; the first
/// independence removes the edge and records its sepset. Stops once no node
/// has more than n adjacencies, or when a cap or budget truncates the loop
/// (stalled).
template <class Tester>
Skeleton find_independence_graph(const std::vector<Variable>& vars, Tester&& test, const SearchConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const int nv = static_cast<int>(vars.size());
    Skeleton out{Pattern::complete(vars), {}, false, 0, 0};
    Pattern& g = out.graph;

    auto over_budget = [&] {
        if (cfg.work_budget && out.work >= *cfg.work_budget) return true;
        if (cfg.time_budget && std::chrono::duration<double>(clock::now() - start).count() >= *cfg.time_budget) return true;
        return false;
    };
    auto degree = [&](int v) {
        int d = 0;
        for (int u = 0; u < nv; ++u) d += (u != v && g.adjacent(u, v));
        return d;
    };

    for (std::size_t level = 0;; ++level) {
        bool any = false;
        for (int v = 0; v < nv && !any; ++v) any = static_cast<std::size_t>(degree(v)) > level;
        if (!any) break;
        if (cfg.max_cond_size && level > *cfg.max_cond_size) {
            out.stalled = true;
            break;
        }
        for (int x = 0; x < nv; ++x) {
            for (int y = x + 1; y < nv; ++y) {
                if (!g.adjacent(x, y)) continue;
                std::set<std::vector<int>> tried;
                bool removed = false;
                for (int side : {x, y}) {
                    std::vector<int> pool;
                    for (int u = 0; u < nv; ++u) {
                        if (u != x && u != y && g.adjacent(side, u)) pool.push_back(u);
                    }
                    if (pool.size() < level) continue;
                    std::vector<std::size_t> idx(level);
                    for (std::size_t i = 0; i < level; ++i) idx[i] = i;
                    do {
                        std::vector<int> z(level);
                        for (std::size_t i = 0; i < level; ++i) z[i] = pool[idx[i]];
                        if (!tried.insert(z).second) continue;
                        if (over_budget()) {
                            out.stalled = true;
                            return out;
                        }
                        const CiDecision d = test(x, y, z);
                        ++out.tests;
                        out.work += d.work;
                        if (d.independent) {
                            g.remove(x, y);
                            out.sepsets[{x, y}] = std::move(z);
                            removed = true;
                            break;
                        }
                    } while (detail::next_combination(idx, pool.size()));
                    if (removed) break;
                }
            }
        }
    }
    return out;
}

/// Orientation phase. Unshielded triples a - c - b (a < b, c not in the
/// sepset of a, b) become colliders, visited in ascending (a, c, b) order;
/// an arc that would reverse an earlier one or close a cycle is skipped.
/// Then R1-R3 run to closure under the same guard.
inline Pattern orient_edges(const Pattern& skeleton, const SepsetMap& sepsets) {
    Pattern p = skeleton;
    const int n = static_cast<int>(p.size());
    for (int a = 0; a < n; ++a) {
        for (int c = 0; c < n; ++c) {
            if (c == a || !p.adjacent(a, c)) continue;
            for (int b = a + 1; b < n; ++b) {
                if (b == c || !p.adjacent(b, c) || p.adjacent(a, b)) continue;
                const auto it = sepsets.find({a, b});
                if (it == sepsets.end()) continue;
                if (std::find(it->second.begin(), it->second.end(), c) != it->second.end()) continue;
                orient_if_acyclic(p, a, c);
                orient_if_acyclic(p, b, c);
            }
        }
    }
    meek_closure(p);
    return p;
}

/// Skeleton search followed by orientation, with any tester.
template <class Tester>
SearchOutcome pc_search(const std::vector<Variable>& vars, Tester&& test, const SearchConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    auto sk = find_independence_graph(vars, test, cfg);
    SearchOutcome out;
    out.pattern = orient_edges(sk.graph, sk.sepsets);
    out.sepsets = std::move(sk.sepsets);
    out.stalled = sk.stalled;
    out.tests = sk.tests;
    out.work = sk.work;
    out.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

/// PC (standard tester) or PC* (hybrid tester) on a dataset.
inline SearchOutcome pc_search(const Dataset& data, const SearchConfig& cfg) {
    cfg.validate();
    DataTester tester(data, cfg.alpha, cfg.tester, cfg.priors);
    return pc_search(data.variables(), tester, cfg);
}

/// Stall cutoff: mean + 5 sample standard deviations of PC* run times.
inline double stall_cutoff(const std::vector<double>& times) {
    if (times.size() < 2) throw Error("stall cutoff needs at least two run times");
    double mean = 0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(times.size());
    double ss = 0;
    for (double t : times) ss += (t - mean) * (t - mean);
    return mean + 5.0 * std::sqrt(ss / static_cast<double>(times.size() - 1));
}

}  // namespace pcstar::pc
