#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "pcstar/bayes_net.hpp"
#include "pcstar/graph.hpp"

namespace pcstar::gtt {

/// Log of one family's Dirichlet-multinomial marginal likelihood:
/// sum_j [lnG(a_ij) - lnG(a_ij + N_ij) + sum_k (lnG(a_ijk + N_ijk) - lnG(a_ijk))].
inline double family_score(const Dataset& data, int node, const std::vector<int>& parents, const PriorSpec& priors) {
    const auto& vars = data.variables();
    const int r = vars.at(static_cast<std::size_t>(node)).arity;
    std::size_t q = 1;
    for (int p : parents) q *= static_cast<std::size_t>(vars.at(static_cast<std::size_t>(p)).arity);
    std::vector<double> counts(q * static_cast<std::size_t>(r), 0.0);
    for (std::size_t row = 0; row < data.rows(); ++row) {
        const auto rec = data.row(row);
        std::size_t j = 0;
        for (int p : parents) j = j * static_cast<std::size_t>(vars[static_cast<std::size_t>(p)].arity) + static_cast<std::size_t>(rec[static_cast<std::size_t>(p)]);
        counts[j * static_cast<std::size_t>(r) + static_cast<std::size_t>(rec[static_cast<std::size_t>(node)])] += 1.0;
    }
    double score = 0;
    for (std::size_t j = 0; j < q; ++j) {
        double n_ij = 0;
        for (int k = 0; k < r; ++k) {
            const double a = priors.alpha(node, parents, j, k);
            const double n = counts[j * static_cast<std::size_t>(r) + static_cast<std::size_t>(k)];
            n_ij += n;
            if (n > 0) score += std::lgamma(a + n) - std::lgamma(a);
        }
        if (n_ij > 0) {
            const double a_ij = priors.alpha_sum(node, parents, j, r);
            score += std::lgamma(a_ij) - std::lgamma(a_ij + n_ij);
        }
    }
    return score;
}

/// Memoized family scores keyed by (node, sorted parent list).
class FamilyScoreCache {
public:
    FamilyScoreCache(const Dataset& data, PriorSpec priors) : data_(data), priors_(std::move(priors)) {}

    double operator()(int node, const std::vector<int>& parents) {
        auto key = std::make_pair(node, parents);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const double s = family_score(data_, node, parents, priors_);
        cache_.emplace(std::move(key), s);
        return s;
    }

    std::size_t size() const { return cache_.size(); }

private:
    const Dataset& data_;
    PriorSpec priors_;
    std::map<std::pair<int, std::vector<int>>, double> cache_;
};

/// ln P(D | S) under Dirichlet priors with parameter independence.
inline double log_marginal_likelihood(const Dag& dag, const Dataset& data, const PriorSpec& priors = PriorSpec::k2()) {
    if (data.variables() != dag.variables()) throw Error("dataset variables do not match the graph");
    double total = 0;
    for (std::size_t v = 0; v < dag.size(); ++v) total += family_score(data, static_cast<int>(v), dag.parents(static_cast<int>(v)), priors);
    return total;
}

struct GttResult {
    Dag dag;
    Dag after_thick;             // graph at the end of the addition phase
    std::vector<double> scores;  // score after start and after each accepted move
};

/// Greedy thick-thin search. Thick phase: from the empty graph, repeatedly
/// add the acyclic arc with the largest positive score gain. Thin phase:
/// repeatedly delete the arc with the largest positive gain. One pass each;
/// ties go to the smallest (parent, child).
inline GttResult gtt_run(const Dataset& data, const PriorSpec& priors = PriorSpec::k2()) {
    FamilyScoreCache cache(data, priors);
    Dag dag(data.variables());
    const int n = static_cast<int>(dag.size());
    std::vector<double> family(static_cast<std::size_t>(n));
    double score = 0;
    for (int v = 0; v < n; ++v) score += (family[static_cast<std::size_t>(v)] = cache(v, {}));
    GttResult res;
    res.scores.push_back(score);

    auto with = [](std::vector<int> ps, int p) {
        ps.insert(std::lower_bound(ps.begin(), ps.end(), p), p);
        return ps;
    };
    auto without = [](std::vector<int> ps, int p) {
        ps.erase(std::find(ps.begin(), ps.end(), p));
        return ps;
    };

    for (;;) {
        double best = 0;
        Edge pick{-1, -1};
        double pick_family = 0;
        for (int p = 0; p < n; ++p) {
            for (int c = 0; c < n; ++c) {
                if (p == c || dag.has_edge(p, c) || dag.has_edge(c, p) || dag.would_create_cycle(p, c)) continue;
                const double f = cache(c, with(dag.parents(c), p));
                const double gain = f - family[static_cast<std::size_t>(c)];
                if (gain > best) {
                    best = gain;
                    pick = {p, c};
                    pick_family = f;
                }
            }
        }
        if (pick.first < 0) break;
        dag.add_edge(pick.first, pick.second);
        family[static_cast<std::size_t>(pick.second)] = pick_family;
        score += best;
        res.scores.push_back(score);
    }
    res.after_thick = dag;

    for (;;) {
        double best = 0;
        Edge pick{-1, -1};
        double pick_family = 0;
        for (auto [p, c] : dag.edges()) {
            const double f = cache(c, without(dag.parents(c), p));
            const double gain = f - family[static_cast<std::size_t>(c)];
            if (gain > best) {
                best = gain;
                pick = {p, c};
                pick_family = f;
            }
        }
        if (pick.first < 0) break;
        dag.remove_edge(pick.first, pick.second);
        family[static_cast<std::size_t>(pick.second)] = pick_family;
        score += best;
        res.scores.push_back(score);
    }
    res.dag = std::move(dag);
    return res;
}

inline Dag gtt_search(const Dataset& data, const PriorSpec& priors = PriorSpec::k2()) { return gtt_run(data, priors).dag; }

}  // namespace pcstar::gtt
