#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "pcstar/bayes_net.hpp"
#include "pcstar/graph.hpp"

namespace testutil {

inline pcstar::Dag make_dag(std::size_t n, std::initializer_list<std::pair<int, int>> edges, int arity = 2) {
    pcstar::Dag d(pcstar::make_variables(n, arity));
    for (auto [a, b] : edges) d.add_edge(a, b);
    return d;
}

inline pcstar::Dataset make_data(std::size_t width, std::initializer_list<std::vector<int>> rows, int arity = 2) {
    pcstar::Dataset data(pcstar::make_variables(width, arity));
    for (const auto& r : rows) data.add_row(r);
    return data;
}

inline void repeat_row(pcstar::Dataset& data, const std::vector<int>& row, int times) {
    for (int i = 0; i < times; ++i) data.add_row(row);
}

// Random DAG with edges only from lower to higher ids, shuffled ids not needed here.
inline pcstar::Dag random_dag(std::size_t n, double edge_prob, pcstar::Rng& rng) {
    pcstar::Dag d(pcstar::make_variables(n));
    for (std::size_t j = 1; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (rng.uniform() < edge_prob) d.add_edge(static_cast<int>(i), static_cast<int>(j));
        }
    }
    return d;
}

}  // namespace testutil
