#pragma once

#include <cstdint>
#include <vector>

#include "pcstar/bayes_net.hpp"
#include "pcstar/stats/chi_squared.hpp"
#include "pcstar/stats/contingency.hpp"

namespace pcstar::stats {

/// Fragment for testing x _||_ y | z: local ids x = 0, y = 1, z_i = 2 + i.
/// x and every z_i are roots; y's parents are {x} + z.
inline Dag build_fragment(const Variable& x, const Variable& y, const std::vector<Variable>& z) {
    std::vector<Variable> vars{x, y};
    vars.insert(vars.end(), z.begin(), z.end());
    for (std::size_t i = 0; i < vars.size(); ++i) vars[i].id = static_cast<int>(i);
    Dag dag(std::move(vars));
    dag.add_edge(0, 1);
    for (std::size_t i = 0; i < z.size(); ++i) dag.add_edge(static_cast<int>(2 + i), 1);
    return dag;
}

/// Expected counts n * P(x, y, z) under a fragment network laid out as by
/// build_fragment, evaluated by forward traversal of each joint state.
inline ContingencyTable calc_stats(const BayesNet& fragment, double n) {
    const auto& vars = fragment.variables();
    if (vars.size() < 2) throw Error("fragment needs at least x and y");
    std::vector<int> za;
    for (std::size_t i = 2; i < vars.size(); ++i) za.push_back(vars[i].arity);
    ContingencyTable t(vars[0].arity, vars[1].arity, za);
    std::vector<int> a(vars.size(), 0);
    do {
        std::size_t zc = 0;
        for (std::size_t i = 2; i < vars.size(); ++i) zc = zc * static_cast<std::size_t>(vars[i].arity) + static_cast<std::size_t>(a[i]);
        t.at(a[0], a[1], zc) = n * joint_probability(fragment, a);
    } while (next_assignment(a, vars));
    return t;
}

/// Classical test on the raw contingency table.
inline TestResult std_it(const Dataset& data, int x, int y, const std::vector<int>& z, double alpha) {
    return chi_squared_test(count_table(data, x, y, z), alpha);
}

/// Smoothed table for the hybrid test, computed from one pass of counts.
/// Identical to calc_stats(map_parameters(build_fragment(...))) but reads
/// the fragment's sufficient statistics off the observed table.
inline ContingencyTable smoothed_table(const ContingencyTable& counts, const PriorSpec& priors) {
    const int rx = counts.x_arity();
    const int ry = counts.y_arity();
    const auto& za = counts.z_arities();
    const std::size_t qz = counts.strata();
    const double n = counts.total();

    // Fragment-local ids and y's parent list, as in build_fragment.
    std::vector<int> y_parents{0};
    for (std::size_t i = 0; i < za.size(); ++i) y_parents.push_back(static_cast<int>(2 + i));
    const std::vector<int> no_parents;

    std::vector<double> nx(static_cast<std::size_t>(rx), 0.0);
    std::vector<std::vector<double>> nz(za.size());
    for (std::size_t i = 0; i < za.size(); ++i) nz[i].assign(static_cast<std::size_t>(za[i]), 0.0);
    std::vector<double> nxz(static_cast<std::size_t>(rx) * qz, 0.0);
    std::vector<int> zs(za.size());
    for (std::size_t zc = 0; zc < qz; ++zc) {
        std::size_t rem = zc;
        for (std::size_t i = za.size(); i-- > 0;) {
            zs[i] = static_cast<int>(rem % static_cast<std::size_t>(za[i]));
            rem /= static_cast<std::size_t>(za[i]);
        }
        for (int x = 0; x < rx; ++x) {
            double s = 0;
            for (int y = 0; y < ry; ++y) s += counts.at(x, y, zc);
            nx[static_cast<std::size_t>(x)] += s;
            nxz[static_cast<std::size_t>(x) * qz + zc] += s;
            for (std::size_t i = 0; i < za.size(); ++i) nz[i][static_cast<std::size_t>(zs[i])] += s;
        }
    }

    std::vector<double> theta_x(static_cast<std::size_t>(rx));
    {
        const double denom = priors.alpha_sum(0, no_parents, 0, rx) + n;
        for (int x = 0; x < rx; ++x) theta_x[static_cast<std::size_t>(x)] = (priors.alpha(0, no_parents, 0, x) + nx[static_cast<std::size_t>(x)]) / denom;
    }
    std::vector<std::vector<double>> theta_z(za.size());
    for (std::size_t i = 0; i < za.size(); ++i) {
        const int node = static_cast<int>(2 + i);
        const double denom = priors.alpha_sum(node, no_parents, 0, za[i]) + n;
        theta_z[i].resize(static_cast<std::size_t>(za[i]));
        for (int k = 0; k < za[i]; ++k) theta_z[i][static_cast<std::size_t>(k)] = (priors.alpha(node, no_parents, 0, k) + nz[i][static_cast<std::size_t>(k)]) / denom;
    }

    ContingencyTable out(rx, ry, za);
    for (std::size_t zc = 0; zc < qz; ++zc) {
        std::size_t rem = zc;
        double pz = 1.0;
        for (std::size_t i = za.size(); i-- > 0;) {
            const auto k = rem % static_cast<std::size_t>(za[i]);
            rem /= static_cast<std::size_t>(za[i]);
            pz *= theta_z[i][k];
        }
        for (int x = 0; x < rx; ++x) {
            // y's column: x is the most significant parent digit.
            const std::size_t column = static_cast<std::size_t>(x) * qz + zc;
            const double denom = priors.alpha_sum(1, y_parents, column, ry) + nxz[static_cast<std::size_t>(x) * qz + zc];
            const double pxz = n * theta_x[static_cast<std::size_t>(x)] * pz;
            for (int y = 0; y < ry; ++y) {
                const double theta_y = (priors.alpha(1, y_parents, column, y) + counts.at(x, y, zc)) / denom;
                out.at(x, y, zc) = pxz * theta_y;
            }
        }
    }
    return out;
}

/// Classical test applied to the Dirichlet-smoothed expected table.
inline TestResult hybrid_it(const Dataset& data, int x, int y, const std::vector<int>& z, double alpha,
                            const PriorSpec& priors = PriorSpec::k2()) {
    return chi_squared_test(smoothed_table(count_table(data, x, y, z), priors), alpha);
}

/// Deterministic cost of one test, in record-and-cell touches. Used as the
/// reproducible clock for budgets and stall detection.
inline std::uint64_t test_work(std::size_t records, std::size_t cond_size, std::size_t cells, bool hybrid) {
    const std::uint64_t counting = static_cast<std::uint64_t>(records) * (cond_size + 2);
    const std::uint64_t table = static_cast<std::uint64_t>(cells) * (hybrid ? cond_size + 4 : 1);
    return counting + table;
}

}  // namespace pcstar::stats
