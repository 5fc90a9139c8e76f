#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "pcstar/bayes_net.hpp"

namespace pcstar::stats {

/// Real-valued counts over (x, y, z-configuration). The z configuration is
/// mixed radix over z_arities, first variable most significant.
class ContingencyTable {
public:
    ContingencyTable() = default;
    ContingencyTable(int x_arity, int y_arity, std::vector<int> z_arities)
        : rx_(x_arity), ry_(y_arity), z_arities_(std::move(z_arities)) {
        strata_ = 1;
        for (int a : z_arities_) strata_ *= static_cast<std::size_t>(a);
        cells_.assign(strata_ * static_cast<std::size_t>(rx_ * ry_), 0.0);
    }

    int x_arity() const { return rx_; }
    int y_arity() const { return ry_; }
    const std::vector<int>& z_arities() const { return z_arities_; }
    std::size_t strata() const { return strata_; }
    std::size_t cell_count() const { return cells_.size(); }

    double& at(int x, int y, std::size_t z) { return cells_[index(x, y, z)]; }
    double at(int x, int y, std::size_t z) const { return cells_[index(x, y, z)]; }
    const std::vector<double>& cells() const { return cells_; }

    double total() const { return std::accumulate(cells_.begin(), cells_.end(), 0.0); }

private:
    std::size_t index(int x, int y, std::size_t z) const {
        return (z * static_cast<std::size_t>(rx_) + static_cast<std::size_t>(x)) * static_cast<std::size_t>(ry_) + static_cast<std::size_t>(y);
    }

    int rx_ = 2;
    int ry_ = 2;
    std::vector<int> z_arities_;
    std::size_t strata_ = 1;
    std::vector<double> cells_;
};

inline void check_query(const std::vector<Variable>& vars, int x, int y, const std::vector<int>& z) {
    const auto n = static_cast<int>(vars.size());
    auto in_range = [n](int v) { return v >= 0 && v < n; };
    if (!in_range(x) || !in_range(y)) throw Error("test variable out of range");
    if (x == y) throw Error("x and y must differ");
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!in_range(z[i])) throw Error("conditioning variable out of range");
        if (z[i] == x || z[i] == y) throw Error("x and y must not be in the conditioning set");
        for (std::size_t j = 0; j < i; ++j) {
            if (z[j] == z[i]) throw Error("duplicate conditioning variable");
        }
    }
}

/// Observed counts N_xyz in one pass over the records.
inline ContingencyTable count_table(const Dataset& data, int x, int y, const std::vector<int>& z) {
    const auto& vars = data.variables();
    check_query(vars, x, y, z);
    std::vector<int> za;
    for (int v : z) za.push_back(vars[static_cast<std::size_t>(v)].arity);
    ContingencyTable t(vars[static_cast<std::size_t>(x)].arity, vars[static_cast<std::size_t>(y)].arity, za);
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const auto row = data.row(r);
        std::size_t zc = 0;
        for (std::size_t i = 0; i < z.size(); ++i) zc = zc * static_cast<std::size_t>(za[i]) + static_cast<std::size_t>(row[static_cast<std::size_t>(z[i])]);
        t.at(row[static_cast<std::size_t>(x)], row[static_cast<std::size_t>(y)], zc) += 1.0;
    }
    return t;
}

}  // namespace pcstar::stats
