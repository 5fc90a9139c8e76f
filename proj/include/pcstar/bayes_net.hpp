#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcstar/graph.hpp"
#include "pcstar/rng.hpp"

namespace pcstar {

/// Conditional probability table for one node. Column j is the mixed-radix
/// encoding of the parent configuration, first parent most significant;
/// the table is stored column by column.
class Cpt {
public:
    Cpt() = default;
    Cpt(int node, int arity, std::vector<int> parents, const std::vector<int>& parent_arities)
        : node_(node), arity_(arity), parents_(std::move(parents)), parent_arities_(parent_arities) {
        columns_ = 1;
        for (int a : parent_arities_) columns_ *= static_cast<std::size_t>(a);
        table_.assign(columns_ * static_cast<std::size_t>(arity_), 1.0 / arity_);
    }

    int node() const { return node_; }
    int arity() const { return arity_; }
    const std::vector<int>& parents() const { return parents_; }
    const std::vector<int>& parent_arities() const { return parent_arities_; }
    std::size_t columns() const { return columns_; }

    std::span<double> column(std::size_t j) {
        return {table_.data() + j * static_cast<std::size_t>(arity_), static_cast<std::size_t>(arity_)};
    }
    std::span<const double> column(std::size_t j) const {
        return {table_.data() + j * static_cast<std::size_t>(arity_), static_cast<std::size_t>(arity_)};
    }
    double prob(std::size_t j, int k) const { return table_[j * static_cast<std::size_t>(arity_) + static_cast<std::size_t>(k)]; }
    std::span<const double> table() const { return table_; }

    /// Column index of the parent configuration read from a full assignment.
    std::size_t column_of(std::span<const int> assignment) const {
        std::size_t j = 0;
        for (std::size_t i = 0; i < parents_.size(); ++i) {
            j = j * static_cast<std::size_t>(parent_arities_[i]) +
                static_cast<std::size_t>(assignment[static_cast<std::size_t>(parents_[i])]);
        }
        return j;
    }

    /// Decodes column j into parent states (same order as parents()).
    std::vector<int> parent_states(std::size_t j) const {
        std::vector<int> states(parents_.size());
        for (std::size_t i = parents_.size(); i-- > 0;) {
            const auto a = static_cast<std::size_t>(parent_arities_[i]);
            states[i] = static_cast<int>(j % a);
            j /= a;
        }
        return states;
    }

    friend bool operator==(const Cpt&, const Cpt&) = default;

private:
    int node_ = 0;
    int arity_ = 2;
    std::vector<int> parents_;
    std::vector<int> parent_arities_;
    std::size_t columns_ = 1;
    std::vector<double> table_;
};

/// A DAG plus one CPT per node. Constructed with uniform CPTs.
class BayesNet {
public:
    BayesNet() = default;
    explicit BayesNet(Dag dag) : dag_(std::move(dag)) {
        cpts_.reserve(dag_.size());
        for (std::size_t v = 0; v < dag_.size(); ++v) {
            const int node = static_cast<int>(v);
            std::vector<int> pa_ar;
            for (int p : dag_.parents(node)) pa_ar.push_back(dag_.arity(p));
            cpts_.emplace_back(node, dag_.arity(node), dag_.parents(node), pa_ar);
        }
        order_ = dag_.topological_order();
    }

    const Dag& dag() const { return dag_; }
    std::size_t size() const { return dag_.size(); }
    const std::vector<Variable>& variables() const { return dag_.variables(); }
    const Cpt& cpt(int v) const { return cpts_.at(static_cast<std::size_t>(v)); }
    Cpt& cpt(int v) { return cpts_.at(static_cast<std::size_t>(v)); }
    const std::vector<int>& order() const { return order_; }

    /// Throws unless every column is a distribution within tol.
    void validate(double tol = 1e-9) const {
        for (const auto& c : cpts_) {
            for (std::size_t j = 0; j < c.columns(); ++j) {
                double sum = 0;
                for (double p : c.column(j)) {
                    if (!(p >= 0.0 && p <= 1.0)) throw Error("CPT entry outside [0,1]");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > tol) throw Error("CPT column does not sum to 1");
            }
        }
    }

    friend bool operator==(const BayesNet& a, const BayesNet& b) { return a.dag_ == b.dag_ && a.cpts_ == b.cpts_; }

private:
    Dag dag_;
    std::vector<Cpt> cpts_;
    std::vector<int> order_;
};

/// Complete records of state indices, stored row-major.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Variable> vars) : vars_(std::move(vars)) { validate_variables(vars_); }

    const std::vector<Variable>& variables() const { return vars_; }
    std::size_t width() const { return vars_.size(); }
    std::size_t rows() const { return width() == 0 ? 0 : cells_.size() / width(); }
    bool empty() const { return cells_.empty(); }

    std::span<const int> row(std::size_t r) const { return {cells_.data() + r * width(), width()}; }
    int at(std::size_t r, int v) const { return cells_[r * width() + static_cast<std::size_t>(v)]; }

    void add_row(std::span<const int> states) {
        if (states.size() != width()) throw Error("record width does not match the variable count");
        for (std::size_t v = 0; v < width(); ++v) {
            if (states[v] < 0 || states[v] >= vars_[v].arity) {
                throw Error("state " + std::to_string(states[v]) + " out of range for '" + vars_[v].name + "'");
            }
        }
        cells_.insert(cells_.end(), states.begin(), states.end());
    }
    void reserve(std::size_t n) { cells_.reserve(n * width()); }

    /// Keeps only the listed columns, in the listed order, renumbering ids.
    Dataset select(const std::vector<int>& columns) const {
        std::vector<Variable> vars;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            Variable v = vars_.at(static_cast<std::size_t>(columns[i]));
            v.id = static_cast<int>(i);
            vars.push_back(std::move(v));
        }
        Dataset out(std::move(vars));
        out.cells_.reserve(rows() * columns.size());
        for (std::size_t r = 0; r < rows(); ++r) {
            for (int c : columns) out.cells_.push_back(at(r, c));
        }
        return out;
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<Variable> vars_;
    std::vector<int> cells_;
};

/// Dirichlet hyperparameters alpha_ijk. The default is the K2 choice
/// (every alpha = 1).
class PriorSpec {
public:
    using Rule = std::function<double(int node, std::span<const int> parents, std::size_t column, int state)>;

    PriorSpec() = default;
    static PriorSpec k2() { return constant(1.0); }
    static PriorSpec constant(double a) {
        if (!(a > 0)) throw Error("Dirichlet hyperparameters must be positive");
        PriorSpec p;
        p.constant_ = a;
        return p;
    }
    static PriorSpec custom(Rule rule) {
        PriorSpec p;
        p.rule_ = std::move(rule);
        return p;
    }

    double alpha(int node, std::span<const int> parents, std::size_t column, int state) const {
        if (!rule_) return constant_;
        const double a = rule_(node, parents, column, state);
        if (!(a > 0)) throw Error("Dirichlet hyperparameters must be positive");
        return a;
    }
    double alpha_sum(int node, std::span<const int> parents, std::size_t column, int arity) const {
        if (!rule_) return constant_ * arity;
        double s = 0;
        for (int k = 0; k < arity; ++k) s += alpha(node, parents, column, k);
        return s;
    }
    bool is_constant() const { return !rule_; }

private:
    double constant_ = 1.0;
    Rule rule_;
};

inline constexpr std::size_t kMaxJointStates = std::size_t{1} << 22;

/// Dense joint distribution. Index is mixed radix with variable 0 most
/// significant.
class JointTable {
public:
    JointTable() = default;
    JointTable(std::vector<Variable> vars, std::vector<double> probs) : vars_(std::move(vars)), probs_(std::move(probs)) {
        validate_variables(vars_);
        if (probs_.size() != state_count(vars_)) throw Error("joint table size does not match variable arities");
    }

    static std::size_t state_count(const std::vector<Variable>& vars) {
        std::size_t n = 1;
        for (const auto& v : vars) {
            n *= static_cast<std::size_t>(v.arity);
            if (n > kMaxJointStates) throw Error("joint table too large to enumerate");
        }
        return n;
    }

    const std::vector<Variable>& variables() const { return vars_; }
    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probabilities() const { return probs_; }

    std::size_t index_of(std::span<const int> assignment) const {
        std::size_t idx = 0;
        for (std::size_t v = 0; v < vars_.size(); ++v) idx = idx * static_cast<std::size_t>(vars_[v].arity) + static_cast<std::size_t>(assignment[v]);
        return idx;
    }
    std::vector<int> assignment_of(std::size_t idx) const {
        std::vector<int> a(vars_.size());
        for (std::size_t v = vars_.size(); v-- > 0;) {
            const auto r = static_cast<std::size_t>(vars_[v].arity);
            a[v] = static_cast<int>(idx % r);
            idx /= r;
        }
        return a;
    }

private:
    std::vector<Variable> vars_;
    std::vector<double> probs_;
};

/// Advances a mixed-radix odometer (last variable fastest). Returns false
/// after the final assignment.
inline bool next_assignment(std::vector<int>& a, const std::vector<Variable>& vars) {
    for (std::size_t v = a.size(); v-- > 0;) {
        if (++a[v] < vars[v].arity) return true;
        a[v] = 0;
    }
    return false;
}

/// MAP/posterior-mean parameters under Dirichlet priors:
/// theta_ijk = (alpha_ijk + N_ijk) / (alpha_ij + N_ij).
inline BayesNet map_parameters(const Dag& dag, const Dataset& data, const PriorSpec& priors = PriorSpec::k2()) {
    if (data.variables() != dag.variables()) throw Error("dataset variables do not match the graph");
    BayesNet bn(dag);
    std::vector<std::vector<double>> counts(dag.size());
    for (std::size_t v = 0; v < dag.size(); ++v) {
        const auto& c = bn.cpt(static_cast<int>(v));
        counts[v].assign(c.columns() * static_cast<std::size_t>(c.arity()), 0.0);
    }
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const auto row = data.row(r);
        for (std::size_t v = 0; v < dag.size(); ++v) {
            const auto& c = bn.cpt(static_cast<int>(v));
            counts[v][c.column_of(row) * static_cast<std::size_t>(c.arity()) + static_cast<std::size_t>(row[v])] += 1.0;
        }
    }
    for (std::size_t v = 0; v < dag.size(); ++v) {
        auto& c = bn.cpt(static_cast<int>(v));
        const int node = static_cast<int>(v);
        for (std::size_t j = 0; j < c.columns(); ++j) {
            auto col = c.column(j);
            const double* n = counts[v].data() + j * col.size();
            double n_ij = 0;
            for (std::size_t k = 0; k < col.size(); ++k) n_ij += n[k];
            const double denom = priors.alpha_sum(node, c.parents(), j, c.arity()) + n_ij;
            for (std::size_t k = 0; k < col.size(); ++k) {
                col[k] = (priors.alpha(node, c.parents(), j, static_cast<int>(k)) + n[k]) / denom;
            }
        }
    }
    return bn;
}

/// Chain-rule product of the CPT entries selected by a full assignment.
inline double joint_probability(const BayesNet& bn, std::span<const int> assignment) {
    if (assignment.size() != bn.size()) throw Error("assignment must cover every variable");
    double p = 1.0;
    for (std::size_t v = 0; v < bn.size(); ++v) {
        const auto& c = bn.cpt(static_cast<int>(v));
        p *= c.prob(c.column_of(assignment), assignment[v]);
    }
    return p;
}

/// Every column drawn uniformly from its probability simplex (normalized
/// unit exponentials).
inline BayesNet sample_uniform_parameters(const Dag& dag, Rng& rng) {
    BayesNet bn(dag);
    for (std::size_t v = 0; v < dag.size(); ++v) {
        auto& c = bn.cpt(static_cast<int>(v));
        for (std::size_t j = 0; j < c.columns(); ++j) {
            auto col = c.column(j);
            double sum = 0;
            for (auto& p : col) sum += (p = rng.exponential());
            for (auto& p : col) p /= sum;
        }
    }
    return bn;
}

namespace detail {
inline int draw_state(std::span<const double> column, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0;
    for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        acc += column[k];
        if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(column.size() - 1);
}
}  // namespace detail

/// Forward (ancestral) sampling in topological order.
inline Dataset sample_records(const BayesNet& bn, std::size_t n, Rng& rng) {
    Dataset data(bn.variables());
    data.reserve(n);
    std::vector<int> row(bn.size(), 0);
    for (std::size_t r = 0; r < n; ++r) {
        for (int v : bn.order()) {
            const auto& c = bn.cpt(v);
            row[static_cast<std::size_t>(v)] = detail::draw_state(c.column(c.column_of(row)), rng);
        }
        data.add_row(row);
    }
    return data;
}

/// Full joint of a network by enumeration.
inline JointTable joint_table(const BayesNet& bn) {
    std::vector<double> probs(JointTable::state_count(bn.variables()));
    std::vector<int> a(bn.size(), 0);
    std::size_t i = 0;
    do {
        probs[i++] = joint_probability(bn, a);
    } while (next_assignment(a, bn.variables()));
    return JointTable(bn.variables(), std::move(probs));
}

/// Installs the joint's exact conditionals as CPTs of the given DAG.
/// Parent configurations with zero probability get a uniform column.
inline BayesNet project(const JointTable& joint, const Dag& dag) {
    if (joint.variables() != dag.variables()) throw Error("joint and graph variables differ");
    BayesNet bn(dag);
    std::vector<std::vector<double>> mass(dag.size());
    for (std::size_t v = 0; v < dag.size(); ++v) {
        const auto& c = bn.cpt(static_cast<int>(v));
        mass[v].assign(c.columns() * static_cast<std::size_t>(c.arity()), 0.0);
    }
    std::vector<int> a(dag.size(), 0);
    std::size_t idx = 0;
    do {
        const double p = joint[idx++];
        for (std::size_t v = 0; v < dag.size(); ++v) {
            const auto& c = bn.cpt(static_cast<int>(v));
            mass[v][c.column_of(a) * static_cast<std::size_t>(c.arity()) + static_cast<std::size_t>(a[v])] += p;
        }
    } while (next_assignment(a, dag.variables()));

    for (std::size_t v = 0; v < dag.size(); ++v) {
        auto& c = bn.cpt(static_cast<int>(v));
        for (std::size_t j = 0; j < c.columns(); ++j) {
            auto col = c.column(j);
            const double* m = mass[v].data() + j * col.size();
            double total = 0;
            for (std::size_t k = 0; k < col.size(); ++k) total += m[k];
            for (std::size_t k = 0; k < col.size(); ++k) col[k] = total > 0 ? m[k] / total : 1.0 / static_cast<double>(col.size());
        }
    }
    return bn;
}

/// KL divergence estimate, in nats.
struct KlEstimate {
    double value = 0;
    double std_error = 0;
    bool exact = true;

    bool infinite() const { return std::isinf(value); }
};

namespace detail {
inline std::vector<std::vector<double>> log_tables(const BayesNet& bn) {
    std::vector<std::vector<double>> out(bn.size());
    for (std::size_t v = 0; v < bn.size(); ++v) {
        const auto t = bn.cpt(static_cast<int>(v)).table();
        out[v].reserve(t.size());
        for (double p : t) out[v].push_back(p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity());
    }
    return out;
}
inline double log_prob(const BayesNet& bn, const std::vector<std::vector<double>>& logs, std::span<const int> a) {
    double lp = 0;
    for (std::size_t v = 0; v < bn.size(); ++v) {
        const auto& c = bn.cpt(static_cast<int>(v));
        lp += logs[v][c.column_of(a) * static_cast<std::size_t>(c.arity()) + static_cast<std::size_t>(a[v])];
    }
    return lp;
}
inline void check_same_variables(const BayesNet& a, const BayesNet& b) {
    if (a.variables() != b.variables()) throw Error("networks are over different variables");
}
}  // namespace detail

/// KL(truth || learned) by enumerating every joint state.
inline KlEstimate kl_exact(const BayesNet& truth, const BayesNet& learned) {
    detail::check_same_variables(truth, learned);
    JointTable::state_count(truth.variables());
    const auto lp = detail::log_tables(truth);
    const auto lq = detail::log_tables(learned);
    std::vector<int> a(truth.size(), 0);
    double kl = 0;
    do {
        const double log_p = detail::log_prob(truth, lp, a);
        if (std::isinf(log_p)) continue;
        const double log_q = detail::log_prob(learned, lq, a);
        if (std::isinf(log_q)) return {std::numeric_limits<double>::infinity(), 0, true};
        kl += std::exp(log_p) * (log_p - log_q);
    } while (next_assignment(a, truth.variables()));
    return {std::max(kl, 0.0), 0.0, true};
}

/// KL(truth || learned) as the sample mean of log p - log q over draws
/// from truth, with its standard error.
inline KlEstimate kl_monte_carlo(const BayesNet& truth, const BayesNet& learned, std::size_t samples, Rng& rng) {
    detail::check_same_variables(truth, learned);
    if (samples < 2) throw Error("Monte Carlo KL needs at least two samples");
    const auto lp = detail::log_tables(truth);
    const auto lq = detail::log_tables(learned);
    std::vector<int> a(truth.size(), 0);
    double mean = 0, m2 = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (int v : truth.order()) {
            const auto& c = truth.cpt(v);
            a[static_cast<std::size_t>(v)] = detail::draw_state(c.column(c.column_of(a)), rng);
        }
        const double log_q = detail::log_prob(learned, lq, a);
        if (std::isinf(log_q)) return {std::numeric_limits<double>::infinity(), 0, false};
        const double d = detail::log_prob(truth, lp, a) - log_q;
        const double delta = d - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (d - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(samples)), false};
}

inline constexpr std::size_t kExactKlMaxStates = std::size_t{1} << 20;
inline constexpr std::size_t kDefaultKlSamples = 100000;

/// Exact when the joint has at most 2^20 states, Monte Carlo otherwise.
inline KlEstimate kl_divergence(const BayesNet& truth, const BayesNet& learned, Rng& rng,
                                std::size_t samples = kDefaultKlSamples) {
    std::size_t states = 1;
    for (const auto& v : truth.variables()) {
        states *= static_cast<std::size_t>(v.arity);
        if (states > kExactKlMaxStates) return kl_monte_carlo(truth, learned, samples, rng);
    }
    return kl_exact(truth, learned);
}

/// Conditional independence of x and y given z in a joint table, checked
/// through the factorization P(x,y,z) P(z) = P(x,z) P(y,z).
inline bool ci_by_factorization(const JointTable& joint, int x, int y, const std::vector<int>& z, double tol = 1e-9) {
    const auto& vars = joint.variables();
    const auto rx = static_cast<std::size_t>(vars.at(static_cast<std::size_t>(x)).arity);
    const auto ry = static_cast<std::size_t>(vars.at(static_cast<std::size_t>(y)).arity);
    std::size_t qz = 1;
    for (int v : z) qz *= static_cast<std::size_t>(vars.at(static_cast<std::size_t>(v)).arity);
    std::vector<double> pxyz(rx * ry * qz, 0.0);
    for (std::size_t i = 0; i < joint.size(); ++i) {
        const auto a = joint.assignment_of(i);
        std::size_t zc = 0;
        for (int v : z) zc = zc * static_cast<std::size_t>(vars[static_cast<std::size_t>(v)].arity) + static_cast<std::size_t>(a[static_cast<std::size_t>(v)]);
        pxyz[(zc * rx + static_cast<std::size_t>(a[static_cast<std::size_t>(x)])) * ry + static_cast<std::size_t>(a[static_cast<std::size_t>(y)])] += joint[i];
    }
    for (std::size_t zc = 0; zc < qz; ++zc) {
        double pz = 0;
        std::vector<double> px(rx, 0.0), py(ry, 0.0);
        for (std::size_t xi = 0; xi < rx; ++xi) {
            for (std::size_t yi = 0; yi < ry; ++yi) {
                const double p = pxyz[(zc * rx + xi) * ry + yi];
                pz += p;
                px[xi] += p;
                py[yi] += p;
            }
        }
        if (pz <= 0) continue;
        for (std::size_t xi = 0; xi < rx; ++xi) {
            for (std::size_t yi = 0; yi < ry; ++yi) {
                // Compare conditionals: P(x,y|z) vs P(x|z) P(y|z).
                const double lhs = pxyz[(zc * rx + xi) * ry + yi] / pz;
                const double rhs = (px[xi] / pz) * (py[yi] / pz);
                if (std::abs(lhs - rhs) > tol) return false;
            }
        }
    }
    return true;
}

/// Same question answered by comparing the columns P(y | z, x_i) across
/// every observed x_i.
inline bool ci_by_conditionals(const JointTable& joint, int x, int y, const std::vector<int>& z, double tol = 1e-9) {
    const auto& vars = joint.variables();
    const auto rx = static_cast<std::size_t>(vars.at(static_cast<std::size_t>(x)).arity);
    const auto ry = static_cast<std::size_t>(vars.at(static_cast<std::size_t>(y)).arity);
    std::size_t qz = 1;
    for (int v : z) qz *= static_cast<std::size_t>(vars.at(static_cast<std::size_t>(v)).arity);
    std::vector<double> pxyz(rx * ry * qz, 0.0);
    for (std::size_t i = 0; i < joint.size(); ++i) {
        const auto a = joint.assignment_of(i);
        std::size_t zc = 0;
        for (int v : z) zc = zc * static_cast<std::size_t>(vars[static_cast<std::size_t>(v)].arity) + static_cast<std::size_t>(a[static_cast<std::size_t>(v)]);
        pxyz[(zc * rx + static_cast<std::size_t>(a[static_cast<std::size_t>(x)])) * ry + static_cast<std::size_t>(a[static_cast<std::size_t>(y)])] += joint[i];
    }
    for (std::size_t zc = 0; zc < qz; ++zc) {
        std::vector<double> ref;
        for (std::size_t xi = 0; xi < rx; ++xi) {
            double pxz = 0;
            for (std::size_t yi = 0; yi < ry; ++yi) pxz += pxyz[(zc * rx + xi) * ry + yi];
            if (pxz <= 0) continue;
            std::vector<double> col(ry);
            for (std::size_t yi = 0; yi < ry; ++yi) col[yi] = pxyz[(zc * rx + xi) * ry + yi] / pxz;
            if (ref.empty()) {
                ref = std::move(col);
                continue;
            }
            for (std::size_t yi = 0; yi < ry; ++yi) {
                if (std::abs(col[yi] - ref[yi]) > tol) return false;
            }
        }
    }
    return true;
}

}  // namespace pcstar
