#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pcstar {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CycleError : Error {
    using Error::Error;
};

/// A discrete variable with states 0..arity-1.
struct Variable {
    int id = 0;
    std::string name;
    int arity = 2;

    friend bool operator==(const Variable&, const Variable&) = default;
};

using Edge = std::pair<int, int>;

/// Variables X0..X{n-1}, all of the given arity.
inline std::vector<Variable> make_variables(std::size_t n, int arity = 2) {
    std::vector<Variable> vars;
    vars.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        vars.push_back({static_cast<int>(i), "X" + std::to_string(i), arity});
    }
    return vars;
}

inline void validate_variables(const std::vector<Variable>& vars) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].id != static_cast<int>(i)) throw Error("variable ids must be dense 0..N-1");
        if (vars[i].arity < 2) throw Error("variable '" + vars[i].name + "' has arity < 2");
        for (std::size_t j = 0; j < i; ++j) {
            if (vars[j].name == vars[i].name) throw Error("duplicate variable name '" + vars[i].name + "'");
        }
    }
}

/// Kahn's algorithm over explicit parent lists, smallest ready id first.
inline std::vector<int> topological_order(const std::vector<std::vector<int>>& parents) {
    const std::size_t n = parents.size();
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> children(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (int p : parents[c]) {
            children[static_cast<std::size_t>(p)].push_back(static_cast<int>(c));
            ++indegree[c];
        }
    }
    // Linear scan for the smallest ready node; graphs here are small.
    std::vector<int> order;
    order.reserve(n);
    std::vector<bool> done(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t pick = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!done[v] && indegree[v] == 0) {
                pick = v;
                break;
            }
        }
        if (pick == n) throw CycleError("graph contains a directed cycle");
        done[pick] = true;
        order.push_back(static_cast<int>(pick));
        for (int c : children[pick]) --indegree[static_cast<std::size_t>(c)];
    }
    return order;
}

/// Directed acyclic graph over a fixed variable set. Parent lists are kept
/// sorted ascending, which is also the canonical CPT parent order.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::vector<Variable> vars)
        : vars_(std::move(vars)), parents_(vars_.size()), children_(vars_.size()) {
        validate_variables(vars_);
    }

    std::size_t size() const { return vars_.size(); }
    const std::vector<Variable>& variables() const { return vars_; }
    const Variable& variable(int v) const { return vars_.at(static_cast<std::size_t>(v)); }
    int arity(int v) const { return variable(v).arity; }

    const std::vector<int>& parents(int v) const { return parents_.at(static_cast<std::size_t>(v)); }
    const std::vector<int>& children(int v) const { return children_.at(static_cast<std::size_t>(v)); }

    bool has_edge(int from, int to) const {
        const auto& ps = parents(to);
        return std::binary_search(ps.begin(), ps.end(), from);
    }
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

    /// True if a directed path from -> ... -> to exists (length >= 0).
    bool has_path(int from, int to) const {
        if (from == to) return true;
        std::vector<bool> seen(size(), false);
        std::vector<int> stack{from};
        seen[static_cast<std::size_t>(from)] = true;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int c : children(v)) {
                if (c == to) return true;
                if (!seen[static_cast<std::size_t>(c)]) {
                    seen[static_cast<std::size_t>(c)] = true;
                    stack.push_back(c);
                }
            }
        }
        return false;
    }

    bool would_create_cycle(int from, int to) const { return has_path(to, from); }

    void add_edge(int from, int to) {
        check_node(from);
        check_node(to);
        if (from == to) throw Error("self-loop on node " + std::to_string(from));
        if (has_edge(from, to)) throw Error("duplicate edge");
        if (would_create_cycle(from, to)) throw CycleError("edge would create a directed cycle");
        insert_sorted(parents_[static_cast<std::size_t>(to)], from);
        insert_sorted(children_[static_cast<std::size_t>(from)], to);
    }

    void remove_edge(int from, int to) {
        if (!has_edge(from, to)) throw Error("no such edge");
        erase_value(parents_[static_cast<std::size_t>(to)], from);
        erase_value(children_[static_cast<std::size_t>(from)], to);
    }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (std::size_t c = 0; c < size(); ++c) {
            for (int p : parents_[c]) out.emplace_back(p, static_cast<int>(c));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& ps : parents_) n += ps.size();
        return n;
    }

    std::vector<int> topological_order() const { return pcstar::topological_order(parents_); }

    friend bool operator==(const Dag& a, const Dag& b) {
        return a.vars_ == b.vars_ && a.parents_ == b.parents_;
    }

private:
    void check_node(int v) const {
        if (v < 0 || static_cast<std::size_t>(v) >= size()) throw Error("node id out of range");
    }
    static void insert_sorted(std::vector<int>& v, int x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); }
    static void erase_value(std::vector<int>& v, int x) { v.erase(std::lower_bound(v.begin(), v.end(), x)); }

    std::vector<Variable> vars_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
};

/// Partially directed graph: each adjacent pair carries either one directed
/// arc or one undirected edge, never both and never a bi-directed arc.
class Pattern {
public:
    Pattern() = default;
    explicit Pattern(std::vector<Variable> vars)
        : vars_(std::move(vars)), n_(vars_.size()), arc_(n_ * n_, 0), line_(n_ * n_, 0) {
        validate_variables(vars_);
    }

    /// Complete undirected graph over vars.
    static Pattern complete(std::vector<Variable> vars) {
        Pattern p(std::move(vars));
        for (std::size_t a = 0; a < p.n_; ++a) {
            for (std::size_t b = a + 1; b < p.n_; ++b) p.add_undirected(static_cast<int>(a), static_cast<int>(b));
        }
        return p;
    }

    std::size_t size() const { return n_; }
    const std::vector<Variable>& variables() const { return vars_; }

    bool directed(int a, int b) const { return arc_[at(a, b)] != 0; }
    bool undirected(int a, int b) const { return line_[at(a, b)] != 0; }
    bool adjacent(int a, int b) const { return directed(a, b) || directed(b, a) || undirected(a, b); }

    void add_undirected(int a, int b) {
        if (a == b) throw Error("self-loop");
        if (adjacent(a, b)) throw Error("pair already adjacent");
        line_[at(a, b)] = line_[at(b, a)] = 1;
    }
    void add_directed(int a, int b) {
        if (a == b) throw Error("self-loop");
        if (adjacent(a, b)) throw Error("pair already adjacent");
        arc_[at(a, b)] = 1;
    }
    /// Turns the undirected edge a - b into a -> b.
    void orient(int a, int b) {
        if (!undirected(a, b)) throw Error("orient requires an undirected edge");
        line_[at(a, b)] = line_[at(b, a)] = 0;
        arc_[at(a, b)] = 1;
    }
    void remove(int a, int b) {
        arc_[at(a, b)] = arc_[at(b, a)] = 0;
        line_[at(a, b)] = line_[at(b, a)] = 0;
    }

    /// Nodes with an arc into v.
    std::vector<int> parents(int v) const {
        std::vector<int> out;
        for (std::size_t u = 0; u < n_; ++u) {
            if (directed(static_cast<int>(u), v)) out.push_back(static_cast<int>(u));
        }
        return out;
    }
    /// Nodes joined to v by an undirected edge.
    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        for (std::size_t u = 0; u < n_; ++u) {
            if (undirected(static_cast<int>(u), v)) out.push_back(static_cast<int>(u));
        }
        return out;
    }
    std::vector<int> adjacents(int v) const {
        std::vector<int> out;
        for (std::size_t u = 0; u < n_; ++u) {
            if (adjacent(static_cast<int>(u), v)) out.push_back(static_cast<int>(u));
        }
        return out;
    }

    /// Directed path from -> ... -> to using arcs only.
    bool has_directed_path(int from, int to) const {
        if (from == to) return true;
        std::vector<bool> seen(n_, false);
        std::vector<int> stack{from};
        seen[static_cast<std::size_t>(from)] = true;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (std::size_t c = 0; c < n_; ++c) {
                if (!directed(v, static_cast<int>(c))) continue;
                if (static_cast<int>(c) == to) return true;
                if (!seen[c]) {
                    seen[c] = true;
                    stack.push_back(static_cast<int>(c));
                }
            }
        }
        return false;
    }

    std::vector<Edge> directed_edges() const {
        std::vector<Edge> out;
        for (std::size_t a = 0; a < n_; ++a) {
            for (std::size_t b = 0; b < n_; ++b) {
                if (arc_[a * n_ + b]) out.emplace_back(static_cast<int>(a), static_cast<int>(b));
            }
        }
        return out;
    }
    /// Undirected edges as (min, max), ascending.
    std::vector<Edge> undirected_edges() const {
        std::vector<Edge> out;
        for (std::size_t a = 0; a < n_; ++a) {
            for (std::size_t b = a + 1; b < n_; ++b) {
                if (line_[a * n_ + b]) out.emplace_back(static_cast<int>(a), static_cast<int>(b));
            }
        }
        return out;
    }
    /// Adjacent pairs as (min, max), ascending.
    std::vector<Edge> skeleton() const {
        std::vector<Edge> out;
        for (std::size_t a = 0; a < n_; ++a) {
            for (std::size_t b = a + 1; b < n_; ++b) {
                if (adjacent(static_cast<int>(a), static_cast<int>(b))) out.emplace_back(static_cast<int>(a), static_cast<int>(b));
            }
        }
        return out;
    }

    friend bool operator==(const Pattern& a, const Pattern& b) {
        return a.vars_ == b.vars_ && a.arc_ == b.arc_ && a.line_ == b.line_;
    }

private:
    std::size_t at(int a, int b) const {
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n_ || static_cast<std::size_t>(b) >= n_) {
            throw Error("node id out of range");
        }
        return static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b);
    }

    std::vector<Variable> vars_;
    std::size_t n_ = 0;
    std::vector<std::uint8_t> arc_;
    std::vector<std::uint8_t> line_;
};

/// The pattern with every arc of the DAG kept directed.
inline Pattern as_pattern(const Dag& dag) {
    Pattern p(dag.variables());
    for (auto [a, b] : dag.edges()) p.add_directed(a, b);
    return p;
}

/// d-separation of x and y given z, by reachability over active trails
/// (the "Bayes ball" sweep).
inline bool d_separated(const Dag& dag, int x, int y, const std::vector<int>& z) {
    const std::size_t n = dag.size();
    std::vector<bool> observed(n, false);
    for (int v : z) observed[static_cast<std::size_t>(v)] = true;

    // Ancestors of the conditioning set, including the set itself.
    std::vector<bool> anc(n, false);
    std::vector<int> stack(z.begin(), z.end());
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (anc[static_cast<std::size_t>(v)]) continue;
        anc[static_cast<std::size_t>(v)] = true;
        for (int p : dag.parents(v)) stack.push_back(p);
    }

    // Direction flag: 0 = arrived from a child (moving up), 1 = from a parent.
    std::vector<std::uint8_t> visited(n * 2, 0);
    std::deque<std::pair<int, int>> queue{{x, 0}};
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        const auto idx = static_cast<std::size_t>(v) * 2 + static_cast<std::size_t>(dir);
        if (visited[idx]) continue;
        visited[idx] = 1;
        const bool obs = observed[static_cast<std::size_t>(v)];
        if (v == y && !obs) return false;
        if (dir == 0) {
            if (!obs) {
                for (int p : dag.parents(v)) queue.emplace_back(p, 0);
                for (int c : dag.children(v)) queue.emplace_back(c, 1);
            }
        } else {
            if (!obs) {
                for (int c : dag.children(v)) queue.emplace_back(c, 1);
            }
            if (anc[static_cast<std::size_t>(v)]) {
                for (int p : dag.parents(v)) queue.emplace_back(p, 0);
            }
        }
    }
    return true;
}

}  // namespace pcstar
