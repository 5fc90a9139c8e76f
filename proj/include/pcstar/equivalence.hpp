#pragma once

#include <algorithm>
#include <array>
#include <tuple>
#include <vector>

#include "pcstar/graph.hpp"
#include "pcstar/rng.hpp"

namespace pcstar {

struct NotExtendable : Error {
    using Error::Error;
};

/// A collider a -> c <- b with a, b nonadjacent, stored with a < b.
struct VStructure {
    int a = 0;
    int c = 0;
    int b = 0;

    friend auto operator<=>(const VStructure&, const VStructure&) = default;
};

inline std::vector<VStructure> v_structures(const Pattern& p) {
    std::vector<VStructure> out;
    const int n = static_cast<int>(p.size());
    for (int c = 0; c < n; ++c) {
        const auto pa = p.parents(c);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            for (std::size_t j = i + 1; j < pa.size(); ++j) {
                if (!p.adjacent(pa[i], pa[j])) out.push_back({pa[i], c, pa[j]});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<VStructure> v_structures(const Dag& dag) { return v_structures(as_pattern(dag)); }

/// Orients a - b as a -> b if that closes no directed cycle.
inline bool orient_if_acyclic(Pattern& p, int a, int b) {
    if (!p.undirected(a, b) || p.has_directed_path(b, a)) return false;
    p.orient(a, b);
    return true;
}

namespace detail {

// R1: w -> u, u - v, w and v nonadjacent.
inline bool meek_r1(const Pattern& p, int u, int v) {
    for (int w : p.parents(u)) {
        if (w != v && !p.adjacent(w, v)) return true;
    }
    return false;
}

// R2: u -> w -> v with u - v.
inline bool meek_r2(const Pattern& p, int u, int v) {
    const int n = static_cast<int>(p.size());
    for (int w = 0; w < n; ++w) {
        if (p.directed(u, w) && p.directed(w, v)) return true;
    }
    return false;
}

// R3: u - c, u - d, c -> v, d -> v, c and d nonadjacent.
inline bool meek_r3(const Pattern& p, int u, int v) {
    std::vector<int> cands;
    for (int c : p.neighbors(u)) {
        if (c != v && p.directed(c, v)) cands.push_back(c);
    }
    for (std::size_t i = 0; i < cands.size(); ++i) {
        for (std::size_t j = i + 1; j < cands.size(); ++j) {
            if (!p.adjacent(cands[i], cands[j])) return true;
        }
    }
    return false;
}

}  // namespace detail

/// Applies orientation rules R1-R3 until nothing changes. Every orientation
/// is refused if it would close a directed cycle, so the closure is safe on
/// patterns learned from noisy tests.
inline void meek_closure(Pattern& p) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto [a, b] : p.undirected_edges()) {
            for (auto [u, v] : std::array<Edge, 2>{Edge{a, b}, Edge{b, a}}) {
                if (!p.undirected(u, v)) continue;
                if (detail::meek_r1(p, u, v) || detail::meek_r2(p, u, v) || detail::meek_r3(p, u, v)) {
                    if (orient_if_acyclic(p, u, v)) changed = true;
                }
            }
        }
    }
}

/// Essential graph (CPDAG) of a DAG: skeleton, v-structure arcs, then the
/// arcs compelled by R1-R3.
inline Pattern pattern_of_dag(const Dag& dag) {
    Pattern p(dag.variables());
    for (auto [a, b] : dag.edges()) p.add_undirected(a, b);
    for (const auto& vs : v_structures(dag)) {
        if (p.undirected(vs.a, vs.c)) p.orient(vs.a, vs.c);
        if (p.undirected(vs.b, vs.c)) p.orient(vs.b, vs.c);
    }
    meek_closure(p);
    return p;
}

/// A DAG extending a pattern, plus whether the fallback orientation was needed.
struct Extension {
    Dag dag;
    bool fallback = false;
};

namespace detail {

inline bool creates_new_collider(const Pattern& working, const Pattern& original, int u, int v) {
    for (int w : working.parents(v)) {
        if (w != u && !original.adjacent(w, u)) return true;
    }
    return false;
}

inline Extension extend(const Pattern& p, Rng& rng, bool allow_fallback) {
    const int n = static_cast<int>(p.size());
    Pattern w = p;
    std::vector<bool> alive(static_cast<std::size_t>(n), true);
    int remaining = n;

    // Dor-Tarsi: peel off sinks whose undirected neighbours are adjacent to
    // everything else adjacent to the sink.
    while (remaining > 0) {
        std::vector<int> sinks;
        for (int x = 0; x < n; ++x) {
            if (!alive[static_cast<std::size_t>(x)]) continue;
            std::vector<int> nbrs, adj;
            bool has_out = false;
            for (int y = 0; y < n; ++y) {
                if (y == x || !alive[static_cast<std::size_t>(y)]) continue;
                if (w.directed(x, y)) has_out = true;
                if (w.undirected(x, y)) nbrs.push_back(y);
                if (w.adjacent(x, y)) adj.push_back(y);
            }
            if (has_out) continue;
            bool ok = true;
            for (int y : nbrs) {
                for (int a : adj) {
                    if (a != y && !w.adjacent(y, a)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (ok) sinks.push_back(x);
        }
        if (sinks.empty()) break;
        const int x = sinks[rng.below(sinks.size())];
        for (int y = 0; y < n; ++y) {
            if (alive[static_cast<std::size_t>(y)] && w.undirected(y, x)) w.orient(y, x);
        }
        alive[static_cast<std::size_t>(x)] = false;
        --remaining;
    }

    bool fallback = false;
    if (remaining > 0) {
        if (!allow_fallback) throw NotExtendable("pattern admits no consistent DAG extension");
        fallback = true;
        auto edges = w.undirected_edges();
        for (std::size_t i = edges.size(); i > 1; --i) std::swap(edges[i - 1], edges[rng.below(i)]);
        for (auto [a, b] : edges) {
            const bool ab_ok = !w.has_directed_path(b, a);
            const bool ba_ok = !w.has_directed_path(a, b);
            Edge pick{a, b};
            if (ab_ok && ba_ok) {
                const bool ab_clean = !creates_new_collider(w, p, a, b);
                const bool ba_clean = !creates_new_collider(w, p, b, a);
                if (ab_clean == ba_clean) {
                    if (rng.below(2) == 1) pick = {b, a};
                } else if (ba_clean) {
                    pick = {b, a};
                }
            } else if (ba_ok) {
                pick = {b, a};
            }
            w.orient(pick.first, pick.second);
        }
    }

    Dag dag(p.variables());
    for (auto [a, b] : w.directed_edges()) dag.add_edge(a, b);
    return {std::move(dag), fallback};
}

}  // namespace detail

/// Random member of the pattern's equivalence class: keeps every arc, orients
/// every undirected edge, adds no cycle and no new v-structure. Throws
/// NotExtendable when no such DAG exists.
inline Dag consistent_extension(const Pattern& p, Rng& rng) { return detail::extend(p, rng, false).dag; }

/// consistent_extension, falling back to greedy cycle-free orientation that
/// avoids new v-structures where it can when the pattern is not extendable.
inline Extension extend_pattern(const Pattern& p, Rng& rng) { return detail::extend(p, rng, true); }

}  // namespace pcstar
