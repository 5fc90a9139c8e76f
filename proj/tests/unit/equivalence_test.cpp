#include <numeric>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "pcstar/equivalence.hpp"

using namespace pcstar;
using testutil::make_dag;

namespace {

// Random DAG over a random node order, so arcs can point from high to low ids.
Dag shuffled_dag(std::size_t n, double p, Rng& rng) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    Dag d(make_variables(n));
    for (std::size_t j = 1; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (rng.uniform() < p) d.add_edge(perm[i], perm[j]);
        }
    }
    return d;
}

bool markov_equivalent(const Dag& a, const Dag& b) {
    return as_pattern(a).skeleton() == as_pattern(b).skeleton() && v_structures(a) == v_structures(b);
}

}  // namespace

TEST(PatternOfDag, ChainIsUndirected) {
    const auto p = pattern_of_dag(make_dag(3, {{0, 1}, {1, 2}}));
    EXPECT_TRUE(p.undirected(0, 1));
    EXPECT_TRUE(p.undirected(1, 2));
    EXPECT_FALSE(p.adjacent(0, 2));
}

TEST(PatternOfDag, ColliderIsCompelled) {
    const auto p = pattern_of_dag(make_dag(3, {{0, 2}, {1, 2}}));
    EXPECT_TRUE(p.directed(0, 2));
    EXPECT_TRUE(p.directed(1, 2));
    EXPECT_EQ(v_structures(p).size(), 1u);
}

TEST(PatternOfDag, SingleEdge) {
    EXPECT_TRUE(pattern_of_dag(make_dag(2, {{0, 1}})).undirected(0, 1));
}

TEST(PatternOfDag, ColliderPropagatesByR1) {
    const auto p = pattern_of_dag(make_dag(4, {{0, 2}, {1, 2}, {2, 3}}));
    EXPECT_TRUE(p.directed(2, 3));
}

TEST(PatternOfDag, R2AndR3Cases) {
    // a -> b -> c with a - c forced by R2 once a -> b -> c is compelled.
    const auto p = pattern_of_dag(make_dag(4, {{0, 1}, {3, 1}, {1, 2}, {0, 2}}));
    EXPECT_TRUE(p.directed(1, 2));
    EXPECT_TRUE(p.directed(0, 2));
    // R3: d - a, d - b, d - c, a -> c <- b.
    const auto q = pattern_of_dag(make_dag(4, {{3, 0}, {3, 1}, {3, 2}, {0, 2}, {1, 2}}));
    EXPECT_TRUE(q.directed(3, 2));
    EXPECT_TRUE(q.undirected(3, 0));
}

TEST(PatternOfDag, EquivalentDagsShareAPattern) {
    EXPECT_EQ(pattern_of_dag(make_dag(3, {{0, 1}, {1, 2}})), pattern_of_dag(make_dag(3, {{2, 1}, {1, 0}})));
    EXPECT_EQ(pattern_of_dag(make_dag(3, {{1, 0}, {1, 2}})), pattern_of_dag(make_dag(3, {{0, 1}, {1, 2}})));
}

TEST(ConsistentExtension, SingleUndirectedEdge) {
    Pattern p(make_variables(2));
    p.add_undirected(0, 1);
    bool saw_forward = false, saw_back = false;
    for (std::uint64_t s = 0; s < 40; ++s) {
        Rng rng(s);
        const auto d = consistent_extension(p, rng);
        EXPECT_EQ(d.edge_count(), 1u);
        saw_forward |= d.has_edge(0, 1);
        saw_back |= d.has_edge(1, 0);
    }
    EXPECT_TRUE(saw_forward && saw_back);
}

TEST(ConsistentExtension, MarkovEquivalentOnRandomDags) {
    Rng rng(123);
    for (int t = 0; t < 1000; ++t) {
        const auto g = shuffled_dag(8, 0.3, rng);
        const auto ext = consistent_extension(pattern_of_dag(g), rng);
        ASSERT_TRUE(markov_equivalent(g, ext)) << "trial " << t;
        EXPECT_EQ(pattern_of_dag(ext), pattern_of_dag(g));
    }
}

TEST(ConsistentExtension, FullyDirectedIsIdentity) {
    const auto g = make_dag(4, {{0, 1}, {2, 1}, {1, 3}});
    Rng rng(1);
    EXPECT_EQ(consistent_extension(as_pattern(g), rng), g);
}

TEST(ConsistentExtension, NonExtendableThrows) {
    // Undirected 4-cycle has no extension without a new v-structure.
    Pattern p(make_variables(4));
    p.add_undirected(0, 1);
    p.add_undirected(1, 2);
    p.add_undirected(2, 3);
    p.add_undirected(3, 0);
    Rng rng(3);
    EXPECT_THROW(consistent_extension(p, rng), NotExtendable);
    const auto ext = extend_pattern(p, rng);
    EXPECT_TRUE(ext.fallback);
    EXPECT_EQ(ext.dag.edge_count(), 4u);
}

TEST(MeekClosure, RefusesCycles) {
    Pattern p(make_variables(3));
    p.add_directed(0, 1);
    p.add_directed(1, 2);
    p.add_undirected(0, 2);
    meek_closure(p);
    EXPECT_TRUE(p.directed(0, 2));
    EXPECT_FALSE(p.has_directed_path(2, 0));
}

TEST(PatternOfDag, InvariantUnderExtensionRoundTrip) {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const auto g = shuffled_dag(7, 0.4, rng);
        const auto p = pattern_of_dag(g);
        EXPECT_EQ(pattern_of_dag(consistent_extension(p, rng)), p);
        EXPECT_EQ(v_structures(p), v_structures(g));
    }
}
