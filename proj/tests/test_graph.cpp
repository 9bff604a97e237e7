#include <catch2/catch_amalgamated.hpp>

#include "canid/graph.hpp"
#include "canid/rng.hpp"
#include "support/oracles.hpp"

using canid::CausalGraph;
using canid::NodeId;
using canid::NodeSet;

namespace {

CausalGraph chain_abc() {
    return CausalGraph({{"A", true}, {"B", true}, {"C", true}}, {{"A", "B"}, {"B", "C"}});
}

}  // namespace

TEST_CASE("relatives on a three-node chain") {
    const auto g = chain_abc();
    const auto r = g.relatives(g.id_of("B"));
    REQUIRE(r.parents == NodeSet{g.id_of("A")});
    REQUIRE(r.descendants == NodeSet{g.id_of("C")});
    REQUIRE(r.non_descendants == NodeSet{g.id_of("A"), g.id_of("B")});
}

TEST_CASE("relatives of an isolated node") {
    const CausalGraph g({{"A", true}, {"B", true}, {"N", true}}, {{"A", "B"}});
    const auto r = g.relatives(g.id_of("N"));
    REQUIRE(r.parents.empty());
    REQUIRE(r.descendants.empty());
    REQUIRE(r.non_descendants.size() == 3);
}

TEST_CASE("descendants in a diamond") {
    const CausalGraph g({{"A", true}, {"B", true}, {"C", true}, {"D", true}},
                        {{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}});
    const auto r = g.relatives(g.id_of("A"));
    REQUIRE(r.descendants == NodeSet{g.id_of("B"), g.id_of("C"), g.id_of("D")});
}

TEST_CASE("relatives partitions the node set") {
    canid::Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.index(4));
        std::vector<canid::NodeDecl> nodes;
        for (int i = 0; i < n; ++i) nodes.push_back({"n" + std::to_string(i), true});
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.uniform01() < 0.4) edges.emplace_back(i, j);
        const auto g = CausalGraph::from_index_edges(nodes, edges);
        for (int v = 0; v < n; ++v) {
            const auto r = g.relatives(NodeId{v});
            REQUIRE(r.descendants.size() + r.non_descendants.size() == static_cast<size_t>(n));
            REQUIRE(r.non_descendants.count(NodeId{v}) == 1);
            for (auto d : r.descendants) REQUIRE(r.non_descendants.count(d) == 0);
        }
    }
}

TEST_CASE("d-separation on chain and collider") {
    const auto chain = chain_abc();
    REQUIRE(chain.d_separated(chain.id_of("A"), chain.id_of("C"), {chain.id_of("B")}));
    REQUIRE_FALSE(chain.d_separated(chain.id_of("A"), chain.id_of("C"), {}));

    const CausalGraph collider({{"A", true}, {"B", true}, {"C", true}}, {{"A", "B"}, {"C", "B"}});
    REQUIRE(collider.d_separated(collider.id_of("A"), collider.id_of("C"), {}));
    REQUIRE_FALSE(collider.d_separated(collider.id_of("A"), collider.id_of("C"), {collider.id_of("B")}));
}

TEST_CASE("collider opened through a conditioned descendant") {
    const CausalGraph g({{"A", true}, {"B", true}, {"C", true}, {"D", true}},
                        {{"A", "B"}, {"C", "B"}, {"B", "D"}});
    REQUIRE(g.d_separated(g.id_of("A"), g.id_of("C"), {}));
    REQUIRE_FALSE(g.d_separated(g.id_of("A"), g.id_of("C"), {g.id_of("D")}));
}

// Skeleton of the second example system: V->X, Z->X, Z->Y, X->Y. The
// exogenous V is marginally dependent on Y through the X chain, while the
// collider at X links V and Z only once X is conditioned.
TEST_CASE("collider activation in the V->X<-Z skeleton") {
    const CausalGraph g({{"V", false}, {"Z", true}, {"X", true}, {"Y", true}},
                        {{"V", "X"}, {"Z", "X"}, {"Z", "Y"}, {"X", "Y"}});
    const auto V = g.id_of("V"), Z = g.id_of("Z"), X = g.id_of("X"), Y = g.id_of("Y");
    REQUIRE(g.d_separated(V, Z, {}));
    REQUIRE_FALSE(g.d_separated(V, Z, {X}));
    REQUIRE_FALSE(g.d_separated(V, Y, {X}));
    REQUIRE(g.d_separated(V, Y, {X, Z}));
}

TEST_CASE("d-separation symmetry and oracle agreement on random DAGs") {
    canid::Rng rng(1234);
    canid::Rng coin(99);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3 + static_cast<int>(rng.index(2));
        std::vector<canid::NodeDecl> nodes;
        for (int i = 0; i < n; ++i) nodes.push_back({"n" + std::to_string(i), true});
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (coin.uniform01() < 0.5) edges.emplace_back(i, j);
        const auto g = CausalGraph::from_index_edges(nodes, edges);
        const canid_test::PathEnumerationOracle oracle(g);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                const size_t others = static_cast<size_t>(n - 2);
                for (size_t mask = 0; mask < (size_t{1} << others); ++mask) {
                    NodeSet s;
                    size_t bit = 0;
                    for (int v = 0; v < n; ++v) {
                        if (v == a || v == b) continue;
                        if (mask & (size_t{1} << bit)) s.insert(NodeId{v});
                        ++bit;
                    }
                    const bool fwd = g.d_separated(NodeId{a}, NodeId{b}, s);
                    REQUIRE(fwd == g.d_separated(NodeId{b}, NodeId{a}, s));
                    REQUIRE(fwd == oracle.d_separated(NodeId{a}, NodeId{b}, s));
                }
            }
    }
}

TEST_CASE("adjacency: direct edges and hidden common parents") {
    const CausalGraph direct({{"X", true}, {"Y", true}}, {{"X", "Y"}});
    REQUIRE(direct.is_adjacent(direct.id_of("X"), direct.id_of("Y")));

    const CausalGraph latent({{"U", false}, {"X", true}, {"Y", true}}, {{"U", "X"}, {"U", "Y"}});
    REQUIRE(latent.is_adjacent(latent.id_of("X"), latent.id_of("Y")));

    const CausalGraph observed_mid({{"X", true}, {"Z", true}, {"Y", true}}, {{"X", "Z"}, {"Z", "Y"}});
    REQUIRE_FALSE(observed_mid.is_adjacent(observed_mid.id_of("X"), observed_mid.id_of("Y")));
}

TEST_CASE("graph construction rejects bad input") {
    REQUIRE_THROWS_AS(CausalGraph({{"A", true}}, {{"A", "A"}}), std::invalid_argument);
    REQUIRE_THROWS_AS(CausalGraph({{"A", true}, {"B", true}}, {{"A", "B"}, {"B", "A"}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        CausalGraph({{"A", true}, {"B", true}, {"C", true}}, {{"A", "B"}, {"B", "C"}, {"C", "A"}}),
        std::invalid_argument);
    REQUIRE_THROWS_AS(CausalGraph({{"A", true}, {"A", true}}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(CausalGraph({{"A", true}}, {{"A", "Q"}}), std::invalid_argument);
}

TEST_CASE("query errors") {
    const auto g = chain_abc();
    REQUIRE_THROWS_AS(g.id_of("nope"), std::invalid_argument);
    REQUIRE_THROWS_AS(g.relatives(NodeId{17}), std::invalid_argument);
    REQUIRE_THROWS_AS(g.d_separated(g.id_of("A"), g.id_of("A"), {}), std::invalid_argument);
    REQUIRE_THROWS_AS(g.d_separated(g.id_of("A"), g.id_of("C"), {g.id_of("A")}), std::invalid_argument);
}
