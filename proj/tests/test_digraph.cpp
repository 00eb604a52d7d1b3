#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <aas/digraph.hpp>
#include <aas/rng.hpp>
#include <aas/scc.hpp>

using namespace aas;

namespace {

DirectedGraph cycle(int n) {
    DirectedGraph g(n);
    for (int i = 0; i < n; ++i)
        g.add_edge(i, (i + 1) % n);
    g.finalize();
    return g;
}

DirectedGraph path(int n) {
    DirectedGraph g(n);
    for (int i = 0; i + 1 < n; ++i)
        g.add_edge(i, i + 1);
    g.finalize();
    return g;
}

DirectedGraph random_graph(int n, double p, Rng &rng) {
    DirectedGraph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && rng.uniform() < p)
                g.add_edge(u, v);
    g.finalize();
    return g;
}

bool is_dag(const DirectedGraph &g) { // Kahn
    std::vector<int> indeg(g.n(), 0);
    for (int u = 0; u < g.n(); ++u)
        for (int v : g.out(u))
            ++indeg[v];
    std::vector<int> q;
    for (int u = 0; u < g.n(); ++u)
        if (indeg[u] == 0)
            q.push_back(u);
    int seen = 0;
    while (!q.empty()) {
        int u = q.back();
        q.pop_back();
        ++seen;
        for (int v : g.out(u))
            if (--indeg[v] == 0)
                q.push_back(v);
    }
    return seen == g.n();
}

} // namespace

TEST_CASE("graph construction") {
    DirectedGraph g(3);
    g.add_edge(0, 1);
    g.add_edge(0, 1); // duplicate collapses
    g.add_edge(1, 1); // self-loop dropped
    g.finalize();
    REQUIRE(g.edge_count() == 1);
    REQUIRE(g.has_edge(0, 1));
    REQUIRE_FALSE(g.has_edge(1, 1));
    REQUIRE_THROWS_AS(g.add_edge(0, 3), DimensionMismatch);
    Mat A = g.adjacency_matrix();
    REQUIRE(A(0, 1) == 1.0);
    REQUIRE(A.sum() == 1.0);
    REQUIRE(A.diagonal().isZero());
}

TEST_CASE("tarjan oracle hand cases") {
    auto one = scc_tarjan_oracle(cycle(3));
    REQUIRE(one.components.size() == 1);
    REQUIRE(one.components[0] == std::vector<int>{0, 1, 2});
    REQUIRE_FALSE(one.has_centrality());

    auto three = scc_tarjan_oracle(path(3));
    REQUIRE(three.components.size() == 3);

    auto empty = scc_tarjan_oracle(DirectedGraph(4));
    REQUIRE(empty.components.size() == 4);
}

TEST_CASE("shortest path node counts") {
    DirectedGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.finalize();
    Mat c = shortest_path_node_counts(g, {0, 1, 3}, {0, 1, 2, 3});
    REQUIRE(c(0, 0) == 1.0); // node to itself
    REQUIRE(c(0, 1) == 2.0); // direct edge
    REQUIRE(c(0, 2) == 3.0); // two hops
    REQUIRE(std::isinf(c(0, 3)));
    REQUIRE(std::isinf(c(2, 0)));
    REQUIRE(c(1, 2) == 2.0);
}

TEST_CASE("edge list io") {
    SECTION("comments and blanks") {
        std::istringstream in("# header\n0\t1\n\n2\t0 # trailing comment\n");
        DirectedGraph g = load_edge_list(in, 3);
        REQUIRE(g.edge_count() == 2);
        REQUIRE(g.has_edge(0, 1));
        REQUIRE(g.has_edge(2, 0));
    }
    SECTION("bad line reports position") {
        std::istringstream in("0\t1\n0\tx\n");
        try {
            load_edge_list(in, 3, "edges.tsv");
            FAIL("expected FormatError");
        } catch (const FormatError &e) {
            REQUIRE(e.file == "edges.tsv");
            REQUIRE(e.line == 2);
        }
    }
    SECTION("trailing tokens rejected") {
        std::istringstream in("0\t1\t2\n");
        REQUIRE_THROWS_AS(load_edge_list(in, 3), FormatError);
    }
    SECTION("out of range rejected") {
        std::istringstream in("0\t7\n");
        REQUIRE_THROWS_AS(load_edge_list(in, 3), FormatError);
    }
    SECTION("round trip") {
        Rng rng(5);
        DirectedGraph g = random_graph(12, 0.2, rng);
        std::ostringstream out;
        save_edge_list(out, g);
        std::istringstream in(out.str());
        DirectedGraph h = load_edge_list(in, 12);
        REQUIRE(g.adjacency_matrix() == h.adjacency_matrix());
    }
}

TEST_CASE("condensation") {
    SECTION("two 2-cycles joined by one edge") {
        DirectedGraph g(4);
        g.add_edge(0, 1);
        g.add_edge(1, 0);
        g.add_edge(2, 3);
        g.add_edge(3, 2);
        g.add_edge(1, 2);
        g.finalize();
        auto d = scc_spectral(g);
        auto cg = condensation(g, d);
        REQUIRE(cg.c == 2);
        REQUIRE(cg.dag_edges.size() == 1);
    }
    SECTION("strongly connected collapses to a point") {
        auto g = cycle(5);
        auto cg = condensation(g, scc_spectral(g));
        REQUIRE(cg.c == 1);
        REQUIRE(cg.dag_edges.empty());
    }
    SECTION("random graphs condense to DAGs") {
        Rng rng(7);
        for (int t = 0; t < 25; ++t) {
            int n = 2 + static_cast<int>(rng.below(30));
            DirectedGraph g = random_graph(n, 0.05 + 0.25 * rng.uniform(), rng);
            auto cg = condensation(g, scc_tarjan_oracle(g));
            REQUIRE(is_dag(cg.as_graph()));
        }
    }
}
