#pragma once

#include <cmath>
#include <vector>

#include "common.hpp"
#include "digraph.hpp"
#include "rng.hpp"
#include "scc.hpp"

namespace aas {

struct AnchorStructure {
    std::vector<int> anchors; // node ids, grouped by component
    Mat membership_b;         // c x m, one 1 per column
    Mat condensation_sim_a;   // c x c
    Mat anchor_sim_c;         // m x m
    Mat s_tilde;              // m x m
};

// ceil(theta*|C|) top-centrality nodes from each component, components in
// decomposition order, ties broken toward the smaller node index.
inline std::vector<int> select_anchors(const SccDecomposition &d, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw InvalidTheta("theta must lie in (0,1)");
    std::vector<int> anchors;
    for (const auto &comp : d.components) {
        int take = static_cast<int>(std::ceil(theta * comp.size()));
        std::vector<int> ranked = comp;
        std::sort(ranked.begin(), ranked.end(), [&](int a, int b) {
            if (d.centrality(a) != d.centrality(b))
                return d.centrality(a) > d.centrality(b);
            return a < b;
        });
        anchors.insert(anchors.end(), ranked.begin(), ranked.begin() + take);
    }
    return anchors;
}

// Ablation variant: same anchor count, drawn uniformly without replacement.
inline std::vector<int> select_random_anchors(const SccDecomposition &d, double theta,
                                              int n, Rng &rng) {
    if (!(theta > 0.0 && theta < 1.0))
        throw InvalidTheta("theta must lie in (0,1)");
    int m = 0;
    for (const auto &comp : d.components)
        m += static_cast<int>(std::ceil(theta * comp.size()));
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i)
        pool[i] = i;
    for (int i = 0; i < m; ++i) { // partial Fisher-Yates
        int j = i + static_cast<int>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> anchors(pool.begin(), pool.begin() + m);
    std::sort(anchors.begin(), anchors.end());
    return anchors;
}

namespace detail {

// reciprocal shortest-path node counts, symmetrized: raw + raw^T
inline Mat reciprocal_count_similarity(const DirectedGraph &g,
                                       const std::vector<int> &nodes) {
    Mat cnt = shortest_path_node_counts(g, nodes, nodes);
    Mat raw = cnt.cwiseInverse(); // 1/inf = 0
    return raw + raw.transpose();
}

} // namespace detail

inline Mat condensation_similarity(const CondensationGraph &cg) {
    DirectedGraph dag = cg.as_graph();
    std::vector<int> all(cg.c);
    for (int i = 0; i < cg.c; ++i)
        all[i] = i;
    return detail::reciprocal_count_similarity(dag, all);
}

inline Mat anchor_similarity(const DirectedGraph &g, const std::vector<int> &anchors) {
    return detail::reciprocal_count_similarity(g, anchors);
}

// Structure around an explicit anchor list (the random-anchor ablation
// passes its own); b, a, c and s_tilde follow the same definitions.
inline AnchorStructure build_structural_similarity(const DirectedGraph &g,
                                                   const SccDecomposition &d,
                                                   std::vector<int> anchors) {
    AnchorStructure s;
    s.anchors = std::move(anchors);
    const int c = static_cast<int>(d.components.size());
    const int m = static_cast<int>(s.anchors.size());
    std::vector<int> comp_of(g.n(), -1);
    for (int j = 0; j < c; ++j)
        for (int v : d.components[j])
            comp_of[v] = j;
    s.membership_b = Mat::Zero(c, m);
    for (int k = 0; k < m; ++k)
        s.membership_b(comp_of[s.anchors[k]], k) = 1.0;
    s.condensation_sim_a = condensation_similarity(condensation(g, d));
    s.anchor_sim_c = anchor_similarity(g, s.anchors);
    s.s_tilde = (s.membership_b.transpose() * s.condensation_sim_a * s.membership_b)
                    .cwiseProduct(s.anchor_sim_c);
    return s;
}

inline AnchorStructure build_structural_similarity(const DirectedGraph &g,
                                                   const SccDecomposition &d,
                                                   double theta) {
    return build_structural_similarity(g, d, select_anchors(d, theta));
}

} // namespace aas
