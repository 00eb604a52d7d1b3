#pragma once

#include <optional>
#include <vector>

#include "common.hpp"
#include "digraph.hpp"

namespace aas {

// Shared node set across views; attributes are column-per-node.
struct MultiViewDataset {
    int n = 0;
    int v = 0;
    std::vector<Mat> attributes;       // d_i x n
    std::vector<DirectedGraph> graphs; // one per view
    std::optional<std::vector<int>> labels;

    void validate() const {
        if (static_cast<int>(attributes.size()) != v ||
            static_cast<int>(graphs.size()) != v)
            throw InconsistentN("view count does not match stored views");
        for (int i = 0; i < v; ++i) {
            if (attributes[i].cols() != n)
                throw InconsistentN("attribute matrix of view " + std::to_string(i) +
                                    " has " + std::to_string(attributes[i].cols()) +
                                    " columns, expected " + std::to_string(n));
            if (graphs[i].n() != n)
                throw InconsistentN("graph of view " + std::to_string(i) + " has " +
                                    std::to_string(graphs[i].n()) + " nodes, expected " +
                                    std::to_string(n));
        }
        if (labels && static_cast<int>(labels->size()) != n)
            throw InconsistentN("label vector length does not match n");
    }
};

} // namespace aas
