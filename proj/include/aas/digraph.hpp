#pragma once

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace aas {

// Simple unweighted digraph over dense node ids 0..n-1, no self-loops.
class DirectedGraph {
public:
    DirectedGraph() = default;
    explicit DirectedGraph(int n) : n_(n), adj_(n) {}

    int n() const { return n_; }

    void add_edge(int u, int v) {
        if (u < 0 || v < 0 || u >= n_ || v >= n_)
            throw DimensionMismatch("edge endpoint out of range");
        if (u == v)
            return; // self-loops are dropped
        auto &row = adj_[u];
        if (std::find(row.begin(), row.end(), v) == row.end())
            row.push_back(v);
    }

    void finalize() {
        for (auto &row : adj_)
            std::sort(row.begin(), row.end());
    }

    const std::vector<int> &out(int u) const { return adj_[u]; }
    const std::vector<std::vector<int>> &adjacency_lists() const { return adj_; }

    int out_degree(int u) const { return static_cast<int>(adj_[u].size()); }

    long edge_count() const {
        long e = 0;
        for (const auto &row : adj_)
            e += static_cast<long>(row.size());
        return e;
    }

    bool has_edge(int u, int v) const {
        const auto &row = adj_[u];
        return std::binary_search(row.begin(), row.end(), v);
    }

    Mat adjacency_matrix() const {
        Mat A = Mat::Zero(n_, n_);
        for (int u = 0; u < n_; ++u)
            for (int v : adj_[u])
                A(u, v) = 1.0;
        return A;
    }

private:
    int n_ = 0;
    std::vector<std::vector<int>> adj_;
};

// Edge-list file: one "u<TAB>v" per line, 0-based, '#' starts a comment.
inline DirectedGraph load_edge_list(std::istream &in, int n, const std::string &name = "<stream>") {
    DirectedGraph g(n);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        long u, v;
        if (!(ls >> u))
            continue; // blank / comment-only line
        if (!(ls >> v))
            throw FormatError(name, lineno, "expected two node indices");
        std::string extra;
        if (ls >> extra)
            throw FormatError(name, lineno, "trailing tokens after edge");
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw FormatError(name, lineno, "node index out of range");
        g.add_edge(static_cast<int>(u), static_cast<int>(v));
    }
    g.finalize();
    return g;
}

inline DirectedGraph load_edge_list_file(const std::string &path, int n) {
    std::ifstream in(path);
    if (!in)
        throw FormatError(path, 0, "cannot open file");
    return load_edge_list(in, n, path);
}

inline void save_edge_list(std::ostream &out, const DirectedGraph &g) {
    for (int u = 0; u < g.n(); ++u)
        for (int v : g.out(u))
            out << u << '\t' << v << '\n';
}

// Entry (s,t) = number of nodes on a shortest directed path s->t, both
// endpoints included (BFS distance + 1); (s,s) = 1; unreachable -> +inf.
inline Mat shortest_path_node_counts(const DirectedGraph &g,
                                     const std::vector<int> &sources,
                                     const std::vector<int> &targets) {
    const double inf = std::numeric_limits<double>::infinity();
    Mat out = Mat::Constant(static_cast<long>(sources.size()),
                            static_cast<long>(targets.size()), inf);
    std::vector<int> dist(g.n());
    std::vector<int> queue;
    queue.reserve(g.n());
    for (std::size_t si = 0; si < sources.size(); ++si) {
        std::fill(dist.begin(), dist.end(), -1);
        queue.clear();
        queue.push_back(sources[si]);
        dist[sources[si]] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int u = queue[head];
            for (int w : g.out(u))
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
        }
        for (std::size_t ti = 0; ti < targets.size(); ++ti)
            if (dist[targets[ti]] >= 0)
                out(si, ti) = dist[targets[ti]] + 1.0;
    }
    return out;
}

} // namespace aas
