#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <unordered_map>
#include <vector>

#include <Eigen/SVD>

#include "common.hpp"
#include "digraph.hpp"

namespace aas {

struct SccDecomposition {
    std::vector<std::vector<int>> components; // members sorted ascending
    Vec centrality;                           // per node; empty when unset
    std::vector<int> peel_order;              // per component

    bool has_centrality() const { return centrality.size() > 0; }
};

struct CondensationGraph {
    int c = 0;
    std::vector<std::pair<int, int>> dag_edges;

    DirectedGraph as_graph() const {
        DirectedGraph g(c);
        for (auto [j, l] : dag_edges)
            g.add_edge(j, l);
        g.finalize();
        return g;
    }
};

// Classical iterative Tarjan; centrality left unset.
inline SccDecomposition scc_tarjan_oracle(const DirectedGraph &g) {
    const int n = g.n();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> comps;
    int counter = 0;
    std::vector<std::pair<int, std::size_t>> work;
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1)
            continue;
        work.assign(1, {root, 0});
        while (!work.empty()) {
            auto &[v, pi] = work.back();
            if (pi == 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            const auto &out = g.out(v);
            while (pi < out.size()) {
                int w = out[pi++];
                if (index[w] == -1) {
                    work.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w])
                    low[v] = std::min(low[v], index[w]);
            }
            if (descended)
                continue;
            int vdone = v;
            work.pop_back();
            if (!work.empty())
                low[work.back().first] = std::min(low[work.back().first], low[vdone]);
            if (low[vdone] == index[vdone]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != vdone);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    SccDecomposition d;
    d.components = std::move(comps);
    d.peel_order.assign(d.components.size(), 0);
    return d;
}

namespace detail {

// Kernel basis of (P^T - I) on the subgraph induced by `remaining`
// (all out-degrees positive there). Columns are the basis vectors.
inline Mat stationary_kernel(const DirectedGraph &g, const std::vector<int> &remaining,
                             const std::vector<char> &in_rem,
                             const std::vector<int> &pos, double kernel_tol) {
    const int r = static_cast<int>(remaining.size());
    Mat B = Mat::Zero(r, r); // holds P^T - I directly
    for (int i = 0; i < r; ++i) {
        int v = remaining[i];
        int deg = 0;
        for (int w : g.out(v))
            if (in_rem[w])
                ++deg;
        double inv = 1.0 / deg;
        for (int w : g.out(v))
            if (in_rem[w])
                B(pos[w], i) += inv;
        B(i, i) -= 1.0;
    }
    Eigen::BDCSVD<Mat> svd(B, Eigen::ComputeFullV);
    const auto &sv = svd.singularValues();
    double thresh = kernel_tol * std::max(sv(0), 1.0);
    int dim = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) <= thresh)
            ++dim;
    if (dim == 0)
        return Mat(r, 0);
    return svd.matrixV().rightCols(dim);
}

} // namespace detail

// Peeling decomposition: extract zero-out-degree nodes as singleton sinks,
// otherwise find sink components as supports of stationary vectors of the
// remaining random walk, remove, repeat. Agrees with scc_tarjan_oracle.
inline SccDecomposition scc_spectral(const DirectedGraph &g,
                                     double support_tol = 1e-8,
                                     double kernel_tol = 1e-10) {
    const int n = g.n();
    SccDecomposition d;
    d.centrality = Vec::Zero(n);
    std::vector<int> remaining(n);
    for (int i = 0; i < n; ++i)
        remaining[i] = i;
    std::vector<char> in_rem(n, 1);
    std::vector<int> pos(n, -1);
    std::vector<std::pair<int, std::size_t>> order_key; // (round, index into components)
    int round = 0;
    while (!remaining.empty()) {
        std::vector<int> zeros, keep;
        for (int v : remaining) {
            int deg = 0;
            for (int w : g.out(v))
                if (in_rem[w])
                    ++deg;
            (deg == 0 ? zeros : keep).push_back(v);
        }
        if (!zeros.empty()) {
            for (int v : zeros) {
                d.components.push_back({v});
                d.peel_order.push_back(round);
                d.centrality(v) = 1.0;
                in_rem[v] = 0;
            }
            remaining = std::move(keep);
            ++round;
            continue;
        }
        const int r = static_cast<int>(remaining.size());
        for (int i = 0; i < r; ++i)
            pos[remaining[i]] = i;
        Mat K = detail::stationary_kernel(g, remaining, in_rem, pos, kernel_tol);
        const int dim = static_cast<int>(K.cols());
        if (dim == 0)
            throw NumericalFailure("stationary kernel is empty on a nonempty subgraph");
        for (int j = 0; j < dim; ++j)
            K.col(j) /= K.col(j).cwiseAbs().maxCoeff();
        // union of supports
        std::vector<char> in_sup(n, 0);
        std::vector<int> support;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < dim; ++j)
                if (std::abs(K(i, j)) > support_tol) {
                    if (!in_sup[remaining[i]]) {
                        in_sup[remaining[i]] = 1;
                        support.push_back(remaining[i]);
                    }
                    break;
                }
        std::sort(support.begin(), support.end());
        // weakly connected pieces of the induced subgraph on the support
        std::vector<std::vector<int>> und(support.size());
        std::vector<int> sup_pos(n, -1);
        for (std::size_t i = 0; i < support.size(); ++i)
            sup_pos[support[i]] = static_cast<int>(i);
        for (std::size_t i = 0; i < support.size(); ++i)
            for (int w : g.out(support[i]))
                if (in_sup[w]) {
                    und[i].push_back(sup_pos[w]);
                    und[sup_pos[w]].push_back(static_cast<int>(i));
                }
        std::vector<char> seen(support.size(), 0);
        std::vector<std::vector<int>> pieces;
        for (std::size_t s0 = 0; s0 < support.size(); ++s0) {
            if (seen[s0])
                continue;
            std::vector<int> piece, stk{static_cast<int>(s0)};
            seen[s0] = 1;
            while (!stk.empty()) {
                int u = stk.back();
                stk.pop_back();
                piece.push_back(support[u]);
                for (int w : und[u])
                    if (!seen[w]) {
                        seen[w] = 1;
                        stk.push_back(w);
                    }
            }
            pieces.push_back(std::move(piece));
        }
        // close each piece under out-edges inside the remaining subgraph;
        // a true sink component is already closed, this only repairs
        // near-threshold omissions
        std::set<std::vector<int>> closures;
        for (const auto &piece : pieces) {
            std::vector<char> in_cl(n, 0);
            std::vector<int> cl, stk = piece;
            for (int v : piece)
                in_cl[v] = 1;
            while (!stk.empty()) {
                int u = stk.back();
                stk.pop_back();
                cl.push_back(u);
                for (int w : g.out(u))
                    if (in_rem[w] && !in_cl[w]) {
                        in_cl[w] = 1;
                        stk.push_back(w);
                    }
            }
            std::sort(cl.begin(), cl.end());
            closures.insert(std::move(cl));
        }
        std::vector<std::vector<int>> ordered(closures.begin(), closures.end());
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto &a, const auto &b) { return a.front() < b.front(); });
        for (auto &comp : ordered) {
            // centrality: restrict the kernel vector with the largest
            // magnitude on this component, take |.|, renormalize
            int best = 0;
            double bestn = -1.0;
            for (int j = 0; j < dim; ++j) {
                double nj = 0.0;
                for (int v : comp)
                    nj = std::max(nj, std::abs(K(pos[v], j)));
                if (nj > bestn) {
                    bestn = nj;
                    best = j;
                }
            }
            double total = 0.0;
            for (int v : comp)
                total += std::abs(K(pos[v], best));
            for (int v : comp)
                d.centrality(v) = std::abs(K(pos[v], best)) / total;
            for (int v : comp)
                in_rem[v] = 0;
            d.components.push_back(std::move(comp));
            d.peel_order.push_back(round);
        }
        std::vector<int> next;
        for (int v : remaining)
            if (in_rem[v])
                next.push_back(v);
        remaining = std::move(next);
        ++round;
    }
    // report in (peel round, smallest member) order
    std::vector<std::size_t> perm(d.components.size());
    for (std::size_t i = 0; i < perm.size(); ++i)
        perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        if (d.peel_order[a] != d.peel_order[b])
            return d.peel_order[a] < d.peel_order[b];
        return d.components[a].front() < d.components[b].front();
    });
    SccDecomposition out;
    out.centrality = d.centrality;
    for (std::size_t i : perm) {
        out.components.push_back(std::move(d.components[i]));
        out.peel_order.push_back(d.peel_order[i]);
    }
    return out;
}

// True iff the stationary eigenspace is 1-dimensional with full support.
// Graphs with an isolated or zero-out-degree node are rejected up front.
inline bool is_strongly_connected_spectral(const DirectedGraph &g,
                                           double kernel_tol = 1e-10) {
    const int n = g.n();
    if (n == 0)
        return false;
    for (int v = 0; v < n; ++v)
        if (g.out_degree(v) == 0)
            return false;
    // weak connectivity
    std::vector<std::vector<int>> und(n);
    for (int u = 0; u < n; ++u)
        for (int v : g.out(u)) {
            und[u].push_back(v);
            und[v].push_back(u);
        }
    std::vector<char> seen(n, 0);
    std::vector<int> stk{0};
    seen[0] = 1;
    int reached = 1;
    while (!stk.empty()) {
        int u = stk.back();
        stk.pop_back();
        for (int w : und[u])
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stk.push_back(w);
            }
    }
    if (reached < n)
        return false;
    std::vector<int> remaining(n);
    for (int i = 0; i < n; ++i)
        remaining[i] = i;
    std::vector<char> in_rem(n, 1);
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i)
        pos[i] = i;
    Mat K = detail::stationary_kernel(g, remaining, in_rem, pos, kernel_tol);
    if (K.cols() != 1)
        return false;
    Vec phi = K.col(0);
    phi /= phi.cwiseAbs().sum();
    return phi.cwiseAbs().minCoeff() > 1e-10;
}

// Contract components (in decomposition order) to single nodes.
inline CondensationGraph condensation(const DirectedGraph &g, const SccDecomposition &d) {
    const int c = static_cast<int>(d.components.size());
    std::vector<int> comp_of(g.n(), -1);
    for (int j = 0; j < c; ++j)
        for (int v : d.components[j])
            comp_of[v] = j;
    std::set<std::pair<int, int>> edges;
    for (int u = 0; u < g.n(); ++u)
        for (int w : g.out(u)) {
            int ju = comp_of[u], jw = comp_of[w];
            if (ju != jw)
                edges.insert({ju, jw});
        }
    CondensationGraph cg;
    cg.c = c;
    cg.dag_edges.assign(edges.begin(), edges.end());
    return cg;
}

} // namespace aas
