#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "common.hpp"
#include "dataset.hpp"
#include "rng.hpp"

namespace aas {

// Hungarian assignment (potentials formulation) on a square cost matrix;
// returns the column assigned to each row.
inline std::vector<int> hungarian_min(const Mat &cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j)
                if (!used[j]) {
                    double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if (minv[j] < delta) {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            for (int j = 0; j <= n; ++j)
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j])
            assign[p[j] - 1] = j - 1;
    return assign;
}

namespace detail {

inline Mat contingency(const std::vector<int> &pred, const std::vector<int> &truth,
                       int &kp, int &kt) {
    if (pred.size() != truth.size() || pred.empty())
        throw LengthMismatch("label vectors must have equal nonzero length");
    kp = *std::max_element(pred.begin(), pred.end()) + 1;
    kt = *std::max_element(truth.begin(), truth.end()) + 1;
    Mat C = Mat::Zero(kp, kt);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0 || truth[i] < 0)
            throw LengthMismatch("labels must be nonnegative");
        C(pred[i], truth[i]) += 1.0;
    }
    return C;
}

} // namespace detail

struct AccuracyResult {
    double value = 0.0;
    std::vector<int> mapping; // cluster -> matched label
};

// best matched fraction over cluster<->label bijections; rectangular
// contingency tables are zero-padded to square
inline AccuracyResult accuracy(const std::vector<int> &pred, const std::vector<int> &truth) {
    int kp = 0, kt = 0;
    Mat C = detail::contingency(pred, truth, kp, kt);
    const int k = std::max(kp, kt);
    Mat pad = Mat::Zero(k, k);
    pad.topLeftCorner(kp, kt) = C;
    std::vector<int> assign = hungarian_min(-pad);
    double matched = 0.0;
    for (int i = 0; i < k; ++i)
        matched += pad(i, assign[i]);
    AccuracyResult r;
    r.value = matched / static_cast<double>(pred.size());
    r.mapping.assign(assign.begin(), assign.begin() + kp);
    return r;
}

// I(pred;truth) / sqrt(H(pred) H(truth)), natural logs; two zero-entropy
// partitions count as identical (1) or not (0)
inline double nmi(const std::vector<int> &pred, const std::vector<int> &truth) {
    int kp = 0, kt = 0;
    Mat C = detail::contingency(pred, truth, kp, kt);
    const double n = static_cast<double>(pred.size());
    Vec a = C.rowwise().sum(), b = C.colwise().sum();
    double info = 0.0;
    for (int i = 0; i < kp; ++i)
        for (int j = 0; j < kt; ++j)
            if (C(i, j) > 0)
                info += (C(i, j) / n) * std::log(n * C(i, j) / (a(i) * b(j)));
    double ha = 0.0, hb = 0.0;
    for (int i = 0; i < kp; ++i)
        if (a(i) > 0)
            ha -= (a(i) / n) * std::log(a(i) / n);
    for (int j = 0; j < kt; ++j)
        if (b(j) > 0)
            hb -= (b(j) / n) * std::log(b(j) / n);
    if (ha * hb == 0.0) // zero-entropy side(s): identical partitions iff both are
        return (ha == 0.0 && hb == 0.0) ? 1.0 : 0.0;
    return info / std::sqrt(ha * hb);
}

inline double purity(const std::vector<int> &pred, const std::vector<int> &truth) {
    int kp = 0, kt = 0;
    Mat C = detail::contingency(pred, truth, kp, kt);
    double total = 0.0;
    for (int i = 0; i < kp; ++i)
        total += C.row(i).maxCoeff();
    return total / static_cast<double>(pred.size());
}

struct EvaluationReport {
    double acc = 0.0;
    double nmi = 0.0;
    double purity = 0.0;
    std::vector<int> mapping;
    std::string nmi_normalization = "sqrt";
};

inline EvaluationReport evaluate(const std::vector<int> &pred, const std::vector<int> &truth) {
    EvaluationReport r;
    AccuracyResult a = accuracy(pred, truth);
    r.acc = a.value;
    r.mapping = std::move(a.mapping);
    r.nmi = nmi(pred, truth);
    r.purity = purity(pred, truth);
    return r;
}

// ------------------------------------------------------------------
// K-means baseline
// ------------------------------------------------------------------

struct KmeansResult {
    std::vector<int> labels;
    Mat centers; // d x k
    double inertia = 0.0;
    int iterations = 0;
};

// Lloyd with k-means++ seeding; data points are the columns of X.
inline KmeansResult kmeans(const Mat &X, int k, Rng &rng, int max_iter = 300,
                           double tol = 1e-8) {
    const int n = static_cast<int>(X.cols());
    const int d = static_cast<int>(X.rows());
    if (k < 1 || k > n)
        throw ConfigError("kmeans: need 1 <= k <= n");
    Mat centers(d, k);
    centers.col(0) = X.col(static_cast<int>(rng.below(n)));
    Vec d2 = (X.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
    for (int c = 1; c < k; ++c) {
        double total = d2.sum();
        int pick;
        if (total <= 0.0) {
            pick = static_cast<int>(rng.below(n));
        } else {
            double r = rng.uniform() * total, acc = 0.0;
            pick = n - 1;
            for (int j = 0; j < n; ++j) {
                acc += d2(j);
                if (acc >= r) {
                    pick = j;
                    break;
                }
            }
        }
        centers.col(c) = X.col(pick);
        d2 = d2.cwiseMin((X.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
    }
    KmeansResult res;
    res.labels.assign(n, 0);
    for (int it = 0; it < max_iter; ++it) {
        ++res.iterations;
        for (int j = 0; j < n; ++j) {
            int best = 0;
            double bd = (X.col(j) - centers.col(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                double dist = (X.col(j) - centers.col(c)).squaredNorm();
                if (dist < bd) {
                    bd = dist;
                    best = c;
                }
            }
            res.labels[j] = best;
        }
        Mat next = Mat::Zero(d, k);
        std::vector<int> counts(k, 0);
        for (int j = 0; j < n; ++j) {
            next.col(res.labels[j]) += X.col(j);
            ++counts[res.labels[j]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                next.col(c) /= counts[c];
            } else {
                // adopt the point farthest from its center
                int far = 0;
                double fd = -1.0;
                for (int j = 0; j < n; ++j) {
                    double dist = (X.col(j) - centers.col(res.labels[j])).squaredNorm();
                    if (dist > fd) {
                        fd = dist;
                        far = j;
                    }
                }
                next.col(c) = X.col(far);
            }
        }
        double moved = (next - centers).colwise().norm().maxCoeff();
        centers = next;
        if (moved < tol)
            break;
    }
    res.inertia = 0.0;
    for (int j = 0; j < n; ++j)
        res.inertia += (X.col(j) - centers.col(res.labels[j])).squaredNorm();
    res.centers = std::move(centers);
    return res;
}

struct BaselineResult {
    int best_view = 0;
    EvaluationReport report;
    std::vector<int> labels;
    std::vector<double> per_view_acc;
};

// K-means on each view (best of `restarts` by inertia), reporting the view
// with the highest accuracy.
inline BaselineResult kmeans_baseline(const MultiViewDataset &ds, int k,
                                      int restarts = 10, std::uint64_t seed = 0) {
    if (!ds.labels)
        throw ConfigError("kmeans baseline needs ground-truth labels");
    BaselineResult best;
    best.per_view_acc.resize(ds.v);
    double best_acc = -1.0;
    for (int i = 0; i < ds.v; ++i) {
        KmeansResult bestrun;
        double best_inertia = std::numeric_limits<double>::infinity();
        for (int r = 0; r < restarts; ++r) {
            Rng rng(derive_seed(seed, i, r));
            KmeansResult run = kmeans(ds.attributes[i], k, rng);
            if (run.inertia < best_inertia) {
                best_inertia = run.inertia;
                bestrun = std::move(run);
            }
        }
        EvaluationReport rep = evaluate(bestrun.labels, *ds.labels);
        best.per_view_acc[i] = rep.acc;
        if (rep.acc > best_acc) {
            best_acc = rep.acc;
            best.best_view = i;
            best.report = rep;
            best.labels = bestrun.labels;
        }
    }
    return best;
}

} // namespace aas
