#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "common.hpp"
#include "dataset.hpp"
#include "rng.hpp"
#include "simplex_qp.hpp"
#include "structural.hpp"

namespace aas {

enum class Ablation { full, no_structure, random_anchors };

inline const char *to_string(Ablation a) {
    switch (a) {
    case Ablation::no_structure:
        return "no-structure";
    case Ablation::random_anchors:
        return "random-anchors";
    default:
        return "full";
    }
}

inline Ablation ablation_from_string(const std::string &s) {
    if (s == "full")
        return Ablation::full;
    if (s == "no-structure")
        return Ablation::no_structure;
    if (s == "random-anchors")
        return Ablation::random_anchors;
    throw ConfigError("unknown ablation mode: " + s);
}

struct FusionConfig {
    double alpha = 0.1;
    double theta = 0.3;
    int k = 2;
    int t_max = 30;
    int outer_max = 50;
    double outer_tol = 1e-5;
    std::uint64_t seed = 0;
    Ablation ablation = Ablation::full;
    double qp_tol = 1e-10;
    int qp_max_iter = 5000;
    int threads = 1;

    void validate() const {
        if (alpha < 0.0)
            throw ConfigError("alpha must be >= 0");
        if (k < 2)
            throw ConfigError("k must be >= 2");
        if (t_max < 0)
            throw ConfigError("t_max must be >= 0");
        if (outer_max < 1)
            throw ConfigError("outer_max must be >= 1");
        if (!(outer_tol > 0.0))
            throw ConfigError("outer_tol must be > 0");
    }
};

struct FusionState {
    std::vector<Mat> s_bar;    // n x m_i
    std::vector<Mat> s_tilde;  // m_i x m_i
    Mat h;                     // n x k
    std::vector<Mat> f_embed;  // m_i x k, orthonormal columns
    Vec p;                     // view weights, on the simplex
    std::vector<double> objective_trace;    // full objective per outer round
    std::vector<double> qp_objective_trace; // attribute subproblem value per outer round
    std::uint64_t rng_seed = 0;

    int n_views() const { return static_cast<int>(s_bar.size()); }
    std::vector<Mat> fused_views() const {
        std::vector<Mat> views(s_bar.size());
        for (std::size_t i = 0; i < s_bar.size(); ++i)
            views[i] = s_bar[i] * s_tilde[i];
        return views;
    }
};

// ------------------------------------------------------------------
// objectives
// ------------------------------------------------------------------

// one view's term: ||X - Xbar Sb^T||^2 + alpha ||Sb||^2 + (1/p) ||Sb St - H F^T||^2
inline double view_objective(const Mat &x, const Mat &x_bar, const Mat &s_bar,
                             const Mat &s_tilde, const Mat &h, const Mat &f_embed,
                             double p, double alpha) {
    double rec = (x - x_bar * s_bar.transpose()).squaredNorm();
    double reg = alpha * s_bar.squaredNorm();
    double fus = (s_bar * s_tilde - h * f_embed.transpose()).squaredNorm() / p;
    return rec + reg + fus;
}

inline double full_objective(const std::vector<Mat> &xs, const std::vector<Mat> &x_bars,
                             const FusionState &st, double alpha) {
    double total = 0.0;
    for (int i = 0; i < st.n_views(); ++i)
        total += view_objective(xs[i], x_bars[i], st.s_bar[i], st.s_tilde[i], st.h,
                                st.f_embed[i], st.p(i), alpha);
    return total;
}

// sum_i (1/p_i) ||view_i - H F_i^T||^2 over the fused views
inline double embedding_objective(const std::vector<Mat> &views, const Mat &h,
                                  const std::vector<Mat> &f_embed, const Vec &p) {
    double total = 0.0;
    for (std::size_t i = 0; i < views.size(); ++i)
        total += (views[i] - h * f_embed[i].transpose()).squaredNorm() / p(i);
    return total;
}

// ------------------------------------------------------------------
// block updates
// ------------------------------------------------------------------

struct FUpdate {
    Mat f;
    bool rank_deficient = false; // some singular value < 1e-12: solution non-unique
};

// orthogonal Procrustes: F = U V^T from the thin SVD of view^T H
inline FUpdate update_f(const Mat &view, const Mat &h) {
    Eigen::BDCSVD<Mat> svd(view.transpose() * h,
                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    FUpdate up;
    up.f = svd.matrixU() * svd.matrixV().transpose();
    up.rank_deficient = svd.singularValues().minCoeff() < 1e-12;
    return up;
}

inline FUpdate update_f(const FusionState &st, int view) {
    return update_f(st.s_bar[view] * st.s_tilde[view], st.h);
}

// exact minimizer over H >= 0 given orthonormal F_i:
// H = max(0, sum_i w_i view_i F_i / sum_i w_i), w_i = 1/p_i
inline Mat update_h(const std::vector<Mat> &views, const std::vector<Mat> &f_embed,
                    const Vec &p) {
    Mat g = Mat::Zero(views[0].rows(), f_embed[0].cols());
    double wsum = 0.0;
    for (std::size_t i = 0; i < views.size(); ++i) {
        double w = 1.0 / p(i);
        g.noalias() += w * (views[i] * f_embed[i]);
        wsum += w;
    }
    return (g / wsum).cwiseMax(0.0);
}

inline Mat update_h(const FusionState &st) {
    return update_h(st.fused_views(), st.f_embed, st.p);
}

// p_i proportional to the per-view residual norm (the constrained optimum);
// zero residuals are floored before normalizing
inline Vec update_p(const std::vector<Mat> &views, const Mat &h,
                    const std::vector<Mat> &f_embed) {
    Vec r(views.size());
    for (std::size_t i = 0; i < views.size(); ++i)
        r(i) = std::max((views[i] - h * f_embed[i].transpose()).norm(), 1e-12);
    return r / r.sum();
}

inline Vec update_p(const FusionState &st) {
    return update_p(st.fused_views(), st.h, st.f_embed);
}

// t_max rounds of (F per view, H, p) on fixed fused views. Returns the
// embedding objective trace: entry 0 before any round, one entry per round.
inline std::vector<double> inner_loop(FusionState &st, int t_max,
                                      bool *rank_warning = nullptr) {
    std::vector<Mat> views = st.fused_views();
    std::vector<double> trace;
    trace.reserve(t_max + 1);
    trace.push_back(embedding_objective(views, st.h, st.f_embed, st.p));
    for (int t = 0; t < t_max; ++t) {
        for (int i = 0; i < st.n_views(); ++i) {
            FUpdate up = update_f(views[i], st.h);
            if (up.rank_deficient && rank_warning)
                *rank_warning = true;
            st.f_embed[i] = std::move(up.f);
        }
        st.h = update_h(views, st.f_embed, st.p);
        st.p = update_p(views, st.h, st.f_embed);
        trace.push_back(embedding_objective(views, st.h, st.f_embed, st.p));
    }
    return trace;
}

// ------------------------------------------------------------------
// initialization and the outer loop
// ------------------------------------------------------------------

inline FusionState initialize(const MultiViewDataset &ds,
                              const std::vector<AnchorStructure> &structures,
                              const FusionConfig &cfg) {
    const int v = ds.v;
    const int n = ds.n;
    FusionState st;
    st.rng_seed = cfg.seed;
    st.s_tilde.resize(v);
    st.s_bar.resize(v);
    st.f_embed.resize(v);
    int min_m = structures[0].s_tilde.rows() ? static_cast<int>(structures[0].s_tilde.rows()) : 0;
    for (int i = 0; i < v; ++i)
        min_m = std::min(min_m, static_cast<int>(structures[i].s_tilde.rows()));
    if (cfg.k > min_m)
        throw ConfigError("k = " + std::to_string(cfg.k) +
                          " exceeds the smallest anchor count m = " + std::to_string(min_m));
    st.p = Vec::Constant(v, 1.0 / v);
    Rng rng(derive_seed(cfg.seed, 0xA5, 0));
    st.h = Mat(n, cfg.k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < cfg.k; ++j)
            st.h(i, j) = rng.uniform();
    for (int i = 0; i < v; ++i) {
        const int m = static_cast<int>(structures[i].s_tilde.rows());
        st.s_tilde[i] = structures[i].s_tilde;
        st.s_bar[i] = Mat::Constant(n, m, 1.0 / n);
        Mat fused = st.s_bar[i] * st.s_tilde[i];
        Eigen::SelfAdjointEigenSolver<Mat> eig(fused.transpose() * fused);
        // eigenvalues ascending; take the top k, largest first
        Mat f(m, cfg.k);
        for (int j = 0; j < cfg.k; ++j)
            f.col(j) = eig.eigenvectors().col(m - 1 - j);
        st.f_embed[i] = std::move(f);
    }
    return st;
}

inline std::vector<int> labels_from_h(const Mat &h) {
    std::vector<int> labels(h.rows());
    for (long i = 0; i < h.rows(); ++i) {
        int arg = 0;
        for (long j = 1; j < h.cols(); ++j)
            if (h(i, j) > h(i, arg)) // ties keep the smaller index
                arg = static_cast<int>(j);
        labels[i] = arg;
    }
    return labels;
}

struct PhaseTimings {
    double init_seconds = 0.0;
    double s_bar_seconds = 0.0;
    double inner_seconds = 0.0;
    double total_seconds = 0.0;
};

struct FusionResult {
    FusionState state;
    std::vector<int> labels;
    std::vector<int> anchor_counts; // m_i per view
    bool converged = false;
    int outer_iterations = 0; // outer rounds executed
    PhaseTimings timings;
    std::vector<std::string> warnings;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
inline void for_each_view(int v, int threads, Fn &&fn) {
    if (threads <= 1 || v <= 1) {
        for (int i = 0; i < v; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    int nt = std::min(threads, v);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < v; i = next.fetch_add(1))
                fn(i);
        });
    for (auto &th : pool)
        th.join();
}

} // namespace detail

// Full pipeline: structure per view, initialization, then outer rounds of
// (attribute QP step, inner embedding loop) until the relative change of
// the full objective drops below outer_tol.
inline FusionResult run(const MultiViewDataset &ds, const FusionConfig &cfg) {
    cfg.validate();
    ds.validate();
    if (ds.v < 1)
        throw ConfigError("dataset has no views");
    auto t_start = std::chrono::steady_clock::now();
    FusionResult res;

    std::vector<AnchorStructure> structures(ds.v);
    for (int i = 0; i < ds.v; ++i) {
        SccDecomposition d = scc_spectral(ds.graphs[i]);
        if (cfg.ablation == Ablation::random_anchors) {
            Rng arng(derive_seed(cfg.seed, 0xA5, static_cast<std::uint64_t>(i) + 1));
            structures[i] = build_structural_similarity(
                ds.graphs[i], d, select_random_anchors(d, cfg.theta, ds.n, arng));
        } else {
            structures[i] = build_structural_similarity(ds.graphs[i], d, cfg.theta);
            if (cfg.ablation == Ablation::no_structure)
                structures[i].s_tilde =
                    Mat::Identity(structures[i].s_tilde.rows(), structures[i].s_tilde.cols());
        }
        res.anchor_counts.push_back(static_cast<int>(structures[i].anchors.size()));
    }

    FusionState st = initialize(ds, structures, cfg);
    std::vector<Mat> x_bars(ds.v);
    for (int i = 0; i < ds.v; ++i) {
        const auto &anchors = structures[i].anchors;
        Mat xb(ds.attributes[i].rows(), anchors.size());
        for (std::size_t a = 0; a < anchors.size(); ++a)
            xb.col(a) = ds.attributes[i].col(anchors[a]);
        x_bars[i] = std::move(xb);
    }
    res.timings.init_seconds = detail::seconds_since(t_start);

    std::atomic<bool> qp_warn{false};
    bool rank_warn = false;
    double prev = 0.0;
    bool have_prev = false;
    for (int outer = 0; outer < cfg.outer_max; ++outer) {
        auto t_sbar = std::chrono::steady_clock::now();
        std::vector<double> qp_vals(ds.v, 0.0);
        detail::for_each_view(ds.v, cfg.threads, [&](int i) {
            QpSubproblem q = assemble_qp(ds.attributes[i], x_bars[i], st.s_tilde[i],
                                         st.f_embed[i], st.h, st.p(i), cfg.alpha);
            SBarUpdate up = update_s_bar(q, cfg.qp_tol, cfg.qp_max_iter);
            if (!up.converged)
                qp_warn = true;
            st.s_bar[i] = std::move(up.s_bar);
            qp_vals[i] = up.qp_objective;
        });
        double qp_total = 0.0;
        for (double x : qp_vals)
            qp_total += x;
        st.qp_objective_trace.push_back(qp_total);
        res.timings.s_bar_seconds += detail::seconds_since(t_sbar);

        auto t_inner = std::chrono::steady_clock::now();
        inner_loop(st, cfg.t_max, &rank_warn);
        res.timings.inner_seconds += detail::seconds_since(t_inner);

        double obj = full_objective(ds.attributes, x_bars, st, cfg.alpha);
        st.objective_trace.push_back(obj);
        res.outer_iterations = outer + 1;
        if (have_prev &&
            std::abs(prev - obj) / std::max(std::abs(prev), 1e-30) < cfg.outer_tol) {
            res.converged = true;
            break;
        }
        prev = obj;
        have_prev = true;
    }

    res.labels = labels_from_h(st.h);
    std::vector<int> counts(cfg.k, 0);
    for (int l : res.labels)
        ++counts[l];
    for (int c = 0; c < cfg.k; ++c)
        if (counts[c] == 0) {
            res.warnings.push_back("EmptyCluster: cluster " + std::to_string(c) +
                                   " received no nodes");
            break;
        }
    for (std::size_t t = 1; t < st.objective_trace.size(); ++t)
        if (st.objective_trace[t] >
            st.objective_trace[t - 1] * (1.0 + 1e-9) + 1e-12) {
            res.warnings.push_back("ObjectiveIncrease: outer round " + std::to_string(t) +
                                   " raised the full objective");
            break;
        }
    if (qp_warn)
        res.warnings.push_back("NoConvergence: some attribute QP column hit the iteration cap");
    if (rank_warn)
        res.warnings.push_back("RankDeficiency: a Procrustes step had a near-zero singular value");
    res.state = std::move(st);
    res.timings.total_seconds = detail::seconds_since(t_start);
    return res;
}

} // namespace aas
