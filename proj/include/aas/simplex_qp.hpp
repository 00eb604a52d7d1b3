#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/LU>

#include "common.hpp"
#include "rng.hpp"

namespace aas {

// Euclidean projection onto { x >= 0, sum x = 1 } (Held et al. threshold).
inline Vec project_simplex(const Vec &v) {
    const int m = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + m);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    int rho = -1;
    for (int i = 0; i < m; ++i) {
        css += u[i];
        double t = (css - 1.0) / (i + 1);
        if (u[i] - t > 0.0) {
            rho = i;
            tau = t;
        }
    }
    (void)rho;
    return (v.array() - tau).cwiseMax(0.0);
}

// Column-wise in-place variant used by the batched solver.
inline void project_simplex_cols(Mat &V, std::vector<double> &scratch) {
    const int m = static_cast<int>(V.rows());
    scratch.resize(m);
    for (int j = 0; j < V.cols(); ++j) {
        for (int i = 0; i < m; ++i)
            scratch[i] = V(i, j);
        std::sort(scratch.begin(), scratch.end(), std::greater<double>());
        double css = 0.0, tau = 0.0;
        for (int i = 0; i < m; ++i) {
            css += scratch[i];
            double t = (css - 1.0) / (i + 1);
            if (scratch[i] - t > 0.0)
                tau = t;
        }
        V.col(j) = (V.col(j).array() - tau).cwiseMax(0.0);
    }
}

struct QpSubproblem {
    Mat A_hess; // m x m SPD
    Mat f_lin;  // m x n, one column per node
    double alpha = 0.0;
};

// A = 2 Xbar^T Xbar + 2 alpha I + (2/p) S~ S~^T,   f = -2 Xbar^T X - (2/p) S~ F H^T
inline QpSubproblem assemble_qp(const Mat &x, const Mat &x_bar, const Mat &s_tilde,
                                const Mat &f_embed, const Mat &h, double p, double alpha) {
    const long d = x.rows(), n = x.cols(), m = x_bar.cols();
    if (x_bar.rows() != d || s_tilde.rows() != m || s_tilde.cols() != m ||
        f_embed.rows() != m || h.rows() != n || h.cols() != f_embed.cols())
        throw DimensionMismatch("assemble_qp: inconsistent shapes");
    if (!(p > 0.0))
        throw DimensionMismatch("assemble_qp: p must be positive");
    const double w = 2.0 / p;
    QpSubproblem q;
    q.alpha = alpha;
    q.A_hess = 2.0 * x_bar.transpose() * x_bar + w * s_tilde * s_tilde.transpose();
    q.A_hess.diagonal().array() += 2.0 * alpha;
    q.A_hess = ((q.A_hess + q.A_hess.transpose()) / 2.0).eval();
    q.f_lin = (-2.0 * x_bar.transpose() * x) - w * s_tilde * f_embed * h.transpose();
    return q;
}

struct QpSolution {
    Mat s;                  // m x n, columns on the simplex
    double lipschitz = 0.0; // largest eigenvalue estimate of A
    std::vector<int> iterations;
    bool converged = true; // false when some column hit the iteration cap
};

// Accelerated projected gradient over all columns at once, with per-column
// gradient restart and freezing of converged columns.
inline QpSolution solve_simplex_qp_batch(const Mat &A, const Mat &F,
                                         double tol = 1e-10, int max_iter = 5000) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(F.cols());
    QpSolution sol;
    // Power iteration for the step size. The start vector is hashed per index:
    // a uniform start can sit exactly in a minor eigenspace of structured
    // Hessians (e.g. symmetric anchors), which silently underestimates L.
    Vec pv(m);
    for (int i = 0; i < m; ++i)
        pv(i) = 0.5 + static_cast<double>(mix64(static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53;
    pv /= pv.norm();
    for (int it = 0; it < 100; ++it) {
        Vec w = A * pv;
        double nw = w.norm();
        if (nw == 0.0)
            break;
        pv = w / nw;
    }
    sol.lipschitz = pv.dot(A * pv);
    const double step = 1.0 / std::max(sol.lipschitz, 1e-30);

    Mat X = Mat::Constant(m, n, 1.0 / m);
    Mat Y = X;
    Vec t = Vec::Ones(n);
    std::vector<char> active(n, 1);
    sol.iterations.assign(n, 0);
    int n_active = n;
    std::vector<double> scratch;
    Mat G(m, n), Xn(m, n);
    for (int it = 0; it < max_iter && n_active > 0; ++it) {
        G.noalias() = A * Y;
        G += F;
        Xn = Y - step * G;
        project_simplex_cols(Xn, scratch);
        for (int j = 0; j < n; ++j) {
            if (!active[j])
                continue;
            double dx = (Xn.col(j) - X.col(j)).cwiseAbs().maxCoeff();
            bool restart = (Y.col(j) - Xn.col(j)).dot(Xn.col(j) - X.col(j)) > 0.0;
            double tn = restart ? 1.0 : (1.0 + std::sqrt(1.0 + 4.0 * t(j) * t(j))) / 2.0;
            double beta = restart ? 0.0 : (t(j) - 1.0) / tn;
            Y.col(j) = Xn.col(j) + beta * (Xn.col(j) - X.col(j));
            X.col(j) = Xn.col(j);
            t(j) = tn;
            ++sol.iterations[j];
            if (dx < tol) {
                active[j] = 0;
                --n_active;
            }
        }
    }
    sol.converged = (n_active == 0);
    sol.s = std::move(X);
    return sol;
}

inline Vec solve_simplex_qp(const QpSubproblem &q, int node,
                            double tol = 1e-10, int max_iter = 5000) {
    return solve_simplex_qp_batch(q.A_hess, q.f_lin.col(node), tol, max_iter).s.col(0);
}

// max of dual feasibility and complementary slackness violations with the
// multiplier lambda = s^T (A s + f)
inline double kkt_residual(const Mat &A, const Vec &f, const Vec &s) {
    Vec g = A * s + f;
    double lam = s.dot(g);
    Vec r = g.array() - lam;
    double dual = (-r).cwiseMax(0.0).maxCoeff();
    double comp = (s.cwiseProduct(r)).cwiseAbs().maxCoeff();
    return std::max(dual, comp);
}

// Exhaustive reference solver: solve the equality-constrained system on
// every support set, keep the feasible minimum. Exponential in m.
inline Vec solve_simplex_qp_active_set(const Mat &A, const Vec &f) {
    const int m = static_cast<int>(f.size());
    Vec best;
    double bestval = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> S;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i))
                S.push_back(i);
        const int r = static_cast<int>(S.size());
        Mat M = Mat::Zero(r + 1, r + 1);
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b)
                M(a, b) = A(S[a], S[b]);
        for (int a = 0; a < r; ++a) {
            M(a, r) = -1.0;
            M(r, a) = 1.0;
        }
        Vec rhs(r + 1);
        for (int a = 0; a < r; ++a)
            rhs(a) = -f(S[a]);
        rhs(r) = 1.0;
        Eigen::FullPivLU<Mat> lu(M);
        if (!lu.isInvertible())
            continue;
        Vec sol = lu.solve(rhs);
        bool feasible = true;
        for (int a = 0; a < r; ++a)
            if (sol(a) < -1e-12)
                feasible = false;
        if (!feasible)
            continue;
        Vec s = Vec::Zero(m);
        for (int a = 0; a < r; ++a)
            s(S[a]) = std::max(sol(a), 0.0);
        double val = 0.5 * s.dot(A * s) + f.dot(s);
        if (val < bestval) {
            bestval = val;
            best = s;
        }
    }
    return best;
}

struct SBarUpdate {
    Mat s_bar; // n x m, rows on the simplex
    double qp_objective = 0.0;
    double lipschitz = 0.0;
    int max_iterations = 0;
    bool converged = true;
};

// Solve the n per-node problems of one view; also reports the total QP
// objective sum_j 1/2 s_j^T A s_j + f_j^T s_j (the traced subproblem value).
inline SBarUpdate update_s_bar(const QpSubproblem &q, double tol = 1e-10,
                               int max_iter = 5000) {
    QpSolution sol = solve_simplex_qp_batch(q.A_hess, q.f_lin, tol, max_iter);
    SBarUpdate up;
    up.qp_objective = 0.5 * (sol.s.cwiseProduct(q.A_hess * sol.s)).sum() +
                      q.f_lin.cwiseProduct(sol.s).sum();
    up.lipschitz = sol.lipschitz;
    up.max_iterations = *std::max_element(sol.iterations.begin(), sol.iterations.end());
    up.converged = sol.converged;
    up.s_bar = sol.s.transpose();
    return up;
}

} // namespace aas
