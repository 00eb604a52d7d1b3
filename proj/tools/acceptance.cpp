// Acceptance gate: one line per criterion, exit code = number of failures.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include <aas/aas.hpp>

using namespace aas;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Mat random_mat(int r, int c, Rng &rng) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            m(i, j) = rng.normal();
    return m;
}

Mat random_orthonormal(int m, int k, Rng &rng) {
    Mat g = random_mat(m, k, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    return qr.householderQ() * Mat::Identity(m, k);
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

std::set<std::vector<int>> partition_of(const SccDecomposition &d) {
    std::set<std::vector<int>> parts;
    for (auto comp : d.components) {
        std::sort(comp.begin(), comp.end());
        parts.insert(std::move(comp));
    }
    return parts;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ------------------------------------------------------------------
// 1. SCC oracle equivalence on 1,000 random digraphs, < 60 s total
// ------------------------------------------------------------------
Outcome criterion1() {
    auto t0 = Clock::now();
    Rng rng(20250101);
    int equal = 0;
    const int total = 1000;
    for (int t = 0; t < total; ++t) {
        int n = 2 + static_cast<int>(rng.below(39)); // n <= 40
        double p = 0.05 + 0.25 * rng.uniform();      // edge prob in [0.05, 0.3]
        DirectedGraph g = random_graph(n, p, rng);
        if (partition_of(scc_spectral(g)) == partition_of(scc_tarjan_oracle(g)))
            ++equal;
    }
    double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d/%d partitions equal, %.1fs (budget 60s)", equal,
                  total, secs);
    return {equal == total && secs < 60.0, buf};
}

// ------------------------------------------------------------------
// 2. strong-connectivity characterization, 200/200 agreement
// ------------------------------------------------------------------
Outcome criterion2() {
    Rng rng(20250102);
    int agree = 0;
    const int total = 200;
    for (int t = 0; t < total; ++t) {
        int n = 2 + static_cast<int>(rng.below(29));
        double p = 0.05 + 0.25 * rng.uniform();
        DirectedGraph g(n);
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (u != v && rng.uniform() < p)
                    g.add_edge(u, v);
        for (int u = 0; u < n; ++u) // enforce nonzero out-degrees
            if (g.out_degree(u) == 0) {
                int v = static_cast<int>(rng.below(n - 1));
                g.add_edge(u, v >= u ? v + 1 : v);
            }
        g.finalize();
        bool spectral = is_strongly_connected_spectral(g);
        bool oracle = scc_tarjan_oracle(g).components.size() == 1;
        if (spectral == oracle)
            ++agree;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d/%d agreements", agree, total);
    return {agree == total, buf};
}

// ------------------------------------------------------------------
// 3. QP vs exhaustive active-set oracle, 1e-4 linf and 1e-8 KKT
// ------------------------------------------------------------------
Outcome criterion3() {
    Rng rng(20250103);
    double worst_linf = 0.0, worst_kkt = 0.0;
    for (int t = 0; t < 100; ++t) {
        int m = 1 + static_cast<int>(rng.below(5));
        Mat g = random_mat(m, m, rng);
        double alpha = 0.01 + 0.99 * rng.uniform();
        Mat A = g.transpose() * g + 2.0 * alpha * Mat::Identity(m, m);
        Vec f = random_mat(m, 1, rng) * 3.0;
        QpSubproblem q;
        q.A_hess = A;
        q.f_lin = f;
        Vec s = solve_simplex_qp(q, 0);
        Vec ref = solve_simplex_qp_active_set(A, f);
        worst_linf = std::max(worst_linf, (s - ref).cwiseAbs().maxCoeff());
        worst_kkt = std::max(worst_kkt, kkt_residual(A, f, s));
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "worst linf %.2e (tol 1e-4), worst KKT %.2e (tol 1e-8)",
                  worst_linf, worst_kkt);
    return {worst_linf <= 1e-4 && worst_kkt <= 1e-8, buf};
}

// ------------------------------------------------------------------
// 4. inner-loop recovery of a planted noisy factorization
// ------------------------------------------------------------------
Outcome criterion4() {
    Rng rng(20250104);
    const int n = 60, k = 3, m = 20;
    Mat hstar = Mat::Zero(n, k);
    std::vector<int> planted(n);
    for (int i = 0; i < n; ++i) {
        hstar(i, i / 20) = 1.0;
        planted[i] = i / 20;
    }
    FusionState st;
    st.p = Vec::Constant(2, 0.5);
    for (int i = 0; i < 2; ++i) {
        Mat fstar = random_orthonormal(m, k, rng);
        st.s_bar.push_back(hstar * fstar.transpose() + 0.01 * random_mat(n, m, rng));
        st.s_tilde.push_back(Mat::Identity(m, m));
        st.f_embed.push_back(random_orthonormal(m, k, rng));
    }
    st.h = Mat(n, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j)
            st.h(i, j) = rng.uniform();
    std::vector<double> trace = inner_loop(st, 30);
    bool monotone = true;
    for (std::size_t t = 1; t < trace.size(); ++t)
        if (trace[t] > trace[t - 1] * (1.0 + 1e-9) + 1e-12)
            monotone = false;
    double acc = accuracy(labels_from_h(st.h), planted).value;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "monotone=%s, acc=%.3f (need >= 0.95)",
                  monotone ? "yes" : "no", acc);
    return {monotone && acc >= 0.95, buf};
}

// ------------------------------------------------------------------
// shared replica runs for criteria 5-8
// ------------------------------------------------------------------
struct ReplicaRuns {
    std::vector<double> acc, nmi, pur;
    std::vector<int> outers;
    std::vector<bool> converged;
    double max_seconds = 0.0;
};

ReplicaRuns replica_runs(double alpha, double theta, Ablation ablation) {
    ReplicaRuns rr;
    for (int i = 0; i < 20; ++i) {
        MultiViewDataset ds = generate(sbm50_spec(1000 + i));
        FusionConfig cfg;
        cfg.alpha = alpha;
        cfg.theta = theta;
        cfg.k = 4;
        cfg.seed = 1000 + i;
        cfg.ablation = ablation;
        auto t0 = Clock::now();
        FusionResult res = run(ds, cfg);
        rr.max_seconds = std::max(rr.max_seconds, seconds_since(t0));
        EvaluationReport rep = evaluate(res.labels, *ds.labels);
        rr.acc.push_back(rep.acc);
        rr.nmi.push_back(rep.nmi);
        rr.pur.push_back(rep.purity);
        rr.outers.push_back(res.outer_iterations);
        rr.converged.push_back(res.converged);
    }
    return rr;
}

double mean(const std::vector<double> &xs) {
    double s = 0.0;
    for (double x : xs)
        s += x;
    return s / xs.size();
}

const ReplicaRuns &full_runs() {
    static ReplicaRuns rr = replica_runs(0.1, 0.3, Ablation::full);
    return rr;
}

// 5. SBM_50 replica quality at the reference settings (alpha=0.1, theta=0.3, k=4)
Outcome criterion5() {
    const ReplicaRuns &rr = full_runs();
    double ma = mean(rr.acc), mn = mean(rr.nmi), mp = mean(rr.pur);
    bool ok = ma >= 0.85 && mn >= 0.75 && mp >= 0.85 && rr.max_seconds < 30.0;
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "mean acc=%.3f (>=0.85) nmi=%.3f (>=0.75) purity=%.3f (>=0.85), "
                  "max %.1fs/run (<30s)",
                  ma, mn, mp, rr.max_seconds);
    return {ok, buf};
}

// 6. full AAS vs no-structure ablation within 0.01
Outcome criterion6() {
    double full = mean(full_runs().acc);
    double nostruct = mean(replica_runs(0.1, 0.3, Ablation::no_structure).acc);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "mean acc full=%.3f vs no-structure=%.3f (allow -0.01)",
                  full, nostruct);
    return {full >= nostruct - 0.01, buf};
}

// 7. convergence within 30 outer iterations on every replica run
Outcome criterion7() {
    const ReplicaRuns &rr = full_runs();
    int ok = 0, worst = 0;
    for (std::size_t i = 0; i < rr.outers.size(); ++i) {
        if (rr.converged[i] && rr.outers[i] <= 30)
            ++ok;
        worst = std::max(worst, rr.outers[i]);
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "%d/20 runs converged within 30 outers (max executed %d, cap 50)", ok, worst);
    return {ok == 20, buf};
}

// 8. sweep shape: alpha degradation >= 0.03, theta spread < 0.05
Outcome criterion8() {
    double a01 = mean(full_runs().acc);
    double a10 = mean(replica_runs(10.0, 0.3, Ablation::full).acc);
    double t1 = mean(replica_runs(0.1, 0.1, Ablation::full).acc);
    double t2 = mean(replica_runs(0.1, 0.2, Ablation::full).acc);
    double t3 = a01;
    double tmax = std::max({t1, t2, t3}), tmin = std::min({t1, t2, t3});
    bool alpha_ok = a01 - a10 >= 0.03;
    bool theta_ok = tmax - tmin < 0.05;
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "acc(a=0.1)=%.3f acc(a=10)=%.3f gap=%.3f (>=0.03); "
                  "theta means %.3f/%.3f/%.3f spread=%.3f (<0.05)",
                  a01, a10, a01 - a10, t1, t2, t3, tmax - tmin);
    return {alpha_ok && theta_ok, buf};
}

// ------------------------------------------------------------------
// 9. metrics hand examples and purity >= acc property
// ------------------------------------------------------------------
Outcome criterion9() {
    std::vector<int> truth = {0, 0, 1, 1};
    std::vector<int> pred = {0, 1, 1, 1};
    bool ok = true;
    std::string why;
    if (accuracy(pred, truth).value != 0.75) {
        ok = false;
        why += " acc-case";
    }
    if (purity(pred, truth) != 0.75) {
        ok = false;
        why += " purity-case";
    }
    std::vector<int> z = {0, 0, 1, 1, 2, 2};
    if (std::abs(nmi(z, z) - 1.0) > 1e-12) {
        ok = false;
        why += " nmi-identity";
    }
    std::vector<int> relabeled = {2, 2, 0, 0, 1, 1};
    if (std::abs(nmi(relabeled, z) - 1.0) > 1e-12) {
        ok = false;
        why += " nmi-relabel";
    }
    std::vector<int> flat(6, 0);
    if (nmi(flat, flat) != 1.0 || nmi(flat, z) != 0.0) {
        ok = false;
        why += " nmi-zero-entropy";
    }
    Rng rng(20250109);
    int held = 0;
    const int total = 1000;
    for (int t = 0; t < total; ++t) {
        int n = 4 + static_cast<int>(rng.below(60));
        std::vector<int> a(n), b(n);
        int ka = 2 + static_cast<int>(rng.below(5)), kb = 2 + static_cast<int>(rng.below(5));
        for (int i = 0; i < n; ++i) {
            a[i] = static_cast<int>(rng.below(ka));
            b[i] = static_cast<int>(rng.below(kb));
        }
        if (purity(a, b) >= accuracy(a, b).value - 1e-12)
            ++held;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "hand cases%s, purity>=acc on %d/%d random pairs",
                  why.empty() ? " ok" : why.c_str(), held, total);
    return {ok && held == total, buf};
}

// completion-only large-scale smoke (relaxed budget, run explicitly)
int smoke5000() {
    std::printf("smoke: generating sbm5000...\n");
    auto t0 = Clock::now();
    MultiViewDataset ds = generate(sbm5000_spec(0));
    std::printf("smoke: generated n=%d v=%d in %.1fs\n", ds.n, ds.v, seconds_since(t0));
    FusionConfig cfg;
    cfg.alpha = 0.1;
    cfg.theta = 0.3;
    cfg.k = 4;
    cfg.seed = 0;
    cfg.t_max = 2;
    cfg.outer_max = 1;
    cfg.qp_max_iter = 50; // relaxed: completion only, not solution quality
    FusionResult res = run(ds, cfg);
    EvaluationReport rep = evaluate(res.labels, *ds.labels);
    std::printf("smoke: completed 1 outer in %.1fs (init %.1fs, s_bar %.1fs, inner %.1fs), "
                "acc=%.3f\n",
                res.timings.total_seconds, res.timings.init_seconds,
                res.timings.s_bar_seconds, res.timings.inner_seconds, rep.acc);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--smoke5000") == 0)
            return smoke5000();
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
            only = std::atoi(argv[i + 1]);
    }

    struct Row {
        int id;
        const char *name;
        Outcome (*fn)();
    };
    const Row rows[] = {
        {1, "SCC oracle equivalence", criterion1},
        {2, "strong-connectivity characterization", criterion2},
        {3, "QP vs active-set oracle", criterion3},
        {4, "inner-loop planted recovery", criterion4},
        {5, "SBM_50 replica quality", criterion5},
        {6, "ablation ordering", criterion6},
        {7, "replica convergence within 30 outers", criterion7},
        {8, "sweep shape", criterion8},
        {9, "metrics unit suite", criterion9},
    };

    int failures = 0, ran = 0;
    for (const Row &row : rows) {
        if (only != 0 && row.id != only)
            continue;
        ++ran;
        Outcome out = row.fn();
        std::printf("[%s] %d. %s — %s\n", out.pass ? "PASS" : "FAIL", row.id, row.name,
                    out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass)
            ++failures;
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures;
}
