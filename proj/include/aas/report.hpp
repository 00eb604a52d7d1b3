#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fusion.hpp"
#include "metrics.hpp"

namespace aas {

inline nlohmann::json config_json(const FusionConfig &cfg) {
    return {{"alpha", cfg.alpha},       {"theta", cfg.theta},
            {"k", cfg.k},               {"t_max", cfg.t_max},
            {"outer_max", cfg.outer_max}, {"outer_tol", cfg.outer_tol},
            {"seed", cfg.seed},         {"ablation", to_string(cfg.ablation)}};
}

inline nlohmann::json run_report_json(const FusionResult &res, const FusionConfig &cfg,
                                      const EvaluationReport *metrics = nullptr) {
    nlohmann::json j;
    j["config"] = config_json(cfg);
    j["objective_trace"] = res.state.objective_trace;
    j["qp_objective_trace"] = res.state.qp_objective_trace;
    j["anchor_counts"] = res.anchor_counts;
    j["final_p"] = std::vector<double>(res.state.p.data(),
                                       res.state.p.data() + res.state.p.size());
    j["labels"] = res.labels;
    j["converged"] = res.converged;
    j["outer_iterations"] = res.outer_iterations;
    j["warnings"] = res.warnings;
    j["timings"] = {{"init_seconds", res.timings.init_seconds},
                    {"s_bar_seconds", res.timings.s_bar_seconds},
                    {"inner_seconds", res.timings.inner_seconds},
                    {"total_seconds", res.timings.total_seconds}};
    if (metrics)
        j["metrics"] = {{"acc", metrics->acc},
                        {"nmi", metrics->nmi},
                        {"purity", metrics->purity},
                        {"nmi_normalization", metrics->nmi_normalization}};
    return j;
}

inline void write_json(const std::string &path, const nlohmann::json &j) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

inline void write_csv_trace(const std::string &path, const std::vector<double> &trace,
                            const std::string &header) {
    std::ofstream out(path);
    out << "iteration," << header << '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", trace[i]);
        out << (i + 1) << ',' << buf << '\n';
    }
}

inline void write_csv_matrix(const std::string &path, const Mat &m) {
    std::ofstream out(path);
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
}

struct AggregateStats {
    double mean = 0.0;
    double stddev = 0.0;
};

inline AggregateStats aggregate(const std::vector<double> &xs) {
    AggregateStats s;
    if (xs.empty())
        return s;
    for (double x : xs)
        s.mean += x;
    s.mean /= xs.size();
    for (double x : xs)
        s.stddev += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(s.stddev / xs.size());
    return s;
}

inline std::string format_mean_std(const AggregateStats &s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f(%.2f)", s.mean, s.stddev);
    return buf;
}

// mean(std) markdown table over repeated runs
inline std::string aggregate_table(const std::string &method,
                                   const std::vector<double> &acc,
                                   const std::vector<double> &nmi,
                                   const std::vector<double> &pur) {
    std::string t;
    t += "| Method | ACC | NMI | Purity |\n";
    t += "|---|---|---|---|\n";
    t += "| " + method + " | " + format_mean_std(aggregate(acc)) + " | " +
         format_mean_std(aggregate(nmi)) + " | " + format_mean_std(aggregate(pur)) +
         " |\n";
    return t;
}

} // namespace aas
