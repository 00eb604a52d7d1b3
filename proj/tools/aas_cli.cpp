#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <aas/aas.hpp>

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string data, preset, spec, out = "out", config;
    double alpha = 0.1, theta = 0.3, outer_tol = 1e-5;
    int k = 4, t_max = 30, outer_max = 50, repeat = 1, restarts = 10;
    std::uint64_t seed = 0;
    std::string ablation = "full";
    std::vector<double> alphas, thetas;
};

int env_threads() {
    const char *s = std::getenv("AAS_THREADS");
    if (!s)
        return 1;
    int t = std::atoi(s);
    return t > 0 ? t : 1;
}

// --config is honored before CLI11 parses, so explicit flags win
std::string config_path_from_argv(int argc, char **argv) {
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc)
            return argv[i + 1];
        if (a.rfind("--config=", 0) == 0)
            return a.substr(9);
    }
    return "";
}

void apply_config(CommonOpts &o, const std::string &path) {
    if (path.empty())
        return;
    std::ifstream in(path);
    if (!in)
        throw aas::ConfigError("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    auto dbl = [&](const char *a, const char *b, double d) {
        return j.value(a, j.value(b, d));
    };
    o.data = j.value("data", o.data);
    o.preset = j.value("preset", o.preset);
    o.spec = j.value("spec", o.spec);
    o.out = j.value("out", o.out);
    o.alpha = j.value("alpha", o.alpha);
    o.theta = j.value("theta", o.theta);
    o.k = j.value("k", o.k);
    o.t_max = static_cast<int>(dbl("t_max", "t-max", o.t_max));
    o.outer_max = static_cast<int>(dbl("outer_max", "outer-max", o.outer_max));
    o.outer_tol = dbl("outer_tol", "outer-tol", o.outer_tol);
    o.repeat = j.value("repeat", o.repeat);
    o.restarts = j.value("restarts", o.restarts);
    o.seed = j.value("seed", o.seed);
    o.ablation = j.value("ablation", o.ablation);
    if (j.contains("alphas"))
        o.alphas = j["alphas"].get<std::vector<double>>();
    if (j.contains("thetas"))
        o.thetas = j["thetas"].get<std::vector<double>>();
}

// dataset source: a fixed directory, or a spec regenerated per run seed
struct DataSource {
    bool fixed = false;
    aas::MultiViewDataset base;
    std::string preset;
    std::optional<nlohmann::json> spec_json;
};

DataSource make_source(const CommonOpts &o) {
    int given = !o.data.empty() + !o.preset.empty() + !o.spec.empty();
    if (given != 1)
        throw aas::ConfigError("pass exactly one of --data, --preset, --spec");
    DataSource src;
    if (!o.data.empty()) {
        src.fixed = true;
        src.base = aas::load_dataset(o.data);
    } else if (!o.preset.empty()) {
        if (o.preset != "sbm50" && o.preset != "sbm5000")
            throw aas::ConfigError("unknown preset: " + o.preset +
                                   " (expected sbm50 or sbm5000)");
        src.preset = o.preset;
    } else {
        std::ifstream in(o.spec);
        if (!in)
            throw aas::ConfigError("cannot open spec file: " + o.spec);
        src.spec_json = nlohmann::json::parse(in);
    }
    return src;
}

aas::SbmSpec spec_for_seed(const DataSource &src, std::uint64_t seed) {
    if (src.spec_json) {
        aas::SbmSpec s = aas::sbm_spec_from_json(*src.spec_json);
        s.seed = seed;
        return s;
    }
    return src.preset == "sbm5000" ? aas::sbm5000_spec(seed) : aas::sbm50_spec(seed);
}

aas::MultiViewDataset dataset_for_run(const DataSource &src, std::uint64_t seed) {
    if (src.fixed)
        return src.base;
    return aas::generate(spec_for_seed(src, seed));
}

aas::FusionConfig fusion_config(const CommonOpts &o, std::uint64_t seed) {
    aas::FusionConfig cfg;
    cfg.alpha = o.alpha;
    cfg.theta = o.theta;
    cfg.k = o.k;
    cfg.t_max = o.t_max;
    cfg.outer_max = o.outer_max;
    cfg.outer_tol = o.outer_tol;
    cfg.seed = seed;
    cfg.ablation = aas::ablation_from_string(o.ablation);
    cfg.threads = env_threads();
    return cfg;
}

void write_run_trace(const fs::path &path, const std::vector<double> &obj,
                     const std::vector<double> &qp) {
    std::ofstream out(path);
    out << "iteration,objective,qp_objective\n";
    for (std::size_t i = 0; i < obj.size(); ++i) {
        char a[40], b[40];
        std::snprintf(a, sizeof(a), "%.17g", obj[i]);
        std::snprintf(b, sizeof(b), "%.17g", i < qp.size() ? qp[i] : 0.0);
        out << (i + 1) << ',' << a << ',' << b << '\n';
    }
}

int cmd_generate(const CommonOpts &o, bool seed_given) {
    aas::SbmSpec spec;
    if (!o.preset.empty() && !o.spec.empty())
        throw aas::ConfigError("pass either --preset or --spec, not both");
    if (!o.preset.empty()) {
        if (o.preset != "sbm50" && o.preset != "sbm5000")
            throw aas::ConfigError("unknown preset: " + o.preset +
                                   " (expected sbm50 or sbm5000)");
        spec = o.preset == "sbm5000" ? aas::sbm5000_spec(o.seed) : aas::sbm50_spec(o.seed);
    } else if (!o.spec.empty()) {
        std::ifstream in(o.spec);
        if (!in)
            throw aas::ConfigError("cannot open spec file: " + o.spec);
        spec = aas::sbm_spec_from_json(nlohmann::json::parse(in));
        if (seed_given)
            spec.seed = o.seed;
    } else {
        throw aas::ConfigError("pass one of --preset, --spec");
    }
    aas::MultiViewDataset ds = aas::generate(spec);
    aas::save_dataset(ds, o.out);
    std::cout << "wrote " << o.out << " (n=" << ds.n << ", v=" << ds.v << ")\n";
    return 0;
}

int cmd_cluster(const CommonOpts &o) {
    DataSource src = make_source(o);
    fs::create_directories(o.out);
    std::vector<double> accs, nmis, purs;
    std::vector<std::string> failures;
    bool any_labels = false;

    for (int i = 0; i < o.repeat; ++i) {
        std::uint64_t run_seed = o.seed + static_cast<std::uint64_t>(i);
        char tag[16];
        std::snprintf(tag, sizeof(tag), "%03d", i);
        try {
            aas::MultiViewDataset ds = dataset_for_run(src, run_seed);
            aas::FusionConfig cfg = fusion_config(o, run_seed);
            aas::FusionResult res = aas::run(ds, cfg);
            std::optional<aas::EvaluationReport> rep;
            if (ds.labels) {
                rep = aas::evaluate(res.labels, *ds.labels);
                any_labels = true;
                accs.push_back(rep->acc);
                nmis.push_back(rep->nmi);
                purs.push_back(rep->purity);
            }
            nlohmann::json j = aas::run_report_json(res, cfg, rep ? &*rep : nullptr);
            j["run"] = i;
            aas::write_json((fs::path(o.out) / ("run_" + std::string(tag) + ".json")).string(), j);
            write_run_trace(fs::path(o.out) / ("run_" + std::string(tag) + "_trace.csv"),
                            res.state.objective_trace, res.state.qp_objective_trace);
            if (i == 0)
                for (int v = 0; v < res.state.n_views(); ++v)
                    aas::write_csv_matrix(
                        (fs::path(o.out) / ("s_tilde_view" + std::to_string(v) + ".csv")).string(),
                        res.state.s_tilde[v]);
            for (const auto &w : res.warnings)
                std::cerr << "run " << tag << ": " << w << '\n';
            std::cout << "run " << tag << ": outers=" << res.outer_iterations
                      << (res.converged ? "" : " (hit outer_max)");
            if (rep) {
                char m[96];
                std::snprintf(m, sizeof(m), " acc=%.4f nmi=%.4f purity=%.4f", rep->acc,
                              rep->nmi, rep->purity);
                std::cout << m;
            }
            std::cout << '\n';
        } catch (const std::exception &e) {
            failures.push_back("run " + std::string(tag) + ": " + e.what());
            std::cerr << failures.back() << '\n';
        }
    }

    std::string method = "AAS";
    if (o.ablation != "full")
        method += " (" + o.ablation + ")";
    std::string table;
    if (any_labels)
        table = aas::aggregate_table(method, accs, nmis, purs);
    else
        table = "no ground-truth labels; metrics unavailable\n";
    if (!failures.empty()) {
        table += "\n## Failures\n";
        for (const auto &f : failures)
            table += "- " + f + "\n";
    }
    std::ofstream(fs::path(o.out) / "aggregate.md") << table;
    std::cout << table;
    return failures.empty() ? 0 : 1;
}

int cmd_sweep(const CommonOpts &o) {
    DataSource src = make_source(o);
    if (src.fixed && !src.base.labels)
        throw aas::ConfigError("sweep needs ground-truth labels");
    fs::create_directories(o.out);
    std::ofstream csv(fs::path(o.out) / "sweep.csv");
    csv << "alpha,theta,acc,nmi,purity\n";
    for (double alpha : o.alphas)
        for (double theta : o.thetas) {
            std::vector<double> accs, nmis, purs;
            for (int i = 0; i < o.repeat; ++i) {
                std::uint64_t run_seed = o.seed + static_cast<std::uint64_t>(i);
                aas::MultiViewDataset ds = dataset_for_run(src, run_seed);
                CommonOpts cell = o;
                cell.alpha = alpha;
                cell.theta = theta;
                aas::FusionResult res = aas::run(ds, fusion_config(cell, run_seed));
                aas::EvaluationReport rep = aas::evaluate(res.labels, *ds.labels);
                accs.push_back(rep.acc);
                nmis.push_back(rep.nmi);
                purs.push_back(rep.purity);
            }
            char row[160];
            std::snprintf(row, sizeof(row), "%g,%g,%.6f,%.6f,%.6f\n", alpha, theta,
                          aas::aggregate(accs).mean, aas::aggregate(nmis).mean,
                          aas::aggregate(purs).mean);
            csv << row;
            std::cout << row;
        }
    std::cout << "wrote " << (fs::path(o.out) / "sweep.csv").string() << '\n';
    return 0;
}

int cmd_baseline(const CommonOpts &o) {
    DataSource src = make_source(o);
    aas::MultiViewDataset ds = dataset_for_run(src, o.seed);
    aas::BaselineResult r = aas::kmeans_baseline(ds, o.k, o.restarts, o.seed);
    fs::create_directories(o.out);
    nlohmann::json j;
    j["k"] = o.k;
    j["restarts"] = o.restarts;
    j["seed"] = o.seed;
    j["best_view"] = r.best_view;
    j["per_view_acc"] = r.per_view_acc;
    j["metrics"] = {{"acc", r.report.acc},
                    {"nmi", r.report.nmi},
                    {"purity", r.report.purity},
                    {"nmi_normalization", r.report.nmi_normalization}};
    j["labels"] = r.labels;
    aas::write_json((fs::path(o.out) / "baseline.json").string(), j);
    char m[128];
    std::snprintf(m, sizeof(m), "kmeans best view %d: acc=%.4f nmi=%.4f purity=%.4f\n",
                  r.best_view, r.report.acc, r.report.nmi, r.report.purity);
    std::cout << m;
    return 0;
}

void add_data_flags(CLI::App *cmd, CommonOpts &o) {
    cmd->add_option("--data", o.data, "dataset directory (manifest.json layout)");
    cmd->add_option("--preset", o.preset, "built-in generator preset (sbm50, sbm5000)");
    cmd->add_option("--spec", o.spec, "generator spec JSON file");
    cmd->add_option("--config", o.config, "JSON config with defaults for any flag");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "root seed");
}

void add_fusion_flags(CLI::App *cmd, CommonOpts &o) {
    cmd->add_option("--alpha", o.alpha, "regularization weight");
    cmd->add_option("--theta", o.theta, "anchor rate in (0,1)");
    cmd->add_option("--k", o.k, "number of clusters");
    cmd->add_option("--t-max", o.t_max, "inner embedding rounds per outer iteration");
    cmd->add_option("--outer-max", o.outer_max, "outer iteration cap");
    cmd->add_option("--outer-tol", o.outer_tol, "relative objective change to stop");
    cmd->add_option("--ablation", o.ablation, "full, no-structure, or random-anchors");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"anchor-based multi-view clustering over attributed digraphs"};
    app.require_subcommand(1);

    CommonOpts gen_o, clu_o, swp_o, bas_o;
    gen_o.out = "dataset";
    try {
        std::string cfg_path = config_path_from_argv(argc, argv);
        apply_config(clu_o, cfg_path);
        apply_config(swp_o, cfg_path);
        apply_config(bas_o, cfg_path);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    CLI::App *gen = app.add_subcommand("generate", "sample a synthetic dataset directory");
    gen->add_option("--preset", gen_o.preset, "built-in generator preset (sbm50, sbm5000)");
    gen->add_option("--spec", gen_o.spec, "generator spec JSON file");
    auto *gen_seed = gen->add_option("--seed", gen_o.seed, "generator seed");
    gen->add_option("--out", gen_o.out, "output directory");

    CLI::App *clu = app.add_subcommand("cluster", "run the fusion pipeline with repeats");
    add_data_flags(clu, clu_o);
    add_fusion_flags(clu, clu_o);
    clu->add_option("--repeat", clu_o.repeat, "number of runs, seeds seed..seed+repeat-1")
        ->check(CLI::PositiveNumber);

    CLI::App *swp = app.add_subcommand("sweep", "alpha x theta grid of repeated runs");
    add_data_flags(swp, swp_o);
    add_fusion_flags(swp, swp_o);
    swp->add_option("--repeat", swp_o.repeat, "runs per grid cell")->check(CLI::PositiveNumber);
    swp->add_option("--alphas", swp_o.alphas, "comma-separated alpha grid")
        ->delimiter(',')
        ->required();
    swp->add_option("--thetas", swp_o.thetas, "comma-separated theta grid")
        ->delimiter(',')
        ->required();

    CLI::App *bas = app.add_subcommand("baseline", "per-view k-means baseline");
    add_data_flags(bas, bas_o);
    bas->add_option("--k", bas_o.k, "number of clusters");
    bas->add_option("--restarts", bas_o.restarts, "k-means restarts per view")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate(gen_o, gen_seed->count() > 0);
        if (clu->parsed())
            return cmd_cluster(clu_o);
        if (swp->parsed())
            return cmd_sweep(swp_o);
        if (bas->parsed())
            return cmd_baseline(bas_o);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
