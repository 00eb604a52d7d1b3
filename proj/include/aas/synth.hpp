#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "dataset.hpp"
#include "rng.hpp"

namespace aas {

// Multi-view directed stochastic block model with Gaussian node attributes.
struct SbmSpec {
    struct ViewProbs {
        double intra = 0.0;
        double inter = 0.0;
    };
    std::vector<int> cluster_sizes;
    std::vector<ViewProbs> views;
    std::vector<int> attr_dim; // per view
    double mean_scale = 1.0;   // std of cluster-mean entries
    double cov_diag = 1.0;     // within-cluster attribute variance
    std::uint64_t seed = 0;

    int n() const {
        int s = 0;
        for (int c : cluster_sizes)
            s += c;
        return s;
    }
    int v() const { return static_cast<int>(views.size()); }

    void validate() const {
        if (cluster_sizes.empty() || views.empty())
            throw ConfigError("sbm spec needs clusters and views");
        for (int c : cluster_sizes)
            if (c < 1)
                throw ConfigError("cluster sizes must be >= 1");
        for (const auto &vp : views)
            if (vp.intra < 0 || vp.intra > 1 || vp.inter < 0 || vp.inter > 1)
                throw ConfigError("edge probabilities must lie in [0,1]");
        if (attr_dim.size() != views.size())
            throw ConfigError("attr_dim must list one dimension per view");
        for (int d : attr_dim)
            if (d < 1)
                throw ConfigError("attribute dimensions must be >= 1");
    }
};

inline SbmSpec sbm50_spec(std::uint64_t seed = 0) {
    SbmSpec s;
    s.cluster_sizes = {10, 15, 12, 13};
    s.views = {{0.20, 0.01}, {0.20, 0.03}, {0.25, 0.03}};
    s.attr_dim = {2, 2, 2};
    s.mean_scale = std::sqrt(2.0);
    s.cov_diag = 1.25;
    s.seed = seed;
    return s;
}

inline SbmSpec sbm5000_spec(std::uint64_t seed = 0) {
    SbmSpec s = sbm50_spec(seed);
    s.cluster_sizes = {1000, 1500, 1200, 1300};
    return s;
}

// Seed streams are derived per (view, purpose) so adding a view leaves the
// draws of earlier views untouched.
inline MultiViewDataset generate(const SbmSpec &spec) {
    spec.validate();
    const int n = spec.n();
    const int K = static_cast<int>(spec.cluster_sizes.size());
    MultiViewDataset ds;
    ds.n = n;
    ds.v = spec.v();
    std::vector<int> z;
    z.reserve(n);
    for (int c = 0; c < K; ++c)
        z.insert(z.end(), spec.cluster_sizes[c], c);
    ds.labels = z;
    for (int i = 0; i < ds.v; ++i) {
        Rng edge_rng(derive_seed(spec.seed, i, 0));
        DirectedGraph g(n);
        const double pin = spec.views[i].intra, pout = spec.views[i].inter;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b)
                    continue;
                double pr = (z[a] == z[b]) ? pin : pout;
                if (edge_rng.uniform() < pr)
                    g.add_edge(a, b);
            }
        g.finalize();
        ds.graphs.push_back(std::move(g));

        const int d = spec.attr_dim[i];
        Rng mean_rng(derive_seed(spec.seed, i, 1));
        Mat mu(d, K);
        for (int c = 0; c < K; ++c)
            for (int j = 0; j < d; ++j)
                mu(j, c) = mean_rng.normal(0.0, spec.mean_scale);
        Rng attr_rng(derive_seed(spec.seed, i, 2));
        const double sd = std::sqrt(spec.cov_diag);
        Mat X(d, n);
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < d; ++r)
                X(r, j) = mu(r, z[j]) + attr_rng.normal(0.0, sd);
        ds.attributes.push_back(std::move(X));
    }
    return ds;
}

// ------------------------------------------------------------------
// dataset directory: manifest.json + viewK.edges + viewK.attrs.csv (+labels)
// ------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline long line_of_byte(const std::string &text, std::size_t byte) {
    long line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n')
            ++line;
    return line;
}

} // namespace detail

inline void save_dataset(const MultiViewDataset &ds, const std::string &dir) {
    ds.validate();
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json manifest;
    manifest["n"] = ds.n;
    manifest["v"] = ds.v;
    manifest["views"] = nlohmann::json::array();
    for (int i = 0; i < ds.v; ++i) {
        std::string base = "view" + std::to_string(i);
        std::ofstream ef(fs::path(dir) / (base + ".edges"));
        save_edge_list(ef, ds.graphs[i]);
        std::ofstream af(fs::path(dir) / (base + ".attrs.csv"));
        const Mat &X = ds.attributes[i];
        for (int j = 0; j < ds.n; ++j) {
            for (long r = 0; r < X.rows(); ++r)
                af << (r ? "," : "") << detail::fmt_double(X(r, j));
            af << '\n';
        }
        manifest["views"].push_back(
            {{"edges", base + ".edges"}, {"attrs", base + ".attrs.csv"}});
    }
    if (ds.labels) {
        std::ofstream lf(fs::path(dir) / "labels.csv");
        for (int l : *ds.labels)
            lf << l << '\n';
        manifest["labels"] = "labels.csv";
    }
    std::ofstream mf(fs::path(dir) / "manifest.json");
    mf << manifest.dump(2) << '\n';
}

inline Mat load_attrs_csv(const std::string &path, int n) {
    std::ifstream in(path);
    if (!in)
        throw FormatError(path, 0, "cannot open file");
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            char *end = nullptr;
            double x = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw FormatError(path, lineno, "bad number: '" + cell + "'");
            row.push_back(x);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw FormatError(path, lineno, "ragged row");
        rows.push_back(std::move(row));
    }
    if (static_cast<int>(rows.size()) != n)
        throw InconsistentN(path + ": " + std::to_string(rows.size()) +
                            " attribute rows, expected n = " + std::to_string(n));
    Mat X(rows.front().size(), n);
    for (int j = 0; j < n; ++j)
        for (std::size_t r = 0; r < rows[j].size(); ++r)
            X(r, j) = rows[j][r];
    return X;
}

inline MultiViewDataset load_dataset(const std::string &dir) {
    namespace fs = std::filesystem;
    const std::string mpath = (fs::path(dir) / "manifest.json").string();
    std::ifstream mf(mpath);
    if (!mf)
        throw FormatError(mpath, 0, "cannot open manifest");
    std::string text((std::istreambuf_iterator<char>(mf)),
                     std::istreambuf_iterator<char>());
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw FormatError(mpath, detail::line_of_byte(text, e.byte), e.what());
    }
    MultiViewDataset ds;
    try {
        ds.n = manifest.at("n").get<int>();
        ds.v = manifest.at("v").get<int>();
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(mpath, 1, std::string("manifest needs integer n and v: ") + e.what());
    }
    if (!manifest.contains("views") || !manifest["views"].is_array() ||
        static_cast<int>(manifest["views"].size()) != ds.v)
        throw FormatError(mpath, 1, "manifest views array must list v entries");
    for (int i = 0; i < ds.v; ++i) {
        const auto &view = manifest["views"][i];
        std::string epath = (fs::path(dir) / view.at("edges").get<std::string>()).string();
        ds.graphs.push_back(load_edge_list_file(epath, ds.n));
        if (view.contains("attrs") && !view["attrs"].is_null() &&
            !view["attrs"].get<std::string>().empty()) {
            std::string apath = (fs::path(dir) / view["attrs"].get<std::string>()).string();
            ds.attributes.push_back(load_attrs_csv(apath, ds.n));
        } else {
            ds.attributes.push_back(Mat::Ones(1, ds.n)); // attribute-less view
        }
    }
    if (manifest.contains("labels") && !manifest["labels"].is_null()) {
        std::string lpath = (fs::path(dir) / manifest["labels"].get<std::string>()).string();
        std::ifstream lf(lpath);
        if (!lf)
            throw FormatError(lpath, 0, "cannot open labels file");
        std::vector<int> labels;
        std::string line;
        long lineno = 0;
        while (std::getline(lf, line)) {
            ++lineno;
            if (line.empty())
                continue;
            char *end = nullptr;
            long l = std::strtol(line.c_str(), &end, 10);
            if (end == line.c_str() || *end != '\0')
                throw FormatError(lpath, lineno, "bad label: '" + line + "'");
            labels.push_back(static_cast<int>(l));
        }
        if (static_cast<int>(labels.size()) != ds.n)
            throw InconsistentN(lpath + ": " + std::to_string(labels.size()) +
                                " labels, expected n = " + std::to_string(ds.n));
        ds.labels = std::move(labels);
    }
    ds.validate();
    return ds;
}

// JSON mirror of SbmSpec (used by the CLI's --spec flag).
inline SbmSpec sbm_spec_from_json(const nlohmann::json &j) {
    SbmSpec s;
    s.cluster_sizes = j.at("cluster_sizes").get<std::vector<int>>();
    for (const auto &view : j.at("views"))
        s.views.push_back({view.at("intra").get<double>(), view.at("inter").get<double>()});
    if (j.contains("attr_dim")) {
        if (j["attr_dim"].is_array())
            s.attr_dim = j["attr_dim"].get<std::vector<int>>();
        else
            s.attr_dim.assign(s.views.size(), j["attr_dim"].get<int>());
    } else {
        s.attr_dim.assign(s.views.size(), 2);
    }
    s.mean_scale = j.value("mean_scale", 1.0);
    s.cov_diag = j.value("cov_diag", 1.0);
    s.seed = j.value("seed", 0ULL);
    s.validate();
    return s;
}

} // namespace aas
