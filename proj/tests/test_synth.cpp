#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <aas/synth.hpp>

using namespace aas;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string &name) {
    fs::path p = fs::temp_directory_path() / ("aas_synth_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void spit(const fs::path &p, const std::string &s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

bool same_graph(const DirectedGraph &a, const DirectedGraph &b) {
    return a.n() == b.n() && a.adjacency_lists() == b.adjacency_lists();
}

} // namespace

TEST_CASE("rng streams") {
    // reference values from the published splitmix64 / mt19937_64 algorithms
    REQUIRE(mix64(0) == 16294208416658607535ULL);
    REQUIRE(derive_seed(0, 0, 0) == 12103184956288865414ULL);
    REQUIRE(derive_seed(12345, 7, 3) == 16468210076393285790ULL);

    Rng r(5489);
    double u = r.uniform();
    REQUIRE(u == (14514284786278117030ULL >> 11) * 0x1.0p-53);
    REQUIRE(r.engine()() == 4620546740167642908ULL);
    REQUIRE(r.engine()() == 13109570281517897720ULL);

    Rng r2(5489);
    REQUIRE(r2.below(6) == 4); // first raw draw is below the rejection limit
    Rng r3(5489);
    REQUIRE(r3.normal() == Catch::Approx(-0.0020899072880718881813).epsilon(1e-12));
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t x = r3.below(17);
        REQUIRE(x < 17);
    }
}

TEST_CASE("preset specs") {
    SbmSpec s = sbm50_spec(3);
    std::vector<int> sizes = {10, 15, 12, 13};
    REQUIRE(s.cluster_sizes == sizes);
    REQUIRE(s.n() == 50);
    REQUIRE(s.v() == 3);
    REQUIRE(s.views[0].intra == 0.20);
    REQUIRE(s.views[0].inter == 0.01);
    REQUIRE(s.views[1].intra == 0.20);
    REQUIRE(s.views[1].inter == 0.03);
    REQUIRE(s.views[2].intra == 0.25);
    REQUIRE(s.views[2].inter == 0.03);
    std::vector<int> dims = {2, 2, 2};
    REQUIRE(s.attr_dim == dims);
    REQUIRE(s.mean_scale * s.mean_scale == Catch::Approx(2.0).margin(1e-15));
    REQUIRE(s.cov_diag == 1.25);
    REQUIRE(s.seed == 3);

    SbmSpec big = sbm5000_spec(0);
    std::vector<int> bigsizes = {1000, 1500, 1200, 1300};
    REQUIRE(big.cluster_sizes == bigsizes);
    REQUIRE(big.n() == 5000);

    SbmSpec bad = s;
    bad.views[0].intra = 1.5;
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    bad = s;
    bad.attr_dim = {2};
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("generation") {
    SECTION("labels come in consecutive blocks") {
        MultiViewDataset ds = generate(sbm50_spec(1));
        REQUIRE(ds.labels.has_value());
        const auto &z = *ds.labels;
        REQUIRE(static_cast<int>(z.size()) == 50);
        for (int i = 0; i < 50; ++i) {
            int expect = i < 10 ? 0 : i < 25 ? 1 : i < 37 ? 2 : 3;
            REQUIRE(z[i] == expect);
        }
    }
    SECTION("no self loops") {
        MultiViewDataset ds = generate(sbm50_spec(2));
        for (const auto &g : ds.graphs)
            for (int i = 0; i < g.n(); ++i)
                REQUIRE_FALSE(g.has_edge(i, i));
    }
    SECTION("probability extremes give complete blocks and nothing else") {
        SbmSpec s;
        s.cluster_sizes = {6, 8};
        s.views = {{1.0, 0.0}};
        s.attr_dim = {1};
        s.seed = 4;
        MultiViewDataset ds = generate(s);
        const auto &z = *ds.labels;
        for (int a = 0; a < 14; ++a)
            for (int b = 0; b < 14; ++b) {
                if (a == b)
                    continue;
                REQUIRE(ds.graphs[0].has_edge(a, b) == (z[a] == z[b]));
            }
    }
    SECTION("same seed reproduces the dataset exactly") {
        MultiViewDataset a = generate(sbm50_spec(77));
        MultiViewDataset b = generate(sbm50_spec(77));
        for (int i = 0; i < a.v; ++i) {
            REQUIRE(same_graph(a.graphs[i], b.graphs[i]));
            REQUIRE((a.attributes[i] - b.attributes[i]).cwiseAbs().maxCoeff() == 0.0);
        }
        REQUIRE(*a.labels == *b.labels);
    }
    SECTION("different seeds give different draws") {
        std::set<std::string> seen;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            MultiViewDataset ds = generate(sbm50_spec(seed));
            std::string key;
            for (int j = 0; j < 4; ++j)
                key += detail::fmt_double(ds.attributes[0](0, j)) + ",";
            key += std::to_string(ds.graphs[0].edge_count());
            seen.insert(key);
        }
        REQUIRE(seen.size() == 10);
    }
    SECTION("edge densities match the model within three sigma") {
        long intra = 0, inter = 0;
        for (std::uint64_t seed = 100; seed < 130; ++seed) {
            SbmSpec s;
            s.cluster_sizes = {25, 25};
            s.views = {{0.2, 0.05}};
            s.attr_dim = {1};
            s.seed = seed;
            MultiViewDataset ds = generate(s);
            const auto &z = *ds.labels;
            for (int u = 0; u < 50; ++u)
                for (int w : ds.graphs[0].out(u))
                    (z[u] == z[w] ? intra : inter) += 1;
        }
        // 30 seeds x 1200 intra pairs at p=.2; 30 x 1250 inter pairs at p=.05
        REQUIRE(std::abs(intra - 7200.0) <= 228.0);
        REQUIRE(std::abs(inter - 1875.0) <= 127.0);
    }
    SECTION("attribute matrices have the declared shapes") {
        SbmSpec s = sbm50_spec(5);
        s.attr_dim = {2, 3, 4};
        MultiViewDataset ds = generate(s);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(ds.attributes[i].rows() == s.attr_dim[i]);
            REQUIRE(ds.attributes[i].cols() == 50);
        }
    }
}

TEST_CASE("dataset directory round trip") {
    MultiViewDataset ds = generate(sbm50_spec(123));
    fs::path dir = fresh_dir("roundtrip");
    save_dataset(ds, dir.string());

    SECTION("expected files exist") {
        REQUIRE(fs::exists(dir / "manifest.json"));
        for (int i = 0; i < 3; ++i) {
            REQUIRE(fs::exists(dir / ("view" + std::to_string(i) + ".edges")));
            REQUIRE(fs::exists(dir / ("view" + std::to_string(i) + ".attrs.csv")));
        }
        REQUIRE(fs::exists(dir / "labels.csv"));
    }
    SECTION("loading restores every bit") {
        MultiViewDataset back = load_dataset(dir.string());
        REQUIRE(back.n == ds.n);
        REQUIRE(back.v == ds.v);
        REQUIRE(*back.labels == *ds.labels);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(same_graph(back.graphs[i], ds.graphs[i]));
            REQUIRE((back.attributes[i] - ds.attributes[i]).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SECTION("saving the loaded dataset reproduces the files byte for byte") {
        MultiViewDataset back = load_dataset(dir.string());
        fs::path dir2 = fresh_dir("roundtrip2");
        save_dataset(back, dir2.string());
        for (const auto &entry : fs::directory_iterator(dir)) {
            fs::path name = entry.path().filename();
            INFO(name.string());
            REQUIRE(slurp(dir2 / name) == slurp(entry.path()));
        }
    }
}

TEST_CASE("dataset directory error reporting") {
    MultiViewDataset ds = generate(sbm50_spec(321));

    SECTION("bad attribute cell carries file and line") {
        fs::path dir = fresh_dir("badcell");
        save_dataset(ds, dir.string());
        fs::path apath = dir / "view0.attrs.csv";
        std::string text = slurp(apath);
        std::size_t first_nl = text.find('\n');
        std::size_t second_nl = text.find('\n', first_nl + 1);
        text.replace(first_nl + 1, second_nl - first_nl - 1, "oops,1.0");
        spit(apath, text);
        try {
            load_dataset(dir.string());
            FAIL("expected FormatError");
        } catch (const FormatError &e) {
            REQUIRE(e.file == apath.string());
            REQUIRE(e.line == 2);
        }
    }
    SECTION("ragged attribute rows are rejected") {
        fs::path dir = fresh_dir("ragged");
        save_dataset(ds, dir.string());
        fs::path apath = dir / "view1.attrs.csv";
        std::string text = slurp(apath);
        text.insert(text.find('\n'), ",3.5");
        spit(apath, text);
        try {
            load_dataset(dir.string());
            FAIL("expected FormatError");
        } catch (const FormatError &e) {
            REQUIRE(e.file == apath.string());
            REQUIRE(e.line == 2); // row 2 no longer matches row 1's width
        }
    }
    SECTION("wrong attribute row count is inconsistent") {
        fs::path dir = fresh_dir("shortattrs");
        save_dataset(ds, dir.string());
        fs::path apath = dir / "view0.attrs.csv";
        std::string text = slurp(apath);
        text.erase(text.rfind('\n', text.size() - 2) + 1);
        spit(apath, text);
        REQUIRE_THROWS_AS(load_dataset(dir.string()), InconsistentN);
    }
    SECTION("wrong label count is inconsistent") {
        fs::path dir = fresh_dir("shortlabels");
        save_dataset(ds, dir.string());
        spit(dir / "labels.csv", "0\n1\n2\n");
        REQUIRE_THROWS_AS(load_dataset(dir.string()), InconsistentN);
    }
    SECTION("broken manifest json carries the manifest path") {
        fs::path dir = fresh_dir("badjson");
        save_dataset(ds, dir.string());
        spit(dir / "manifest.json", "{\n  \"n\": 50,\n  !!\n}\n");
        try {
            load_dataset(dir.string());
            FAIL("expected FormatError");
        } catch (const FormatError &e) {
            REQUIRE(e.file == (dir / "manifest.json").string());
            REQUIRE(e.line == 3);
        }
    }
    SECTION("view count mismatch is rejected") {
        fs::path dir = fresh_dir("viewcount");
        save_dataset(ds, dir.string());
        std::string text = slurp(dir / "manifest.json");
        nlohmann::json m = nlohmann::json::parse(text);
        m["views"].erase(2);
        spit(dir / "manifest.json", m.dump(2));
        REQUIRE_THROWS_AS(load_dataset(dir.string()), FormatError);
    }
    SECTION("missing directory cannot be opened") {
        REQUIRE_THROWS_AS(load_dataset((fs::temp_directory_path() / "aas_no_such_dir").string()),
                          FormatError);
    }
}

TEST_CASE("attribute-less views load as constant ones") {
    fs::path dir = fresh_dir("noattrs");
    spit(dir / "view0.edges", "0\t1\n1\t2\n2\t3\n3\t4\n4\t0\n");
    spit(dir / "view1.edges", "# empty view\n");
    spit(dir / "view2.edges", "1\t0\n");
    spit(dir / "manifest.json",
         "{\"n\": 5, \"v\": 3, \"views\": ["
         "{\"edges\": \"view0.edges\"},"
         "{\"edges\": \"view1.edges\"},"
         "{\"edges\": \"view2.edges\"}]}");
    MultiViewDataset ds = load_dataset(dir.string());
    REQUIRE(ds.n == 5);
    REQUIRE(ds.v == 3);
    REQUIRE_FALSE(ds.labels.has_value());
    for (int i = 0; i < 3; ++i) {
        REQUIRE(ds.attributes[i].rows() == 1);
        REQUIRE(ds.attributes[i].cols() == 5);
        REQUIRE((ds.attributes[i].array() - 1.0).abs().maxCoeff() == 0.0);
    }
    REQUIRE(ds.graphs[0].edge_count() == 5);
    REQUIRE(ds.graphs[1].edge_count() == 0);
    REQUIRE(ds.graphs[2].has_edge(1, 0));
}

TEST_CASE("spec json mirror") {
    nlohmann::json j = {
        {"cluster_sizes", {4, 5}},
        {"views", {{{"intra", 0.5}, {"inter", 0.1}}, {{"intra", 0.4}, {"inter", 0.2}}}},
        {"attr_dim", 3},
        {"mean_scale", 2.0},
        {"cov_diag", 0.5},
        {"seed", 9},
    };
    SbmSpec s = sbm_spec_from_json(j);
    std::vector<int> sizes = {4, 5};
    REQUIRE(s.cluster_sizes == sizes);
    REQUIRE(s.v() == 2);
    std::vector<int> dims = {3, 3}; // scalar attr_dim broadcasts
    REQUIRE(s.attr_dim == dims);
    REQUIRE(s.mean_scale == 2.0);
    REQUIRE(s.cov_diag == 0.5);
    REQUIRE(s.seed == 9);

    nlohmann::json defaults = {
        {"cluster_sizes", {3, 3}},
        {"views", {{{"intra", 0.9}, {"inter", 0.0}}}},
    };
    SbmSpec d = sbm_spec_from_json(defaults);
    std::vector<int> ddims = {2};
    REQUIRE(d.attr_dim == ddims);
    REQUIRE(d.mean_scale == 1.0);
    REQUIRE(d.cov_diag == 1.0);
    REQUIRE(d.seed == 0);

    nlohmann::json missing = {{"views", {{{"intra", 0.5}, {"inter", 0.1}}}}};
    REQUIRE_THROWS(sbm_spec_from_json(missing));
}
