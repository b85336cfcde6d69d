#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "glt/experiment.hpp"
#include "glt/localtime.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace glt;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_dir(const std::string& tag) {
    const auto d = std::filesystem::temp_directory_path() / ("glt_cli_" + tag);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d.string();
}

} // namespace

TEST_CASE("config parsing is strict") {
    json base = {{"experiment", "simulate"},
                 {"kernel", {{"name", "bm"}}},
                 {"grid", {{"t_end", 1.0}, {"points", 17}}},
                 {"n_paths", 10},
                 {"seed", 1}};
    CHECK_NOTHROW(parse_config(base));

    json unknown = base;
    unknown["grdi"] = 1;  // typo
    CHECK_THROWS_WITH_AS(parse_config(unknown), doctest::Contains("config.grdi"),
                         std::runtime_error);

    json nested = base;
    nested["kernel"]["hurst"] = 0.5;
    CHECK_THROWS_WITH_AS(parse_config(nested), doctest::Contains("kernel.hurst"),
                         std::runtime_error);

    // fbm without H: error names the missing field
    json missing = base;
    missing["kernel"] = {{"name", "fbm"}};
    CHECK_THROWS_WITH_AS(parse_config(missing), doctest::Contains("kernel.H"),
                         std::runtime_error);

    json badexp = base;
    badexp["experiment"] = "simulte";
    CHECK_THROWS_WITH_AS(parse_config(badexp), doctest::Contains("simulte"),
                         std::runtime_error);

    json badweight = base;
    badweight["weighting"] = "dt";
    CHECK_THROWS_AS(parse_config(badweight), std::runtime_error);

    // kernel parser accepts every family
    CHECK(parse_kernel(json{{"name", "mbm"},
                            {"h", {{"type", "linear"}, {"from", 0.55}, {"to", 0.8}}}})
              .name() == "mbm");
    CHECK(parse_kernel(json{{"name", "vgamma"}, {"alpha", 0.5}}).name() == "vgamma");
    CHECK_THROWS_WITH_AS(parse_kernel(json{{"name", "vgamma"}}),
                         doctest::Contains("kernel.alpha"), std::runtime_error);
}

TEST_CASE("reruns are byte-identical and worker-independent") {
    for (const std::string exp :
         {std::string("simulate"), std::string("localtime"), std::string("tanaka-path")}) {
        json cfg = {{"experiment", exp},
                    {"kernel", {{"name", "fbm"}, {"H", 0.7}}},
                    {"grid", {{"t_end", 1.0}, {"points", 129}}},
                    {"n_paths", 300},
                    {"seed", 9},
                    {"levels", {0.3}}};
        if (exp == "tanaka-path") cfg["delta"] = 0.05;

        std::vector<std::string> dirs = {tmp_dir(exp + "_a"), tmp_dir(exp + "_b"),
                                         tmp_dir(exp + "_c")};
        std::vector<int> workers = {1, 1, 3};
        std::vector<RunResult> results;
        for (int i = 0; i < 3; ++i) {
            json c = cfg;
            c["out_dir"] = dirs[i];
            c["workers"] = workers[i];
            results.push_back(run(parse_config(c)));
        }
        for (const auto& f : results[0].files) {
            const auto name = std::filesystem::path(f).filename().string();
            if (name == "report.json") continue;  // echoes out_dir/workers
            CHECK(slurp(dirs[0] + "/" + name) == slurp(dirs[1] + "/" + name));
            CHECK(slurp(dirs[0] + "/" + name) == slurp(dirs[2] + "/" + name));
        }
    }
}

TEST_CASE("tanaka-expectation experiment passes for bm at c = 0") {
    json cfg = {{"experiment", "tanaka-expectation"},
                {"kernel", {{"name", "bm"}}},
                {"levels", {0.0}},
                {"T", 1.0},
                {"out_dir", tmp_dir("tanexp")}};
    const auto rr = run(parse_config(cfg));
    CHECK(rr.pass);
    CHECK(rr.report["checks"][0]["value"].get<double>() <= 1e-6);
    CHECK(rr.report["checks"][0]["pass"].get<bool>());
    CHECK(rr.report.contains("config_hash"));
    CHECK(rr.report["tolerances"]["residual"].get<double>() == 1e-6);
}

TEST_CASE("expected curve export: 101 symmetric rows") {
    json cfg = {{"experiment", "localtime"},
                {"kernel", {{"name", "bm"}}},
                {"grid", {{"t_end", 1.0}, {"points", 513}}},
                {"n_paths", 500},
                {"seed", 3},
                {"levels", {0.0}},
                {"expected_curve", {{"from", -2.0}, {"to", 2.0}, {"points", 101}}},
                {"out_dir", tmp_dir("curve")}};
    const auto rr = run(parse_config(cfg));
    const auto rows = read_csv(cfg["out_dir"].get<std::string>() + "/expected_curve.csv");
    REQUIRE(rows.size() == 101);
    for (int i = 0; i < 50; ++i)
        CHECK(rows[i][1] == doctest::Approx(rows[100 - i][1]).epsilon(1e-9));
    CHECK(rows[50][1] == doctest::Approx(std::sqrt(2.0 / 3.14159265358979323846)).epsilon(3e-6));
}

TEST_CASE("exported local-time curve conserves total mass") {
    const std::string dir = tmp_dir("conserve");
    json cfg = {{"experiment", "localtime"},
                {"kernel", {{"name", "bm"}}},
                {"grid", {{"t_end", 1.0}, {"points", 1025}}},
                {"n_paths", 400},
                {"seed", 4},
                {"levels", {0.0}},
                {"out_dir", dir}};
    const auto rr = run(parse_config(cfg));
    const auto rows = read_csv(dir + "/localtime_curve.csv");
    REQUIRE(rows.size() > 2);
    const double bw = rows[1][0] - rows[0][0];
    double mass = 0.0;
    for (const auto& r : rows) mass += r[2] * bw;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("local-time field csv round-trips through re-import") {
    const auto grid = uniform_grid(0.0, 1.0, 128);
    const auto e = sample_paths(Kernel::brownian(), grid, 50, 6);
    const auto field = estimate_localtime(e, BinSpec::centered(0.0, 0.1, 15));
    const std::string path = tmp_dir("roundtrip") + "/field.csv";
    write_field_csv(field, path);
    const auto rows = read_csv(path);
    REQUIRE(static_cast<int>(rows.size()) == field.bins());
    const auto mean = field.ensemble_mean(0);
    for (int b = 0; b < field.bins(); ++b) {
        CHECK(rows[b][0] == field.bin_center(b));
        CHECK(rows[b][1] == field.times[0]);
        CHECK(rows[b][2] == mean(b));
    }
}

TEST_CASE("kernel-verify experiment passes for the reference kernels") {
    std::vector<json> kernels;
    kernels.push_back(json{{"name", "fbm"}, {"H", 0.75}});
    kernels.push_back(json{{"name", "vgamma"}, {"alpha", 0.5}});
    kernels.push_back(
        json{{"name", "mbm"}, {"h", json{{"type", "linear"}, {"from", 0.55}, {"to", 0.8}}}});
    for (const json& kj : kernels) {
        json cfg = {{"experiment", "kernel-verify"},
                    {"kernel", kj},
                    {"grid", {{"t_end", 1.0}, {"points", 65}}},
                    {"out_dir", tmp_dir("kv_" + kj["name"].get<std::string>())}};
        const auto rr = run(parse_config(cfg));
        CHECK(rr.pass);
    }
}

TEST_CASE("occupation experiment: exact identities pass") {
    json cfg = {{"experiment", "occupation"},
                {"kernel", {{"name", "fbm"}, {"H", 0.7}}},
                {"grid", {{"t_end", 1.0}, {"points", 257}}},
                {"n_paths", 10},
                {"seed", 2},
                {"out_dir", tmp_dir("occ")}};
    const auto rr = run(parse_config(cfg));
    CHECK(rr.pass);
}

TEST_CASE("ito-quadratic experiment passes for bm (reduced grids)") {
    json cfg = {{"experiment", "ito-quadratic"},
                {"kernel", {{"name", "bm"}}},
                {"n_paths", 1000},
                {"seed", 8},
                {"grid_exponents", {8, 10, 12}},
                {"out_dir", tmp_dir("ito")}};
    const auto rr = run(parse_config(cfg));
    CHECK(rr.pass);
    const auto rows = read_csv(cfg["out_dir"].get<std::string>() + "/ito_quadratic.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[2][1] < rows[1][1]);
    CHECK(rows[1][1] < rows[0][1]);
}

TEST_CASE("report embeds full provenance") {
    json cfg = {{"experiment", "simulate"},
                {"kernel", {{"name", "bm"}}},
                {"grid", {{"t_end", 1.0}, {"points", 33}}},
                {"n_paths", 50},
                {"seed", 123},
                {"out_dir", tmp_dir("prov")}};
    const auto rr = run(parse_config(cfg));
    CHECK(rr.report["seed"].get<std::uint64_t>() == 123);
    CHECK(rr.report["config"]["n_paths"].get<int>() == 50);
    CHECK(rr.report["config_hash"].get<std::string>().substr(0, 6) == "fnv1a-");
    CHECK(rr.report["tolerances"].contains("cov_sigmas"));
    // a second parse of the same config hashes identically
    CHECK(config_hash(rr.report["config"]) == rr.report["config_hash"].get<std::string>());
}
