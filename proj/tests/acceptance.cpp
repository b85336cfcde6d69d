// Acceptance suite: one numbered criterion per function, each printing a
// single pass/fail line with its measured values and runtime. Exit status is
// the number of failed criteria. `acceptance N` runs criterion N alone.

#include "glt/chaos.hpp"
#include "glt/experiment.hpp"
#include "glt/hermite.hpp"
#include "glt/localtime.hpp"
#include "glt/simulate.hpp"
#include "glt/wick.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace glt;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- 1. Hermite orthonormality ------------------------------------------
Outcome criterion1() {
    const int K = 60;
    const auto& rule = gauss_hermite(2 * K + 32);
    std::vector<std::vector<double>> ek(rule.nodes.size(), std::vector<double>(K + 1));
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        hermite_eval_all(K, rule.nodes[i], ek[i]);
    double worst = 0.0;
    for (int j = 0; j <= K; ++j)
        for (int k = j; k <= K; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                dot += rule.plain_weights[i] * ek[i][j] * ek[i][k];
            worst = std::max(worst, std::abs(dot - (j == k ? 1.0 : 0.0)));
        }
    return {worst <= 1e-8, "max |<e_j,e_k> - delta_jk| = " + fmt(worst) + " (<= 1e-8)"};
}

// --- 2. Hermite envelope bound, gamma = 0.4 -------------------------------
Outcome criterion2() {
    auto sup_ratio_for = [](double gamma) {
        double sup = 0.0;
        std::vector<double> ek(201);
        for (double x = 0.0; x <= 50.0; x += 0.1) {
            hermite_eval_all(200, x, ek);
            for (int k = 0; k <= 200; ++k) {
                const bool inside = x <= 2.0 * std::sqrt(k + 1.0);
                const double bound =
                    inside ? std::pow(k + 1.0, -1.0 / 12.0) : std::exp(-gamma * x * x);
                const double num = std::abs(ek[k]);
                if (num == 0.0) continue;
                sup = std::max(sup, bound > 0.0 ? num / bound
                                                : std::numeric_limits<double>::infinity());
            }
        }
        return sup;
    };
    const double sup04 = sup_ratio_for(0.4);
    const double sup01 = sup_ratio_for(0.1);
    const bool pass = sup04 <= 10.0;
    std::string detail = "sup ratio = " + fmt(sup04) + " with gamma = 0.4 (<= 10 required)";
    if (!pass)
        detail += "; the 0.4 decay rate exceeds the junction rate ~0.134 of the Hermite "
                  "tail, so the pinned parameters cannot hold (gamma = 0.1 gives sup " +
                  fmt(sup01) + "; see decisions ledger)";
    return {pass, detail};
}

// --- 3. M_H identity / Parseval covariance --------------------------------
Outcome criterion3() {
    double worst_abs = 0.0, worst_rel = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double t = 0.1 + 0.9 * i / 4.0, s = 0.1 + 0.9 * j / 4.0;
            const double p = covariance_via_parseval(0.5, 0.5, t, s).value;
            worst_abs = std::max(worst_abs, std::abs(p - std::min(t, s)));
            for (double H : {0.25, 0.75}) {
                const double q = covariance_via_parseval(H, H, t, s).value;
                const double ref = Kernel::fractional(H).covariance(t, s);
                worst_rel = std::max(worst_rel, std::abs(q - ref) / std::abs(ref));
            }
        }
    const bool pass = worst_abs <= 1e-3 && worst_rel <= 1e-3;
    return {pass, "H=1/2 worst |P - min| = " + fmt(worst_abs) +
                      ", fBm worst rel err = " + fmt(worst_rel) + " (both <= 1e-3)"};
}

// --- 4. Tanaka in expectation ---------------------------------------------
Outcome criterion4() {
    double worst = 0.0;
    for (const Kernel& k : {Kernel::brownian(), Kernel::fractional(0.3),
                            Kernel::fractional(0.7), Kernel::v_gamma(0.5)})
        for (double c : {0.0, 0.5, 1.0})
            worst = std::max(worst, tanaka_check_expectation(k, c, 1.0));
    return {worst <= 1e-6, "worst residual = " + fmt(worst) + " (<= 1e-6)"};
}

// --- 5. Expected local time by Monte Carlo --------------------------------
Outcome criterion5() {
    const int steps = 1 << 12;
    const int n = 10000;
    const double bw = 0.04;
    const auto grid = uniform_grid(0.0, 1.0, steps);
    const double ref = std::sqrt(2.0 / kPi);

    auto mc_mean = [&](const Kernel& k, bool weighted, std::uint64_t seed) {
        std::vector<double> w(steps);
        for (int i = 0; i < steps; ++i) {
            w[i] = weighted ? k.variance(grid[i + 1]) - k.variance(grid[i])
                            : grid[i + 1] - grid[i];
        }
        double acc = 0.0;
        sample_paths_blocked(k, grid, n, seed, [&](int, const Eigen::MatrixXd& block) {
            double local = 0.0;
            for (int p = 0; p < block.rows(); ++p) {
                double v = 0.0;
                for (int i = 0; i < steps; ++i) {
                    const double g = block(p, i);
                    if (g >= -bw / 2 && g < bw / 2) v += w[i];
                }
                local += v / bw;
            }
            acc += local;  // single-threaded sink keeps the sum ordered
        });
        return acc / n;
    };

    const double t0 = now_s();
    const double bm_mean = mc_mean(Kernel::brownian(), false, 501);
    const double t1 = now_s();
    const double fbm_mean = mc_mean(Kernel::fractional(0.75), true, 502);
    const double t2 = now_s();
    const double bm_dev = std::abs(bm_mean - ref) / ref;
    const double fbm_dev = std::abs(fbm_mean - ref) / ref;
    const bool pass = bm_dev <= 0.05 && fbm_dev <= 0.05 && (t1 - t0) < 120.0 && (t2 - t1) < 120.0;
    return {pass, "bm lhat mean = " + fmt(bm_mean) + " (dev " + fmt(100 * bm_dev) +
                      "%), fbm(0.75) Lhat mean = " + fmt(fbm_mean) + " (dev " +
                      fmt(100 * fbm_dev) + "%) vs sqrt(2/pi), tol 5%; " + fmt(t1 - t0) + "s + " +
                      fmt(t2 - t1) + "s (< 120 s each)"};
}

// --- 6. Occupation-time formulas -------------------------------------------
Outcome criterion6() {
    const auto grid = uniform_grid(0.0, 1.0, 1 << 10);
    const Kernel k = Kernel::fractional(0.7);
    const auto e = sample_paths(k, grid, 50, 601);
    double worst_exact = 0.0;
    for (const bool weighted : {false, true}) {
        const auto field = weighted
                               ? estimate_weighted_localtime(e, BinSpec::centered(0.0, 0.05, 40))
                               : estimate_localtime(e, BinSpec::centered(0.0, 0.05, 40));
        const double lo = field.edges.front(), w = field.binwidth();
        auto pc = [lo, w](double x) {
            const int b = static_cast<int>((x - lo) / w);
            return b % 3 == 0 ? 0.5 : (b % 3 == 1 ? 1.5 : -0.7);
        };
        for (int p = 0; p < e.n_paths(); ++p) {
            worst_exact = std::max(worst_exact, occupation_residual(e, p, pc, field));
            worst_exact = std::max(
                worst_exact, occupation_residual(e, p, [](double) { return 1.0; }, field));
        }
    }
    std::vector<double> res;
    for (int lvl = 0; lvl < 4; ++lvl) {
        const auto field = estimate_localtime(e, BinSpec::centered(0.0, 0.16 / (1 << lvl), 8 << lvl));
        double mean = 0.0;
        for (int p = 0; p < e.n_paths(); ++p)
            mean += occupation_residual(e, p, [](double x) { return x * x; }, field);
        res.push_back(mean / e.n_paths());
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < res.size(); ++i) decreasing = decreasing && res[i] < res[i - 1];
    const bool pass = worst_exact <= 1e-12 && decreasing;
    return {pass, "piecewise-constant residual = " + fmt(worst_exact) +
                      " (<= 1e-12); x^2 residuals " + fmt(res[0]) + " > ... > " + fmt(res[3]) +
                      (decreasing ? " decreasing" : " NOT decreasing")};
}

// --- 7. Ito quadratic identity in L^2 --------------------------------------
Outcome criterion7() {
    const int n = 4000;
    std::string detail;
    bool pass = true;
    for (const Kernel& k : {Kernel::brownian(), Kernel::fractional(0.7)}) {
        std::vector<double> mses;
        double final_rel = 0.0;
        for (int g = 8; g <= 12; ++g) {
            const auto grid = uniform_grid(0.0, 1.0, 1 << g);
            const auto e = sample_paths(k, grid, n, 700 + g);
            const auto rep = wick_riemann_integral([](double x) { return x; },
                                                   [](double) { return 1.0; }, e, 1.0);
            double mse = 0.0;
            for (int p = 0; p < n; ++p) {
                const double gT = e.paths(p, e.n_times() - 1);
                const double diff = 2.0 * rep.integrals[p] + 1.0 - gT * gT;
                mse += diff * diff;
            }
            mses.push_back(mse / n);
            final_rel = std::sqrt(mses.back()) / std::sqrt(3.0);
        }
        bool monotone = true;
        for (std::size_t i = 1; i < mses.size(); ++i)
            monotone = monotone && mses[i] < mses[i - 1];
        pass = pass && monotone && final_rel <= 0.02;
        detail += k.name() + ": L2 errors " + fmt(mses.front()) + " -> " + fmt(mses.back()) +
                  (monotone ? " monotone" : " NOT monotone") + ", final rel " +
                  fmt(100 * final_rel) + "% (<= 2%); ";
    }
    return {pass, detail};
}

// --- 8. Local time square integrability: chaos series vs Monte Carlo -------
Outcome criterion8() {
    const Kernel k = Kernel::fractional(0.75);
    const double a = 0.2;
    const auto series = localtime_variance_series(k, a, 1.0, 30);

    const int steps = 1 << 12;
    const int n = 10000;
    const double bw = default_binwidth(k, 1.0);  // 0.04 sqrt(R_1) = 0.04
    const auto grid = uniform_grid(0.0, 1.0, steps);
    const double dt = 1.0 / steps;
    double m2 = 0.0;
    sample_paths_blocked(k, grid, n, 801, [&](int, const Eigen::MatrixXd& block) {
        for (int p = 0; p < block.rows(); ++p) {
            double v = 0.0;
            for (int i = 0; i < steps; ++i) {
                const double g = block(p, i);
                if (g >= a - bw / 2 && g < a + bw / 2) v += dt;
            }
            v /= bw;
            m2 += v * v;
        }
    });
    m2 /= n;
    const double rel = std::abs(series.second_moment - m2) / m2;
    const bool pass = rel <= 0.10;
    std::string detail = "series(K=30) = " + fmt(series.second_moment) + ", MC = " + fmt(m2) +
                         ", rel diff " + fmt(100 * rel) + "% (<= 10%)";
    if (!pass)
        detail += "; the K=30 truncation of the delta-function chaos tail (terms ~ k^{-0.9}, "
                  "exact limit 1.814 by bivariate-density quadrature) cannot meet the binned "
                  "estimator within 10% (see decisions ledger)";
    return {pass, detail};
}

// --- 9. V_gamma increment bounds -------------------------------------------
Outcome criterion9() {
    const double alpha = 0.5;
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.1 + 0.9 * i / 9.0);
    const int n = 10000;
    const auto e = sample_vgamma(alpha, grid, n, 901, 256);
    bool ok = true;
    double worst_margin = 1e300;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < i; ++j) {
            double d2 = 0.0;
            for (int p = 0; p < n; ++p) {
                const double d = e.paths(p, i) - e.paths(p, j);
                d2 += d * d;
            }
            d2 /= n;
            const double se = d2 * std::sqrt(2.0 / n);
            const double Rd = std::pow(grid[i] - grid[j], alpha);
            const double lo_margin = d2 - (Rd - 3.0 * se);
            const double hi_margin = (2.0 * Rd + 3.0 * se) - d2;
            worst_margin = std::min({worst_margin, lo_margin, hi_margin});
            ok = ok && lo_margin >= 0.0 && hi_margin >= 0.0;
        }
    return {ok, std::string("R_|t-s| <= Delta <= 2 R_|t-s| within 3 se at all 45 pairs") +
                    (ok ? "" : " VIOLATED") + ", worst margin " + fmt(worst_margin)};
}

// --- 10. Integration-by-parts relation -------------------------------------
Outcome criterion10() {
    const auto bm_grid = uniform_grid(0.0, 1.0, 1 << 10);
    const auto ebm = sample_paths(Kernel::brownian(), bm_grid, 500, 1001);
    const auto rbm = ibp_residual(ebm, 0.0, 1.0);

    const auto grid = uniform_grid(0.0, 1.0, 1 << 12);
    const auto e = sample_paths(Kernel::fractional(0.7), grid, 4000, 1002);
    const auto r = ibp_residual(e, 0.3, 1.0);
    const double rel = r.mean_abs_residual / r.mean_weighted_localtime;
    const bool pass = rbm.mean_abs_residual == 0.0 && rel <= 0.02;
    return {pass, "bm residual = " + fmt(rbm.mean_abs_residual) +
                      " (exactly 0); fbm(0.7) residual = " + fmt(100 * rel) +
                      "% of E[L] (<= 2%)"};
}

// --- 11. Determinism of every experiment ------------------------------------
Outcome criterion11() {
    using nlohmann::json;
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "glt_acceptance_det";
    fs::remove_all(base);

    auto config_for = [&](const std::string& name) {
        json cfg = {{"experiment", name},
                    {"kernel", {{"name", "fbm"}, {"H", 0.7}}},
                    {"grid", {{"t_end", 1.0}, {"points", 65}}},
                    {"n_paths", 200},
                    {"seed", 99},
                    {"levels", {0.3}}};
        if (name == "ito-quadratic") cfg["grid_exponents"] = {6, 7};
        if (name == "ito-quadratic") cfg["tolerances"] = {{"final_rel_rms", 1.0}};
        if (name == "chaos-variance") {
            cfg["chaos_K"] = 10;
            cfg["tolerances"] = {{"rel_diff", 10.0}};
        }
        if (name == "tanaka-path") cfg["delta"] = 0.05;
        if (name == "localtime") cfg["tolerances"] = {{"rel_mean", 1.0}};
        return cfg;
    };

    bool all_equal = true;
    std::string bad;
    for (const auto& name : experiment_names()) {
        std::vector<std::string> dirs;
        std::vector<int> workers = {1, 1, 3};
        std::vector<RunResult> results;
        for (int rep = 0; rep < 3; ++rep) {
            json cfg = config_for(name);
            const std::string dir = (base / (name + "_" + std::to_string(rep))).string();
            cfg["out_dir"] = dir;
            cfg["workers"] = workers[rep];
            dirs.push_back(dir);
            results.push_back(run(parse_config(cfg)));
        }
        for (const auto& f : results[0].files) {
            const auto fname = fs::path(f).filename().string();
            if (fname == "report.json") continue;  // echoes out_dir and workers
            auto slurp = [](const std::string& p) {
                std::ifstream in(p, std::ios::binary);
                std::stringstream ss;
                ss << in.rdbuf();
                return ss.str();
            };
            const std::string a = slurp(dirs[0] + "/" + fname);
            if (a.empty() || a != slurp(dirs[1] + "/" + fname) ||
                a != slurp(dirs[2] + "/" + fname)) {
                all_equal = false;
                bad += name + "/" + fname + " ";
            }
        }
    }
    return {all_equal, all_equal ? "all 8 experiments byte-identical across reruns and "
                                   "worker counts 1 and 3"
                                 : "mismatch in: " + bad};
}

struct Criterion {
    int id;
    const char* title;
    double runtime_limit_s;
    std::function<Outcome()> fn;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "Hermite orthonormality", 5.0, criterion1},
        {2, "Hermite envelope bound (gamma = 0.4)", 10.0, criterion2},
        {3, "M_H identity / Parseval covariance", 30.0, criterion3},
        {4, "Tanaka in expectation", 5.0, criterion4},
        {5, "Expected local time by Monte Carlo", 240.0, criterion5},
        {6, "Occupation-time formulas", 60.0, criterion6},
        {7, "Ito quadratic identity in L2", 180.0, criterion7},
        {8, "Local time second moment: chaos series vs MC", 300.0, criterion8},
        {9, "V_gamma increment bounds", 120.0, criterion9},
        {10, "Integration-by-parts relation", 120.0, criterion10},
        {11, "Determinism across reruns and workers", 600.0, criterion11},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const double t0 = now_s();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double dt = now_s() - t0;
        const bool in_time = dt < c.runtime_limit_s;
        const bool pass = out.pass && in_time;
        if (!pass) ++failures;
        std::printf("criterion %2d [%s] %s: %s (%.1f s%s)\n", c.id, pass ? "PASS" : "FAIL",
                    c.title, out.detail.c_str(), dt,
                    in_time ? "" : ", over the runtime limit");
        std::fflush(stdout);
    }
    return failures;
}
