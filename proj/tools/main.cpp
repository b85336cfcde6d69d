#include "glt/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

int main(int argc, char** argv) {
    CLI::App app{"glt: local-time laboratory for Gaussian processes with integral "
                 "representations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false, out_set = false;

    for (const auto& name : glt::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
        sub->add_option("--config", config_path, "experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option_function<std::uint64_t>(
               "--seed", [&](std::uint64_t v) { seed = v; seed_set = true; },
               "override the config seed");
        sub->add_option_function<std::string>(
               "--out", [&](std::string v) { out_dir = std::move(v); out_set = true; },
               "override the output directory");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = glt::load_config(config_path);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (cfg.experiment != sub) {
            std::fprintf(stderr, "config names experiment '%s' but subcommand is '%s'\n",
                         cfg.experiment.c_str(), sub.c_str());
            return 2;
        }
        if (seed_set) {
            cfg.seed = seed;
            cfg.echo["seed"] = seed;
        }
        if (out_set) cfg.out_dir = out_dir;

        const auto result = glt::run(cfg);
        for (const auto& c : result.report["checks"]) {
            std::printf("[%s] %s: value %.6g vs tolerance %.6g\n",
                        c["pass"].get<bool>() ? "pass" : "FAIL",
                        c["name"].get<std::string>().c_str(), c["value"].get<double>(),
                        c["tolerance"].get<double>());
        }
        std::printf("%s: %s (report: %s/report.json)\n", cfg.experiment.c_str(),
                    result.pass ? "PASS" : "FAIL", cfg.out_dir.c_str());
        return result.pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
