#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "rdfront/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rdfront: curved-front laboratory for periodic bistable media"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int workers = 0;
    long seed = -1;

    const char* kinds[] = {"validate-medium", "front-speed", "speed-map", "surface",
                           "conditions",      "build-front", "verify-bounds",
                           "stability"};
    for (const char* kind : kinds) {
        auto* sub = app.add_subcommand(kind);
        sub->add_option("--config", config_path, "experiment config file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--workers", workers, "worker thread cap");
        sub->add_option("--seed", seed, "seed override for randomized suites");
    }

    CLI11_PARSE(app, argc, argv);
    std::string kind = app.get_subcommands().front()->get_name();

    try {
        rdfront::ExperimentConfig cfg = rdfront::ExperimentConfig::parse_file(config_path);
        if (cfg.kind != kind) {
            std::fprintf(stderr, "config kind '%s' does not match subcommand '%s'\n",
                         cfg.kind.c_str(), kind.c_str());
            return 2;
        }
        const char* env_out = std::getenv("OUTPUT_DIR");
        if (env_out && out_dir.empty()) out_dir = env_out;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (workers > 0) cfg.workers = workers;
        if (seed >= 0) cfg.seed = static_cast<unsigned long>(seed);

        rdfront::RunResult res = rdfront::run_experiment(cfg);
        for (const auto& [name, ok] : res.assertions)
            std::printf("%s %s\n", ok ? "[pass]" : "[FAIL]", name.c_str());
        if (!res.fault.empty()) std::fprintf(stderr, "fault: %s\n", res.fault.c_str());
        std::printf("artifacts: %s\n", res.out_dir.c_str());
        return res.status;
    } catch (const rdfront::Fault& f) {
        std::fprintf(stderr, "error: %s\n", f.what());
        return 2;
    }
}
