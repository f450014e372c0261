// Command-line front end; links only the C API of the shared library.
#include <ifslearn.h>

#include <CLI11.hpp>

#include <cstdint>
#include <utility>
#include <cstdio>
#include <string>

namespace {

struct Options {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir;
    std::size_t replicates = 0;
};

int run(const Options& opt, int (*command)(const ifsl_config*)) {
    ifsl_config* cfg = nullptr;
    if (!opt.config_path.empty()) {
        cfg = ifsl_config_load_file(opt.config_path.c_str());
    } else if (opt.seed_given) {
        const std::string json = "{\"seed\": " + std::to_string(opt.seed) + "}";
        cfg = ifsl_config_load_json(json.c_str());
    } else {
        std::fprintf(stderr, "error: provide --config or --seed\n");
        return IFSL_ERROR;
    }
    if (cfg == nullptr) {
        std::fprintf(stderr, "error: %s\n", ifsl_last_error());
        return IFSL_ERROR;
    }
    int status = IFSL_OK;
    if (opt.seed_given) status = ifsl_config_set_seed(cfg, opt.seed);
    if (status == IFSL_OK && !opt.out_dir.empty())
        status = ifsl_config_set_out_dir(cfg, opt.out_dir.c_str());
    if (status == IFSL_OK && opt.replicates > 0)
        status = ifsl_config_set_replicates(cfg, opt.replicates);
    if (status == IFSL_OK) status = command(cfg);
    if (status != IFSL_OK) std::fprintf(stderr, "error: %s\n", ifsl_last_error());
    ifsl_config_free(cfg);
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"IFS-driven Markov-chain SGD learning and bound validation"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config_path, "JSON configuration file");
    auto* seed_opt = app.add_option("--seed", opt.seed, "Override the master seed");
    app.add_option("--out", opt.out_dir, "Override the output directory");
    app.add_option("--replicates", opt.replicates, "Override the replicate count");

    int (*command)(const ifsl_config*) = nullptr;
    const std::pair<const char*, const char*> subcommands[] = {
        {"copula", "Invariant and empirical copulas with convergence curve"},
        {"mixing", "Mixing-time estimate and decay bound checks"},
        {"learn", "Replicated Markov-chain SGD runs with error traces"},
        {"bounds", "Bound constants validated against replicate statistics"},
        {"all", "Full pipeline: copula, mixing, learn, bounds"},
    };
    int (*commands[])(const ifsl_config*) = {ifsl_run_copula, ifsl_run_mixing, ifsl_run_learn,
                                             ifsl_run_bounds, ifsl_run_all};
    for (std::size_t i = 0; i < 5; ++i) {
        auto* sub = app.add_subcommand(subcommands[i].first, subcommands[i].second);
        sub->fallthrough();
        sub->callback([&command, &commands, i] { command = commands[i]; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : IFSL_ERROR;
    }
    opt.seed_given = seed_opt->count() > 0;
    return run(opt, command);
}
