#include "ifslearn.h"

#include "ifslearn/errors.hpp"
#include "ifslearn/pipeline.hpp"

#include <string>

struct ifsl_config {
    ifsl::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename Fn> int run_command(const ifsl_config* config, Fn&& fn) {
    if (config == nullptr) {
        set_error("null config handle");
        return IFSL_ERROR;
    }
    try {
        g_last_error.clear();
        const int status = fn(config->cfg);
        if (status != 0) set_error("bound or validation check failed");
        return status == 0 ? IFSL_OK : IFSL_FAIL;
    } catch (const ifsl::IoError& e) {
        set_error(e.what());
        return IFSL_ERROR;
    } catch (const std::exception& e) {
        set_error(e.what());
        return IFSL_FAIL;
    }
}

} // namespace

extern "C" {

const char* ifsl_version(void) { return "1.0.0"; }

ifsl_config* ifsl_config_load_file(const char* path) {
    if (path == nullptr) {
        set_error("null path");
        return nullptr;
    }
    try {
        g_last_error.clear();
        return new ifsl_config{ifsl::ExperimentConfig::from_file(path)};
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

ifsl_config* ifsl_config_load_json(const char* json_text) {
    if (json_text == nullptr) {
        set_error("null json text");
        return nullptr;
    }
    try {
        g_last_error.clear();
        return new ifsl_config{ifsl::ExperimentConfig::from_json_text(json_text)};
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void ifsl_config_free(ifsl_config* config) { delete config; }

int ifsl_config_set_seed(ifsl_config* config, uint64_t seed) {
    if (config == nullptr) {
        set_error("null config handle");
        return IFSL_ERROR;
    }
    config->cfg.seed = seed;
    return IFSL_OK;
}

int ifsl_config_set_out_dir(ifsl_config* config, const char* out_dir) {
    if (config == nullptr || out_dir == nullptr || out_dir[0] == '\0') {
        set_error("null config handle or empty out_dir");
        return IFSL_ERROR;
    }
    config->cfg.out_dir = out_dir;
    return IFSL_OK;
}

int ifsl_config_set_replicates(ifsl_config* config, size_t replicates) {
    if (config == nullptr || replicates == 0) {
        set_error("null config handle or zero replicates");
        return IFSL_ERROR;
    }
    config->cfg.replicates = replicates;
    return IFSL_OK;
}

int ifsl_run_copula(const ifsl_config* config) {
    return run_command(config, [](const ifsl::ExperimentConfig& c) { return ifsl::cmd_copula(c); });
}

int ifsl_run_mixing(const ifsl_config* config) {
    return run_command(config, [](const ifsl::ExperimentConfig& c) { return ifsl::cmd_mixing(c); });
}

int ifsl_run_learn(const ifsl_config* config) {
    return run_command(config, [](const ifsl::ExperimentConfig& c) { return ifsl::cmd_learn(c); });
}

int ifsl_run_bounds(const ifsl_config* config) {
    return run_command(config, [](const ifsl::ExperimentConfig& c) { return ifsl::cmd_bounds(c); });
}

int ifsl_run_all(const ifsl_config* config) {
    return run_command(config, [](const ifsl::ExperimentConfig& c) { return ifsl::run_all(c); });
}

const char* ifsl_last_error(void) { return g_last_error.c_str(); }

} // extern "C"
