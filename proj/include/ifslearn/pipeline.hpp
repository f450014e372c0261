#pragma once

#include "ifslearn/bounds.hpp"
#include "ifslearn/chain.hpp"
#include "ifslearn/copula.hpp"
#include "ifslearn/mcsgd.hpp"
#include "ifslearn/rkhs.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ifsl {

struct KernelConfig {
    std::string family = "gaussian";
    double width = 0.5;  // gaussian
    int degree = 2;      // polynomial
    double offset = 1.0; // polynomial
    double value = 1.0;  // constant

    Kernel make() const;
};

/// Full experiment configuration. JSON schema: every field below under its
/// snake_case name; unknown keys are rejected; "seed" is mandatory. The matrix
/// is given inline ("matrix": rows listed bottom-to-top) or via "matrix_file".
struct ExperimentConfig {
    std::vector<std::vector<double>> matrix_rows; // bottom-to-top
    KernelConfig kernel;
    double theta = 0.75;
    double lambda = 0.1;
    double beta = 0.5;
    double bound_M = 1.0;     // "M"
    double noise_level = 0.1;
    double delta = 0.2;
    double epsilon = 0.25;    // mixing threshold
    std::size_t T = 5000;
    std::size_t replicates = 50;
    std::size_t copula_grid = 64;
    std::size_t spectral_grid = 16;
    std::size_t mixing_cells = 2;
    std::size_t mixing_starts = 5;
    std::size_t mixing_reps = 50000;
    std::size_t mixing_horizon = 6;
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);

    // Canonical serialization (sorted keys, inline matrix); the config hash is
    // therefore stable under field reordering in the input file.
    std::string canonical_json() const;
    std::string config_hash() const;

    TransformationMatrix make_matrix() const;
    void validate() const;
};

/// Matrix file: either JSON {"orientation": ..., "rows": [[...], ...]} or
/// plain text with an "orientation: bottom_to_top" first line followed by one
/// whitespace-separated row per line.
TransformationMatrix load_matrix_file(const std::string& path);

// Commands return 0 on all-pass, 1 when a validated bound fails; I/O and
// configuration problems surface as exceptions.
int cmd_copula(const ExperimentConfig& config);
int cmd_mixing(const ExperimentConfig& config);
int cmd_learn(const ExperimentConfig& config);
int cmd_bounds(const ExperimentConfig& config);
int run_all(const ExperimentConfig& config);

/// Everything cmd_learn/cmd_bounds need, computed once.
struct LearnArtifacts {
    GridCopula copula;
    SpectralModel spec;
    L2Function g;          // source function, default psi_2
    double g_norm = 0.0;
    L2Function f_rho;      // T^beta g
    L2Function f_target;   // f_{lambda,mu*} node values
    KernelExpansion w_star;
    double dist0_sq = 0.0; // ||0 - w_star||_k^2
    std::vector<IterateTrace> traces;
    std::vector<std::uint64_t> replicate_seeds;
};

LearnArtifacts run_learn_pipeline(const ExperimentConfig& config);

} // namespace ifsl
