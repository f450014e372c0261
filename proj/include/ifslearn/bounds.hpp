#pragma once

#include "ifslearn/mcsgd.hpp"

#include <cstddef>
#include <vector>

namespace ifsl {

/// Constants feeding the error-bound evaluators. c = 30 is fixed;
/// c_prime = 4 c (M C_k^2)^2 and c_one = sqrt(c_prime) follow.
struct BoundParams {
    double theta = 0.75;
    double lambda = 0.1;
    double kappa = 0.0;
    double c_k = 1.0;
    double bound_M = 1.0;
    double sigma_sq = 0.0; // (2 M C_k^2 (lambda + C_k^2) / lambda)^2
    double t_mix = 1.0;
    std::size_t T = 2;
    double delta = 0.2;
    double beta = 0.5;
    double g_norm = 0.0;
    double dist0_sq = 0.0; // ||w_1 - w'_1||_k^2
    double c = 30.0;
    double c_prime = 0.0;
    double c_one = 0.0;

    static BoundParams create(double theta, double lambda, double c_k, double bound_M,
                              double t_mix, std::size_t T, double delta, double beta,
                              double g_norm, double dist0_sq);
};

struct ProductBound {
    double exact = 1.0;
    double bound = 1.0;
};

// prod_{i=k+1}^{T} (1 - kappa / i^theta) and its closed-form upper bound.
ProductBound coeff_product(double kappa, double theta, std::size_t k, std::size_t T);

struct SumBound {
    double exact = 0.0;
    double bound = 0.0; // 3 / kappa
};

// sum_{k=1}^{T} k^-theta prod_{i=k+1}^{T} (1 - kappa / i^theta).
SumBound coeff_sum(double kappa, double theta, std::size_t T);

struct GradSumBound {
    double proof = 0.0;     // (2 sigma^2 / (2 theta - 1)) (3 theta + 2 (6 theta - 1) t_mix)
    double statement = 0.0; // same with 4 (6 theta - 1)
    double simplified = 0.0; // 30 theta sigma^2 t_mix / (2 theta - 1)
};

GradSumBound grad_sum_bound(double sigma_sq, double theta, double t_mix);

// Initialization-decay term of the error bound.
double e_init(double theta, double kappa, std::size_t T, double dist0_sq);

struct SampConstants {
    double c_theta_lambda = 0.0;
    double b_theta_lambda = 0.0;
};

SampConstants e_samp_constants(const BoundParams& params);

// lambda^beta g_norm + sqrt(E_init) + (1 / delta') B sqrt(t_mix), delta' = sqrt(delta).
double total_bound(const BoundParams& params);

struct BoundReport {
    // theoretical values
    double e_init_value = 0.0;
    double c_theta_lambda = 0.0;
    double b_theta_lambda = 0.0;
    double total_bound_value = 0.0;
    double sigma_sq = 0.0;
    double t_mix = 0.0;
    double quantile_threshold = 0.0; // E_init + (1/delta) C t_mix
    // empirical counterparts
    std::size_t n_replicates = 0;
    double mean_initial_sq = 0.0;
    double mean_final_sq = 0.0;
    double mean_final_norm = 0.0;
    double sqrt_mean_final_sq = 0.0;
    double quantile_fraction = 0.0;
    double quantile_cap = 0.0; // delta + 2/sqrt(n)
    // checks
    bool mean_bound_ok = false;     // mean_final_sq <= E_init + C t_mix
    bool quantile_ok = false;
    bool jensen_ok = false;
    bool reduction_ok = false;      // mean_final_sq < mean_initial_sq / 4
    double mean_bound_margin = 0.0;

    bool all_ok() const { return mean_bound_ok && quantile_ok && jensen_ok && reduction_ok; }
};

BoundReport validate_bounds(const std::vector<IterateTrace>& replicate_traces,
                            const BoundParams& params);

// Markov inequality self-test: fraction{x > eps} <= mean(x)/eps for x >= 0.
bool markov_check(const std::vector<double>& values, double eps);

} // namespace ifsl
