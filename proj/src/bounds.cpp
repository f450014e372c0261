#include "ifslearn/bounds.hpp"
#include "ifslearn/errors.hpp"

#include <cmath>
#include <string>

namespace ifsl {

BoundParams BoundParams::create(double theta, double lambda, double c_k, double bound_M,
                                double t_mix, std::size_t T, double delta, double beta,
                                double g_norm, double dist0_sq) {
    if (theta <= 0.5 || theta > 1.0)
        throw ValidationError("bound params: theta must be in (1/2, 1]");
    if (lambda <= 0.0) throw ValidationError("bound params: lambda must be positive");
    if (c_k <= 0.0) throw ValidationError("bound params: C_k must be positive");
    if (bound_M <= 0.0) throw ValidationError("bound params: M must be positive");
    if (t_mix < 1.0) throw ValidationError("bound params: t_mix must be >= 1");
    if (delta <= 0.0 || delta >= 1.0)
        throw ValidationError("bound params: delta must be in (0, 1)");
    if (beta <= 0.0 || beta > 1.0) throw ValidationError("bound params: beta must be in (0, 1]");

    BoundParams p;
    p.theta = theta;
    p.lambda = lambda;
    p.c_k = c_k;
    p.bound_M = bound_M;
    p.t_mix = t_mix;
    p.T = T;
    p.delta = delta;
    p.beta = beta;
    p.g_norm = g_norm;
    p.dist0_sq = dist0_sq;
    const double ck2 = c_k * c_k;
    p.kappa = lambda / (lambda + ck2);
    const double s = 2.0 * bound_M * ck2 * (lambda + ck2) / lambda;
    p.sigma_sq = s * s;
    p.c_prime = 4.0 * p.c * (bound_M * ck2) * (bound_M * ck2);
    p.c_one = 2.0 * std::sqrt(p.c) * bound_M * ck2;
    return p;
}

ProductBound coeff_product(double kappa, double theta, std::size_t k, std::size_t T) {
    if (kappa <= 0.0 || kappa > 1.0)
        throw ValidationError("coeff_product: kappa must be in (0, 1]");
    if (theta <= 0.0 || theta > 1.0)
        throw ValidationError("coeff_product: theta must be in (0, 1]");
    if (k > T) throw ValidationError("coeff_product: need k <= T");

    ProductBound out;
    for (std::size_t i = k + 1; i <= T; ++i) {
        const double factor = 1.0 - kappa / std::pow(static_cast<double>(i), theta);
        if (factor <= 0.0)
            throw DomainError("coeff_product: non-positive factor at i = " + std::to_string(i));
        out.exact *= factor;
    }
    const double dk = static_cast<double>(k);
    const double dT = static_cast<double>(T);
    if (theta == 1.0) {
        out.bound = std::pow((dk + 1.0) / (dT + 1.0), kappa);
    } else {
        out.bound = std::exp((kappa / (1.0 - theta)) *
                             (std::pow(dk + 1.0, 1.0 - theta) - std::pow(dT + 1.0, 1.0 - theta)));
    }
    return out;
}

SumBound coeff_sum(double kappa, double theta, std::size_t T) {
    if (kappa <= 0.0 || kappa > 1.0) throw ValidationError("coeff_sum: kappa must be in (0, 1]");
    if (T < 1) throw ValidationError("coeff_sum: T must be >= 1");

    SumBound out;
    out.bound = 3.0 / kappa;
    // Run the product tail backwards: tail(k) = prod_{i=k+1}^{T} (1 - kappa/i^theta).
    double tail = 1.0;
    std::vector<double> tails(T + 1, 1.0);
    for (std::size_t i = T; i >= 1; --i) {
        tails[i] = tail;
        if (i == 1) break;
        const double factor = 1.0 - kappa / std::pow(static_cast<double>(i), theta);
        if (factor <= 0.0)
            throw DomainError("coeff_sum: non-positive factor at i = " + std::to_string(i));
        tail *= factor;
    }
    for (std::size_t k = 1; k <= T; ++k)
        out.exact += std::pow(static_cast<double>(k), -theta) * tails[k];
    return out;
}

GradSumBound grad_sum_bound(double sigma_sq, double theta, double t_mix) {
    if (theta <= 0.5 || theta > 1.0)
        throw DomainError("grad_sum_bound: theta must be in (1/2, 1]");
    if (t_mix < 1.0) throw ValidationError("grad_sum_bound: t_mix must be >= 1");

    GradSumBound out;
    const double lead = 2.0 * sigma_sq / (2.0 * theta - 1.0);
    out.proof = lead * (3.0 * theta + 2.0 * (6.0 * theta - 1.0) * t_mix);
    out.statement = lead * (3.0 * theta + 4.0 * (6.0 * theta - 1.0) * t_mix);
    out.simplified = 30.0 * theta * sigma_sq * t_mix / (2.0 * theta - 1.0);
    return out;
}

double e_init(double theta, double kappa, std::size_t T, double dist0_sq) {
    if (theta <= 0.5 || theta > 1.0) throw DomainError("e_init: theta must be in (1/2, 1]");
    if (T < 2) throw ValidationError("e_init: T must be >= 2");
    const double k2 = kappa * kappa;
    const double dT = static_cast<double>(T);
    if (theta == 1.0) return std::pow(2.0, k2 + 1.0) / std::pow(dT, k2) * dist0_sq;
    const double expo =
        (2.0 * k2 / (1.0 - theta)) * (std::pow(2.0, 1.0 - theta) - std::pow(dT, 1.0 - theta));
    return 2.0 * std::exp(expo) * dist0_sq;
}

SampConstants e_samp_constants(const BoundParams& p) {
    if (p.theta <= 0.5 || p.theta > 1.0)
        throw DomainError("e_samp_constants: theta must be in (1/2, 1]");
    SampConstants out;
    const double k2 = p.kappa * p.kappa;
    const double dT = static_cast<double>(p.T);
    if (p.theta == 1.0) {
        const double decay = std::pow(2.0, k2 + 1.0) / std::pow(dT, k2);
        out.c_theta_lambda = (p.c_prime / (p.lambda * p.lambda)) * (3.0 + k2 * decay);
        out.b_theta_lambda =
            (p.c_one / p.lambda) * (std::sqrt(3.0) + p.kappa * std::sqrt(decay));
        return out;
    }
    const double gap = std::pow(2.0, 1.0 - p.theta) - std::pow(dT, 1.0 - p.theta);
    const double lead = p.c_prime * p.theta / (p.lambda * p.lambda * (2.0 * p.theta - 1.0));
    out.c_theta_lambda =
        lead * (3.0 + 2.0 * k2 * std::exp((2.0 * k2 / (1.0 - p.theta)) * gap));
    out.b_theta_lambda = (p.c_one / p.lambda) *
                         std::sqrt(p.theta / (2.0 * p.theta - 1.0)) *
                         (std::sqrt(3.0) +
                          std::sqrt(2.0) * p.kappa * std::exp((k2 / (1.0 - p.theta)) * gap));
    return out;
}

double total_bound(const BoundParams& p) {
    const SampConstants samp = e_samp_constants(p);
    const double delta_prime = std::sqrt(p.delta);
    return std::pow(p.lambda, p.beta) * p.g_norm +
           std::sqrt(e_init(p.theta, p.kappa, p.T, p.dist0_sq)) +
           (1.0 / delta_prime) * samp.b_theta_lambda * std::sqrt(p.t_mix);
}

BoundReport validate_bounds(const std::vector<IterateTrace>& replicate_traces,
                            const BoundParams& params) {
    if (replicate_traces.size() < 30)
        throw ValidationError("validate_bounds: need at least 30 replicates (got " +
                              std::to_string(replicate_traces.size()) + ")");

    BoundReport report;
    report.n_replicates = replicate_traces.size();
    report.sigma_sq = params.sigma_sq;
    report.t_mix = params.t_mix;
    report.e_init_value = e_init(params.theta, params.kappa, params.T, params.dist0_sq);
    const SampConstants samp = e_samp_constants(params);
    report.c_theta_lambda = samp.c_theta_lambda;
    report.b_theta_lambda = samp.b_theta_lambda;
    report.total_bound_value = total_bound(params);
    report.quantile_threshold =
        report.e_init_value + (1.0 / params.delta) * samp.c_theta_lambda * params.t_mix;

    const double n = static_cast<double>(replicate_traces.size());
    double sum_init = 0.0, sum_final = 0.0, sum_norm = 0.0;
    std::size_t exceed = 0;
    for (const IterateTrace& trace : replicate_traces) {
        if (trace.records.empty())
            throw ValidationError("validate_bounds: empty replicate trace");
        const double e0 = trace.records.front().l2_error;
        const double eT = trace.records.back().l2_error;
        sum_init += e0 * e0;
        sum_final += eT * eT;
        sum_norm += eT;
        if (eT * eT > report.quantile_threshold) ++exceed;
    }
    report.mean_initial_sq = sum_init / n;
    report.mean_final_sq = sum_final / n;
    report.mean_final_norm = sum_norm / n;
    report.sqrt_mean_final_sq = std::sqrt(report.mean_final_sq);
    report.quantile_fraction = static_cast<double>(exceed) / n;
    report.quantile_cap = params.delta + 2.0 / std::sqrt(n);

    const double mean_bound = report.e_init_value + samp.c_theta_lambda * params.t_mix;
    report.mean_bound_margin = mean_bound - report.mean_final_sq;
    report.mean_bound_ok = report.mean_final_sq <= mean_bound;
    report.quantile_ok = report.quantile_fraction <= report.quantile_cap;
    report.jensen_ok = report.mean_final_norm <= report.sqrt_mean_final_sq + 1e-12;
    report.reduction_ok = report.mean_final_sq < report.mean_initial_sq / 4.0;
    return report;
}

bool markov_check(const std::vector<double>& values, double eps) {
    if (eps <= 0.0) throw ValidationError("markov_check: eps must be positive");
    double mean = 0.0;
    std::size_t exceed = 0;
    for (double v : values) {
        if (v < 0.0) throw ValidationError("markov_check: values must be non-negative");
        mean += v;
        if (v > eps) ++exceed;
    }
    if (values.empty()) return true;
    mean /= static_cast<double>(values.size());
    const double fraction = static_cast<double>(exceed) / static_cast<double>(values.size());
    return fraction <= mean / eps + 1e-15;
}

} // namespace ifsl
