#pragma once

#include "ifslearn/chain.hpp"
#include "ifslearn/rkhs.hpp"

#include <cstddef>
#include <vector>

namespace ifsl {

/// Parameters of the Markov-chain SGD recursion. alpha, eta, kappa and the
/// step sizes are forced by lambda and the kernel: alpha = lambda,
/// eta = lambda + C_k^2, gamma_t = (alpha / eta^2) t^-theta.
struct SgdConfig {
    double theta = 0.75;
    double lambda = 0.1;
    std::size_t T = 2;
    double bound_M = 1.0;
    Kernel kernel = Kernel::gaussian(0.5);
    double alpha = 0.0;
    double eta = 0.0;
    double kappa = 0.0;
    std::size_t t_star = 1; // frozen-twin clamp activation step

    static SgdConfig create(double theta, double lambda, std::size_t T, double bound_M,
                            Kernel kernel, std::size_t t_star = 1);

    double step_size(std::size_t t) const; // gamma_t
};

struct IterateRecord {
    std::size_t t = 0;
    double gamma = 0.0;
    double residual = 0.0;  // f_t(x_t) - y_t
    double l2_error = 0.0;  // ||f_t - f_target||_rho
    double rkhs_norm = 0.0; // ||f_t||_k
};

struct IterateTrace {
    std::vector<IterateRecord> records; // one per t = 1..T
    KernelExpansion final_expansion;
};

/// One stochastic gradient step:
/// f <- (1 - gamma lambda) f - gamma (f(x) - y) k_x.
KernelExpansion sgd_step(const KernelExpansion& f, const LabeledSample& z, double gamma,
                         double lambda);

IterateTrace run_mcsgd(const std::vector<LabeledSample>& samples, const SgdConfig& config,
                       const KernelExpansion& f1, const SpectralModel& spec,
                       const L2Function& f_target);

/// Twin recursion with the gradient frozen at w_star:
/// w' <- w' - gamma_t [(w_star(x_t) - y_t) k_x + lambda w_star].
/// From step t_star onward the twin is clamped to w_star.
IterateTrace run_frozen_twin(const std::vector<LabeledSample>& samples, const SgdConfig& config,
                             const KernelExpansion& f1_prime, const KernelExpansion& w_star,
                             const SpectralModel& spec);

/// Joint run of both recursions on one sample sequence, tracking the RKHS
/// distances the step-wise contraction inequality needs.
struct PairedRun {
    std::vector<double> dist_sq;      // ||w_t - w'_t||_k^2, t = 1..T
    std::vector<double> twin_dist_sq; // ||w'_t - w_star||_k^2, t = 1..T
    std::vector<double> l2_dist_sq;   // ||w_t - w'_t||_rho^2 (reported, not asserted)
};

PairedRun run_paired(const std::vector<LabeledSample>& samples, const SgdConfig& config,
                     const KernelExpansion& f1, const KernelExpansion& f1_prime,
                     const KernelExpansion& w_star, const SpectralModel& spec);

struct RecursionReport {
    bool ok = true;
    std::size_t first_violation = 0;
    double worst_slack = 0.0; // min over t of rhs - lhs
};

// ||w_{t+1}-w'_{t+1}||^2 <= (1 - kappa^2/t^theta)||w_t-w'_t||^2
//                           + (1/t^theta)||w'_t-w_star||^2   at every step.
RecursionReport check_recursion_inequality(const PairedRun& run, const SgdConfig& config);

/// Sample-indexed quadratic potential
/// V_z(f) = ((f(x) - y)^2 + lambda ||f||_k^2) / 2 with gradient
/// (f(x) - y) k_x + lambda f.
struct QuadraticPotential {
    Kernel kernel;
    double lambda = 0.0;

    double value(const LabeledSample& z, const KernelExpansion& f) const;
    KernelExpansion grad(const LabeledSample& z, const KernelExpansion& f) const;
    double grad_norm(const LabeledSample& z, const KernelExpansion& f) const;
};

// Expansion arithmetic over a shared kernel: a*x + b*y.
KernelExpansion axpy(double a, const KernelExpansion& x, double b, const KernelExpansion& y);
double rkhs_inner(const KernelExpansion& a, const KernelExpansion& b);

double bregman(const QuadraticPotential& potential, const LabeledSample& z,
               const KernelExpansion& x, const KernelExpansion& y);

// D(x,y) + D(y,w) - D(x,w) - <grad(w) - grad(y), x - y>; zero for any V_z.
double three_point_check(const QuadraticPotential& potential, const LabeledSample& z,
                         const KernelExpansion& x, const KernelExpansion& y,
                         const KernelExpansion& w);

// Relative error of <grad(w), u> against a central difference of V_z along u.
double gradient_check(const QuadraticPotential& potential, const LabeledSample& z,
                      const KernelExpansion& w, const KernelExpansion& u, double h);

// <grad(w + u) - grad(w), u> / ||u||^2, sandwiched by alpha and eta.
double convexity_probe(const QuadraticPotential& potential, const LabeledSample& z,
                       const KernelExpansion& w, const KernelExpansion& u);

} // namespace ifsl
