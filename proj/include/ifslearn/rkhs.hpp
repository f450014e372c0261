#pragma once

#include "ifslearn/copula.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ifsl {

/// Mercer kernel on the unit square. C_k = sup_x sqrt(k(x,x)).
class Kernel {
public:
    enum class Family { gaussian, polynomial, constant };

    // k(x,x') = exp(-|x-x'|^2 / (2 w^2))
    static Kernel gaussian(double width);
    // k(x,x') = (<x,x'> + c)^p
    static Kernel polynomial(int degree, double offset);
    // k(x,x') = v
    static Kernel constant(double value);

    Kernel() : Kernel(Family::gaussian, 1.0, 0.0, 1.0) {}

    double operator()(Point a, Point b) const;
    double sup_sqrt_diag() const { return c_k_; } // C_k
    Family family() const { return family_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }

private:
    Kernel(Family family, double p1, double p2, double c_k)
        : family_(family), p1_(p1), p2_(p2), c_k_(c_k) {}
    Family family_;
    double p1_;
    double p2_;
    double c_k_;
};

using L2Function = Eigen::VectorXd; // values at the quadrature nodes of a SpectralModel

/// A function in the RKHS: f = global_scale * sum_i coeffs[i] k(centers[i], .).
/// The lazy global scale keeps SGD's (1 - gamma lambda) shrinkage O(1).
struct KernelExpansion {
    Kernel kernel;
    std::vector<Point> centers;
    std::vector<double> coeffs;
    double global_scale = 1.0;

    KernelExpansion() = default;
    explicit KernelExpansion(Kernel k) : kernel(k) {}

    double evaluate(Point x) const;
    std::size_t size() const { return centers.size(); }
};

/// Quadrature discretization of the integral operator: Nystrom eigensystem of
/// the symmetrized weighted Gram matrix.
class SpectralModel {
public:
    SpectralModel(Kernel kernel, std::vector<Point> nodes, Eigen::VectorXd weights,
                  Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigvec_values);

    const Kernel& kernel() const { return kernel_; }
    const std::vector<Point>& nodes() const { return nodes_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    // psi_i at node m, column per eigenfunction.
    const Eigen::MatrixXd& eigvec_values() const { return eigvec_values_; }
    std::size_t n_nodes() const { return nodes_.size(); }
    Eigen::Index n_eigs() const { return eigenvalues_.size(); }

    double inner(const L2Function& f, const L2Function& g) const;
    // <f, psi_i> for every retained eigenfunction.
    Eigen::VectorXd coefficients(const L2Function& f) const;
    L2Function from_coefficients(const Eigen::VectorXd& coeffs) const;

    // Nystrom extension psi_i(x) = (1/sigma_i) sum_m w_m k(x, node_m) psi_i(node_m).
    double eval_eigenfunction(Eigen::Index i, Point x) const;
    // Off-node value of sum_i coeffs[i] psi_i.
    double eval_in_span(const Eigen::VectorXd& coeffs, Point x) const;

private:
    Kernel kernel_;
    std::vector<Point> nodes_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigvec_values_;
};

Eigen::MatrixXd gram(const Kernel& kernel, const std::vector<Point>& points);

SpectralModel nystrom_spectrum(const Kernel& kernel, std::vector<Point> nodes,
                               Eigen::VectorXd weights);

/// Quadrature for the invariant measure: nodes are the centers of a
/// spectral_grid x spectral_grid partition, weights the copula cell masses.
/// The copula grid size must be a multiple of spectral_grid.
SpectralModel build_spectral_model(const Kernel& kernel, const GridCopula& copula,
                                   std::size_t spectral_grid);

L2Function operator_power_apply(const SpectralModel& spec, double beta, const L2Function& f);

L2Function resolvent_apply(const SpectralModel& spec, double lambda, const L2Function& f);

struct SourceTarget {
    L2Function f_rho;
    double g_norm = 0.0;
};

// f_rho = T^beta g under the source condition.
SourceTarget make_source_target(const SpectralModel& spec, double beta, const L2Function& g);

// f_{lambda,mu*} = (T + lambda I)^{-1} T f_rho.
L2Function regularization_target(const SpectralModel& spec, double lambda,
                                 const L2Function& f_rho);

/// Kernel expansion of f_{lambda,mu*} on the quadrature nodes. Since
/// f_{lambda,mu*} = T((f_rho - f_{lambda,mu*}) / lambda), the coefficients are
/// w_m (f_rho - f_{lambda,mu*})(node_m) / lambda; exact in the discretization.
KernelExpansion regularization_expansion(const SpectralModel& spec, double lambda,
                                         const L2Function& f_rho);

// ||sum b_i psi_i||_{[H]^beta} = sqrt(sum b_i^2 / sigma_i^beta); errors when f
// has a component outside the retained span.
double h_beta_norm(const SpectralModel& spec, double beta, const L2Function& f);

double l2_norm_mu(const SpectralModel& spec, const L2Function& f);

double rkhs_norm(const KernelExpansion& expansion);

L2Function expansion_to_l2(const KernelExpansion& expansion, const SpectralModel& spec);

} // namespace ifsl
