#include "ifslearn/rkhs.hpp"
#include "ifslearn/errors.hpp"

#include <cmath>
#include <string>

namespace ifsl {

Kernel Kernel::gaussian(double width) {
    if (width <= 0.0) throw ValidationError("gaussian kernel: width must be positive");
    return Kernel(Family::gaussian, width, 0.0, 1.0);
}

Kernel Kernel::polynomial(int degree, double offset) {
    if (degree < 1) throw ValidationError("polynomial kernel: degree must be >= 1");
    if (offset < 0.0) throw ValidationError("polynomial kernel: offset must be >= 0");
    // sup over [0,1]^2 of k(x,x) is at x = (1,1).
    const double c_k = std::sqrt(std::pow(2.0 + offset, degree));
    return Kernel(Family::polynomial, static_cast<double>(degree), offset, c_k);
}

Kernel Kernel::constant(double value) {
    if (value <= 0.0) throw ValidationError("constant kernel: value must be positive");
    return Kernel(Family::constant, value, 0.0, std::sqrt(value));
}

double Kernel::operator()(Point a, Point b) const {
    switch (family_) {
    case Family::gaussian: {
        const double dx = a.x - b.x, dy = a.y - b.y;
        return std::exp(-(dx * dx + dy * dy) / (2.0 * p1_ * p1_));
    }
    case Family::polynomial:
        return std::pow(a.x * b.x + a.y * b.y + p2_, p1_);
    case Family::constant:
        return p1_;
    }
    return 0.0;
}

double KernelExpansion::evaluate(Point x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) acc += coeffs[i] * kernel(centers[i], x);
    return global_scale * acc;
}

Eigen::MatrixXd gram(const Kernel& kernel, const std::vector<Point>& points) {
    if (points.empty()) throw ValidationError("gram: no points");
    const Eigen::Index n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = kernel(points[static_cast<std::size_t>(i)],
                                    points[static_cast<std::size_t>(j)]);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

SpectralModel::SpectralModel(Kernel kernel, std::vector<Point> nodes, Eigen::VectorXd weights,
                             Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigvec_values)
    : kernel_(kernel), nodes_(std::move(nodes)), weights_(std::move(weights)),
      eigenvalues_(std::move(eigenvalues)), eigvec_values_(std::move(eigvec_values)) {}

double SpectralModel::inner(const L2Function& f, const L2Function& g) const {
    return (weights_.array() * f.array() * g.array()).sum();
}

Eigen::VectorXd SpectralModel::coefficients(const L2Function& f) const {
    return eigvec_values_.transpose() * (weights_.array() * f.array()).matrix();
}

L2Function SpectralModel::from_coefficients(const Eigen::VectorXd& coeffs) const {
    return eigvec_values_ * coeffs;
}

double SpectralModel::eval_eigenfunction(Eigen::Index i, Point x) const {
    double acc = 0.0;
    for (std::size_t m = 0; m < nodes_.size(); ++m) {
        const auto mi = static_cast<Eigen::Index>(m);
        if (weights_(mi) == 0.0) continue;
        acc += weights_(mi) * kernel_(x, nodes_[m]) * eigvec_values_(mi, i);
    }
    return acc / eigenvalues_(i);
}

double SpectralModel::eval_in_span(const Eigen::VectorXd& coeffs, Point x) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        if (coeffs(i) == 0.0) continue;
        acc += coeffs(i) * eval_eigenfunction(i, x);
    }
    return acc;
}

SpectralModel nystrom_spectrum(const Kernel& kernel, std::vector<Point> nodes,
                               Eigen::VectorXd weights) {
    const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
    if (n == 0) throw ValidationError("nystrom_spectrum: no nodes");
    if (weights.size() != n) throw ValidationError("nystrom_spectrum: node/weight size mismatch");
    if ((weights.array() < 0.0).any())
        throw ValidationError("nystrom_spectrum: negative quadrature weight");
    if (std::fabs(weights.sum() - 1.0) > 1e-10)
        throw ValidationError("nystrom_spectrum: weights must sum to 1");

    const Eigen::MatrixXd g = gram(kernel, nodes);
    const Eigen::VectorXd sqrt_w = weights.array().sqrt();
    const Eigen::MatrixXd symmetrized = sqrt_w.asDiagonal() * g * sqrt_w.asDiagonal();

    // The QR iteration occasionally reports no convergence on near-degenerate
    // spectra; a diagonal jitter far below every tolerance unsticks it.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized);
    double jitter = 1e-15 * symmetrized.diagonal().maxCoeff();
    for (int attempt = 0; solver.info() != Eigen::Success && attempt < 4; ++attempt) {
        Eigen::MatrixXd perturbed = symmetrized;
        perturbed.diagonal().array() += jitter;
        solver.compute(perturbed);
        jitter *= 100.0;
    }
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("nystrom_spectrum: eigendecomposition failed");

    // Eigen returns ascending order; keep eigenvalues above the truncation
    // threshold, largest first.
    const Eigen::VectorXd evals = solver.eigenvalues();
    const Eigen::MatrixXd evecs = solver.eigenvectors();
    const double sigma1 = evals(n - 1);
    if (sigma1 <= 0.0)
        throw ValidationError("nystrom_spectrum: all eigenvalues below truncation threshold");
    const double cutoff = 1e-12 * sigma1;

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = n - 1; i >= 0; --i)
        if (evals(i) > cutoff) keep.push_back(i);
    if (keep.empty())
        throw ValidationError("nystrom_spectrum: all eigenvalues below truncation threshold");

    const Eigen::Index r = static_cast<Eigen::Index>(keep.size());
    Eigen::VectorXd sigma(r);
    Eigen::MatrixXd psi(n, r);
    for (Eigen::Index idx = 0; idx < r; ++idx) {
        sigma(idx) = evals(keep[static_cast<std::size_t>(idx)]);
        psi.col(idx) = evecs.col(keep[static_cast<std::size_t>(idx)]);
    }
    // psi_i(node_m) = v_i[m] / sqrt(w_m) on positive-weight nodes; zero-weight
    // nodes get the Nystrom extension value in a second pass.
    for (Eigen::Index m = 0; m < n; ++m)
        if (weights(m) > 0.0) psi.row(m) /= sqrt_w(m);
    for (Eigen::Index m = 0; m < n; ++m) {
        if (weights(m) > 0.0) continue;
        for (Eigen::Index i = 0; i < r; ++i) {
            double acc = 0.0;
            for (Eigen::Index l = 0; l < n; ++l) {
                if (weights(l) == 0.0) continue;
                acc += weights(l) * g(m, l) * psi(l, i);
            }
            psi(m, i) = acc / sigma(i);
        }
    }

    return SpectralModel(kernel, std::move(nodes), std::move(weights), std::move(sigma),
                         std::move(psi));
}

SpectralModel build_spectral_model(const Kernel& kernel, const GridCopula& copula,
                                   std::size_t spectral_grid) {
    const std::size_t G = copula.grid_size();
    if (spectral_grid == 0 || G % spectral_grid != 0)
        throw ValidationError("build_spectral_model: copula grid must be a multiple of the "
                              "spectral grid");
    const std::size_t ratio = G / spectral_grid;

    std::vector<Point> nodes;
    Eigen::VectorXd weights(static_cast<Eigen::Index>(spectral_grid * spectral_grid));
    nodes.reserve(spectral_grid * spectral_grid);
    Eigen::Index idx = 0;
    for (std::size_t i = 0; i < spectral_grid; ++i) {
        for (std::size_t j = 0; j < spectral_grid; ++j) {
            nodes.push_back({(static_cast<double>(i) + 0.5) / static_cast<double>(spectral_grid),
                             (static_cast<double>(j) + 0.5) / static_cast<double>(spectral_grid)});
            double mass = 0.0;
            for (std::size_t a = 0; a < ratio; ++a)
                for (std::size_t b = 0; b < ratio; ++b)
                    mass += copula.cell_mass(i * ratio + a, j * ratio + b);
            weights(idx++) = std::max(mass, 0.0);
        }
    }
    weights /= weights.sum();
    return nystrom_spectrum(kernel, std::move(nodes), std::move(weights));
}

L2Function operator_power_apply(const SpectralModel& spec, double beta, const L2Function& f) {
    if (beta < 0.0) throw DomainError("operator_power_apply: beta must be >= 0");
    Eigen::VectorXd c = spec.coefficients(f);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::pow(spec.eigenvalues()(i), beta);
    return spec.from_coefficients(c);
}

L2Function resolvent_apply(const SpectralModel& spec, double lambda, const L2Function& f) {
    if (lambda <= 0.0) throw DomainError("resolvent_apply: lambda must be positive");
    const Eigen::VectorXd c = spec.coefficients(f);
    Eigen::VectorXd scaled = c;
    for (Eigen::Index i = 0; i < c.size(); ++i) scaled(i) /= (spec.eigenvalues()(i) + lambda);
    const L2Function in_span = spec.from_coefficients(scaled);
    const L2Function residual = f - spec.from_coefficients(c);
    return in_span + residual / lambda;
}

SourceTarget make_source_target(const SpectralModel& spec, double beta, const L2Function& g) {
    if (beta <= 0.0 || beta > 1.0)
        throw DomainError("make_source_target: beta must be in (0, 1]");
    SourceTarget out;
    out.f_rho = operator_power_apply(spec, beta, g);
    out.g_norm = l2_norm_mu(spec, g);
    return out;
}

L2Function regularization_target(const SpectralModel& spec, double lambda,
                                 const L2Function& f_rho) {
    if (lambda <= 0.0) throw DomainError("regularization_target: lambda must be positive");
    Eigen::VectorXd c = spec.coefficients(f_rho);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double s = spec.eigenvalues()(i);
        c(i) *= s / (s + lambda);
    }
    return spec.from_coefficients(c);
}

KernelExpansion regularization_expansion(const SpectralModel& spec, double lambda,
                                         const L2Function& f_rho) {
    if (lambda <= 0.0) throw DomainError("regularization_expansion: lambda must be positive");
    const L2Function f_lam = regularization_target(spec, lambda, f_rho);
    KernelExpansion out(spec.kernel());
    out.centers = spec.nodes();
    out.coeffs.resize(spec.n_nodes());
    for (std::size_t m = 0; m < spec.n_nodes(); ++m) {
        const auto mi = static_cast<Eigen::Index>(m);
        out.coeffs[m] = spec.weights()(mi) * (f_rho(mi) - f_lam(mi)) / lambda;
    }
    return out;
}

double h_beta_norm(const SpectralModel& spec, double beta, const L2Function& f) {
    const Eigen::VectorXd c = spec.coefficients(f);
    const L2Function residual = f - spec.from_coefficients(c);
    const double res_norm = l2_norm_mu(spec, residual);
    const double f_norm = l2_norm_mu(spec, f);
    if (res_norm > 1e-8 * std::max(1.0, f_norm))
        throw ValidationError("h_beta_norm: function has a component outside the span "
                              "(residual " +
                              std::to_string(res_norm) + ")");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i)
        acc += c(i) * c(i) / std::pow(spec.eigenvalues()(i), beta);
    return std::sqrt(acc);
}

double l2_norm_mu(const SpectralModel& spec, const L2Function& f) {
    return std::sqrt(std::max(0.0, spec.inner(f, f)));
}

double rkhs_norm(const KernelExpansion& expansion) {
    if (expansion.centers.empty()) return 0.0;
    const Eigen::MatrixXd g = gram(expansion.kernel, expansion.centers);
    const Eigen::Map<const Eigen::VectorXd> c(expansion.coeffs.data(),
                                              static_cast<Eigen::Index>(expansion.coeffs.size()));
    const double quad = c.dot(g * c);
    return std::fabs(expansion.global_scale) * std::sqrt(std::max(0.0, quad));
}

L2Function expansion_to_l2(const KernelExpansion& expansion, const SpectralModel& spec) {
    L2Function values(static_cast<Eigen::Index>(spec.n_nodes()));
    for (std::size_t m = 0; m < spec.n_nodes(); ++m)
        values(static_cast<Eigen::Index>(m)) = expansion.evaluate(spec.nodes()[m]);
    return values;
}

} // namespace ifsl
