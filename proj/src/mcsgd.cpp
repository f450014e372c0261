#include "ifslearn/mcsgd.hpp"
#include "ifslearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ifsl {

namespace {

std::vector<double> folded_coeffs(const KernelExpansion& f) {
    std::vector<double> out(f.coeffs.size());
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) out[i] = f.global_scale * f.coeffs[i];
    return out;
}

} // namespace

SgdConfig SgdConfig::create(double theta, double lambda, std::size_t T, double bound_M,
                            Kernel kernel, std::size_t t_star) {
    if (theta <= 0.5 || theta > 1.0)
        throw ValidationError("sgd config: theta must be in (1/2, 1]");
    if (lambda <= 0.0) throw ValidationError("sgd config: lambda must be positive");
    if (T < 1) throw ValidationError("sgd config: T must be >= 1");
    if (bound_M <= 0.0) throw ValidationError("sgd config: M must be positive");
    if (t_star < 1) throw ValidationError("sgd config: t_star must be >= 1");

    SgdConfig cfg;
    cfg.theta = theta;
    cfg.lambda = lambda;
    cfg.T = T;
    cfg.bound_M = bound_M;
    cfg.kernel = kernel;
    cfg.t_star = t_star;
    const double ck = kernel.sup_sqrt_diag();
    cfg.alpha = lambda;
    cfg.eta = lambda + ck * ck;
    cfg.kappa = cfg.alpha / cfg.eta;
    return cfg;
}

double SgdConfig::step_size(std::size_t t) const {
    if (t < 1) throw ValidationError("step_size: t must be >= 1");
    return (alpha / (eta * eta)) * std::pow(static_cast<double>(t), -theta);
}

KernelExpansion sgd_step(const KernelExpansion& f, const LabeledSample& z, double gamma,
                         double lambda) {
    if (gamma * lambda >= 1.0)
        throw DomainError("sgd_step: gamma * lambda must be < 1 (got " +
                          std::to_string(gamma * lambda) + ")");
    const double residual = f.evaluate(z.x) - z.y;
    KernelExpansion next = f;
    next.global_scale *= (1.0 - gamma * lambda);
    next.centers.push_back(z.x);
    next.coeffs.push_back(-gamma * residual / next.global_scale);
    return next;
}

IterateTrace run_mcsgd(const std::vector<LabeledSample>& samples, const SgdConfig& config,
                       const KernelExpansion& f1, const SpectralModel& spec,
                       const L2Function& f_target) {
    if (samples.size() < config.T)
        throw ValidationError("run_mcsgd: need at least T samples");
    if (f_target.size() != static_cast<Eigen::Index>(spec.n_nodes()))
        throw ValidationError("run_mcsgd: f_target size does not match quadrature nodes");

    KernelExpansion f = f1;
    L2Function node_values = expansion_to_l2(f1, spec);
    double rkhs_sq = rkhs_norm(f1);
    rkhs_sq *= rkhs_sq;

    IterateTrace trace;
    trace.records.reserve(config.T);
    for (std::size_t t = 1; t <= config.T; ++t) {
        const LabeledSample& z = samples[t - 1];
        const double fx = f.evaluate(z.x);
        const double residual = fx - z.y;
        const double gamma = config.step_size(t);

        IterateRecord rec;
        rec.t = t;
        rec.gamma = gamma;
        rec.residual = residual;
        const L2Function diff = node_values - f_target;
        rec.l2_error = l2_norm_mu(spec, diff);
        rec.rkhs_norm = std::sqrt(std::max(0.0, rkhs_sq));
        trace.records.push_back(rec);

        if (t == config.T) break;
        const double shrink = 1.0 - gamma * config.lambda;
        if (shrink <= 0.0) throw DomainError("run_mcsgd: gamma * lambda must be < 1");
        const double kxx = config.kernel(z.x, z.x);
        rkhs_sq = shrink * shrink * rkhs_sq - 2.0 * shrink * gamma * residual * fx +
                  gamma * gamma * residual * residual * kxx;
        for (std::size_t m = 0; m < spec.n_nodes(); ++m) {
            const auto mi = static_cast<Eigen::Index>(m);
            node_values(mi) = shrink * node_values(mi) -
                              gamma * residual * config.kernel(z.x, spec.nodes()[m]);
        }
        f.global_scale *= shrink;
        f.centers.push_back(z.x);
        f.coeffs.push_back(-gamma * residual / f.global_scale);
    }
    trace.final_expansion = f;
    return trace;
}

IterateTrace run_frozen_twin(const std::vector<LabeledSample>& samples, const SgdConfig& config,
                             const KernelExpansion& f1_prime, const KernelExpansion& w_star,
                             const SpectralModel& spec) {
    if (samples.size() < config.T)
        throw ValidationError("run_frozen_twin: need at least T samples");

    const L2Function w_star_values = expansion_to_l2(w_star, spec);
    const double w_star_sq = [&] {
        const double n = rkhs_norm(w_star);
        return n * n;
    }();
    const double lambda = config.lambda;

    // State: acc + a * w_star, with node values and norms tracked incrementally.
    KernelExpansion acc = f1_prime;
    double a = 0.0;
    L2Function node_values = expansion_to_l2(f1_prime, spec);
    double sq = rkhs_norm(f1_prime);
    sq *= sq;
    double wdot = rkhs_inner(f1_prime, w_star); // <w', w_star>
    bool clamped = false;

    IterateTrace trace;
    trace.records.reserve(config.T);
    for (std::size_t t = 1; t <= config.T; ++t) {
        if (!clamped && t >= config.t_star) {
            acc = KernelExpansion(config.kernel);
            a = 1.0;
            node_values = w_star_values;
            sq = w_star_sq;
            wdot = w_star_sq;
            clamped = true;
        }
        const LabeledSample& z = samples[t - 1];
        const double wx_star = w_star.evaluate(z.x);
        const double wx = clamped ? wx_star : acc.evaluate(z.x) + a * wx_star;

        IterateRecord rec;
        rec.t = t;
        rec.gamma = config.step_size(t);
        rec.residual = wx - z.y;
        const L2Function diff = node_values - w_star_values;
        rec.l2_error = l2_norm_mu(spec, diff);
        rec.rkhs_norm = std::sqrt(std::max(0.0, sq));
        trace.records.push_back(rec);

        if (t == config.T || clamped) continue;
        const double gamma = rec.gamma;
        const double r_star = wx_star - z.y;
        const double kxx = config.kernel(z.x, z.x);
        // gradient g = r_star k_x + lambda w_star
        const double wg = r_star * wx + lambda * wdot;
        const double gg = r_star * r_star * kxx + 2.0 * lambda * r_star * wx_star +
                          lambda * lambda * w_star_sq;
        sq = sq - 2.0 * gamma * wg + gamma * gamma * gg;
        wdot -= gamma * (r_star * wx_star + lambda * w_star_sq);
        for (std::size_t m = 0; m < spec.n_nodes(); ++m) {
            const auto mi = static_cast<Eigen::Index>(m);
            node_values(mi) -= gamma * r_star * config.kernel(z.x, spec.nodes()[m]) +
                               gamma * lambda * w_star_values(mi);
        }
        acc.centers.push_back(z.x);
        acc.coeffs.push_back(-gamma * r_star / acc.global_scale);
        a -= gamma * lambda;
    }
    trace.final_expansion = clamped ? w_star : axpy(1.0, acc, a, w_star);
    return trace;
}

PairedRun run_paired(const std::vector<LabeledSample>& samples, const SgdConfig& config,
                     const KernelExpansion& f1, const KernelExpansion& f1_prime,
                     const KernelExpansion& w_star, const SpectralModel& spec) {
    if (samples.size() < config.T)
        throw ValidationError("run_paired: need at least T samples");

    const double lambda = config.lambda;
    const Kernel& kernel = config.kernel;

    // Coefficient vectors for D = w - w' and E = w' - w_star over the shared
    // center list [f1 | f1' | w_star | x_1, x_2, ...].
    std::vector<Point> centers;
    std::vector<double> dc, ec;
    const std::vector<double> f1_fold = folded_coeffs(f1);
    const std::vector<double> f1p_fold = folded_coeffs(f1_prime);
    const std::vector<double> w_fold = folded_coeffs(w_star);
    centers.reserve(f1.size() + f1_prime.size() + w_star.size() + config.T);
    centers.insert(centers.end(), f1.centers.begin(), f1.centers.end());
    centers.insert(centers.end(), f1_prime.centers.begin(), f1_prime.centers.end());
    const std::size_t w_offset = centers.size();
    centers.insert(centers.end(), w_star.centers.begin(), w_star.centers.end());
    dc.assign(centers.size(), 0.0);
    ec.assign(centers.size(), 0.0);
    for (std::size_t i = 0; i < f1_fold.size(); ++i) dc[i] = f1_fold[i];
    for (std::size_t i = 0; i < f1p_fold.size(); ++i) {
        dc[f1.size() + i] -= f1p_fold[i];
        ec[f1.size() + i] += f1p_fold[i];
    }
    for (std::size_t i = 0; i < w_fold.size(); ++i) ec[w_offset + i] -= w_fold[i];

    // Tracked inner products: a = <D,D>, b = <D,E>, c = <E,E>, p = <D,w*>,
    // q = <E,w*>, s = <w*,w*>.
    const KernelExpansion d1 = axpy(1.0, f1, -1.0, f1_prime);
    const KernelExpansion e1 = axpy(1.0, f1_prime, -1.0, w_star);
    double ip_a = rkhs_inner(d1, d1);
    double ip_b = rkhs_inner(d1, e1);
    double ip_c = rkhs_inner(e1, e1);
    double ip_p = rkhs_inner(d1, w_star);
    double ip_q = rkhs_inner(e1, w_star);
    const double ip_s = rkhs_inner(w_star, w_star);

    const L2Function w_star_values = expansion_to_l2(w_star, spec);
    L2Function dn = expansion_to_l2(d1, spec);
    L2Function en = expansion_to_l2(e1, spec);

    PairedRun run;
    run.dist_sq.reserve(config.T);
    run.twin_dist_sq.reserve(config.T);
    run.l2_dist_sq.reserve(config.T);
    std::vector<double> kv;
    for (std::size_t t = 1; t <= config.T; ++t) {
        run.dist_sq.push_back(std::max(0.0, ip_a));
        run.twin_dist_sq.push_back(std::max(0.0, ip_c));
        run.l2_dist_sq.push_back(std::max(0.0, spec.inner(dn, dn)));
        if (t == config.T) break;

        const LabeledSample& z = samples[t - 1];
        kv.resize(centers.size());
        for (std::size_t j = 0; j < centers.size(); ++j) kv[j] = kernel(centers[j], z.x);
        double dx = 0.0, ex = 0.0;
        for (std::size_t j = 0; j < centers.size(); ++j) {
            dx += dc[j] * kv[j];
            ex += ec[j] * kv[j];
        }
        const double wx = w_star.evaluate(z.x);
        const double kxx = kernel(z.x, z.x);
        const double gamma = config.step_size(t);
        const double r_star = wx - z.y;
        const double u = dx + ex; // w_t(x_t) - w_star(x_t)

        // D <- A D + B E + C k_x,  E <- E + F k_x + H w_star
        const double ca = 1.0 - gamma * lambda;
        if (ca <= 0.0) throw DomainError("run_paired: gamma * lambda must be < 1");
        const double cb = -gamma * lambda;
        const double cc = -gamma * u;
        const double cf = -gamma * r_star;
        const double ch = -gamma * lambda;

        const double na = ca * ca * ip_a + cb * cb * ip_c + cc * cc * kxx +
                          2.0 * ca * cb * ip_b + 2.0 * ca * cc * dx + 2.0 * cb * cc * ex;
        const double nb = ca * ip_b + ca * cf * dx + ca * ch * ip_p + cb * ip_c +
                          cb * cf * ex + cb * ch * ip_q + cc * ex + cc * cf * kxx +
                          cc * ch * wx;
        const double nc = ip_c + cf * cf * kxx + ch * ch * ip_s + 2.0 * cf * ex +
                          2.0 * ch * ip_q + 2.0 * cf * ch * wx;
        const double np = ca * ip_p + cb * ip_q + cc * wx;
        const double nq = ip_q + cf * wx + ch * ip_s;
        ip_a = na;
        ip_b = nb;
        ip_c = nc;
        ip_p = np;
        ip_q = nq;

        for (std::size_t j = 0; j < centers.size(); ++j) dc[j] = ca * dc[j] + cb * ec[j];
        for (std::size_t i = 0; i < w_fold.size(); ++i) ec[w_offset + i] += ch * w_fold[i];
        centers.push_back(z.x);
        dc.push_back(cc);
        ec.push_back(cf);

        for (std::size_t m = 0; m < spec.n_nodes(); ++m) {
            const auto mi = static_cast<Eigen::Index>(m);
            const double km = kernel(z.x, spec.nodes()[m]);
            const double dn_new = ca * dn(mi) + cb * en(mi) + cc * km;
            en(mi) += cf * km + ch * w_star_values(mi);
            dn(mi) = dn_new;
        }
    }
    return run;
}

RecursionReport check_recursion_inequality(const PairedRun& run, const SgdConfig& config) {
    RecursionReport report;
    report.worst_slack = std::numeric_limits<double>::infinity();
    const double kappa_sq = config.kappa * config.kappa;
    for (std::size_t t = 1; t + 1 <= run.dist_sq.size(); ++t) {
        const double tt = std::pow(static_cast<double>(t), -config.theta);
        const double rhs =
            (1.0 - kappa_sq * tt) * run.dist_sq[t - 1] + tt * run.twin_dist_sq[t - 1];
        const double slack = rhs - run.dist_sq[t];
        if (slack < report.worst_slack) report.worst_slack = slack;
        if (slack < -1e-10 * std::max(1.0, rhs) && report.ok) {
            report.ok = false;
            report.first_violation = t;
        }
    }
    return report;
}

double QuadraticPotential::value(const LabeledSample& z, const KernelExpansion& f) const {
    const double r = f.evaluate(z.x) - z.y;
    const double n = rkhs_norm(f);
    return 0.5 * (r * r + lambda * n * n);
}

KernelExpansion QuadraticPotential::grad(const LabeledSample& z, const KernelExpansion& f) const {
    const double r = f.evaluate(z.x) - z.y;
    KernelExpansion g(kernel);
    g.centers.reserve(f.size() + 1);
    g.coeffs.reserve(f.size() + 1);
    for (std::size_t i = 0; i < f.size(); ++i) {
        g.centers.push_back(f.centers[i]);
        g.coeffs.push_back(lambda * f.global_scale * f.coeffs[i]);
    }
    g.centers.push_back(z.x);
    g.coeffs.push_back(r);
    return g;
}

double QuadraticPotential::grad_norm(const LabeledSample& z, const KernelExpansion& f) const {
    const double r = f.evaluate(z.x) - z.y;
    const double fx = f.evaluate(z.x);
    const double n = rkhs_norm(f);
    const double sq = r * r * kernel(z.x, z.x) + 2.0 * lambda * r * fx + lambda * lambda * n * n;
    return std::sqrt(std::max(0.0, sq));
}

KernelExpansion axpy(double a, const KernelExpansion& x, double b, const KernelExpansion& y) {
    KernelExpansion out(x.kernel);
    out.centers.reserve(x.size() + y.size());
    out.coeffs.reserve(x.size() + y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.centers.push_back(x.centers[i]);
        out.coeffs.push_back(a * x.global_scale * x.coeffs[i]);
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        out.centers.push_back(y.centers[i]);
        out.coeffs.push_back(b * y.global_scale * y.coeffs[i]);
    }
    return out;
}

double rkhs_inner(const KernelExpansion& a, const KernelExpansion& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            acc += a.coeffs[i] * b.coeffs[j] * a.kernel(a.centers[i], b.centers[j]);
    return a.global_scale * b.global_scale * acc;
}

double bregman(const QuadraticPotential& potential, const LabeledSample& z,
               const KernelExpansion& x, const KernelExpansion& y) {
    const KernelExpansion diff = axpy(1.0, x, -1.0, y);
    const KernelExpansion gy = potential.grad(z, y);
    return potential.value(z, x) - potential.value(z, y) - rkhs_inner(gy, diff);
}

double three_point_check(const QuadraticPotential& potential, const LabeledSample& z,
                         const KernelExpansion& x, const KernelExpansion& y,
                         const KernelExpansion& w) {
    const KernelExpansion diff = axpy(1.0, x, -1.0, y);
    const KernelExpansion grad_diff =
        axpy(1.0, potential.grad(z, w), -1.0, potential.grad(z, y));
    return bregman(potential, z, x, y) + bregman(potential, z, y, w) -
           bregman(potential, z, x, w) - rkhs_inner(grad_diff, diff);
}

double gradient_check(const QuadraticPotential& potential, const LabeledSample& z,
                      const KernelExpansion& w, const KernelExpansion& u, double h) {
    if (h <= 0.0) throw ValidationError("gradient_check: h must be positive");
    const double lhs = rkhs_inner(potential.grad(z, w), u);
    const double plus = potential.value(z, axpy(1.0, w, h, u));
    const double minus = potential.value(z, axpy(1.0, w, -h, u));
    const double rhs = (plus - minus) / (2.0 * h);
    if (lhs == 0.0 && rhs == 0.0) return 0.0;
    return std::fabs(lhs - rhs) / std::max(1.0, std::fabs(lhs));
}

double convexity_probe(const QuadraticPotential& potential, const LabeledSample& z,
                       const KernelExpansion& w, const KernelExpansion& u) {
    (void)w; // the potential is quadratic: the ratio is independent of the base point
    const double ux = u.evaluate(z.x);
    const double un = rkhs_norm(u);
    if (un == 0.0) throw ValidationError("convexity_probe: direction must be nonzero");
    return (ux * ux + potential.lambda * un * un) / (un * un);
}

} // namespace ifsl
