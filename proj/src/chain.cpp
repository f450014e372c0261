#include "ifslearn/chain.hpp"
#include "ifslearn/errors.hpp"
#include "ifslearn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ifsl {

namespace {

std::size_t pick_map(const std::vector<double>& cumulative, double u) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    return std::min(idx, cumulative.size() - 1);
}

std::vector<double> cumulative_probs(const IfsSystem& ifs) {
    std::vector<double> cum(ifs.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < ifs.probs.size(); ++i) {
        acc += ifs.probs[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;
    return cum;
}

} // namespace

Trajectory simulate_chain(const IfsSystem& ifs, Point x0, std::size_t T, std::uint64_t seed) {
    if (T < 1) throw ValidationError("simulate_chain: T must be >= 1");
    if (x0.x < 0.0 || x0.x > 1.0 || x0.y < 0.0 || x0.y > 1.0)
        throw ValidationError("simulate_chain: x0 outside the unit square");

    Trajectory traj;
    traj.seed = seed;
    traj.x0 = x0;
    traj.states.reserve(T);
    traj.map_indices.reserve(T);

    const std::vector<double> cum = cumulative_probs(ifs);
    Rng rng(derive_seed(seed, Stream::map_choice));
    Point x = x0;
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t k = pick_map(cum, rng.next_double());
        x = ifs.maps[k](x);
        traj.map_indices.push_back(k);
        traj.states.push_back(x);
    }
    return traj;
}

std::vector<LabeledSample> attach_observations(const Trajectory& traj,
                                               const std::function<double(Point)>& target,
                                               double noise_level, double bound_M,
                                               std::uint64_t seed) {
    if (bound_M <= 0.0) throw ValidationError("attach_observations: M must be positive");
    if (noise_level < 0.0) throw ValidationError("attach_observations: negative noise level");

    Rng rng(derive_seed(seed, Stream::observation_noise));
    std::vector<LabeledSample> samples;
    samples.reserve(traj.states.size());
    for (const Point& x : traj.states) {
        const double clean = target(x);
        if (std::fabs(clean) + noise_level > bound_M + 1e-12)
            throw ValidationError("attach_observations: |target| + noise exceeds M at (" +
                                  std::to_string(x.x) + ", " + std::to_string(x.y) + ")");
        const double y = clean + (noise_level > 0.0 ? rng.next_symmetric(noise_level) : 0.0);
        samples.push_back({x, y});
    }
    return samples;
}

CellHistogram CellHistogram::from_points(const std::vector<Point>& points,
                                         std::size_t cells_per_axis) {
    if (cells_per_axis == 0) throw ValidationError("cell histogram: cells_per_axis must be >= 1");
    CellHistogram hist;
    hist.cells_per_axis = cells_per_axis;
    hist.masses.assign(cells_per_axis, std::vector<double>(cells_per_axis, 0.0));
    if (points.empty()) return hist;
    const double w = 1.0 / static_cast<double>(points.size());
    const double n = static_cast<double>(cells_per_axis);
    for (const Point& p : points) {
        const auto i = static_cast<std::size_t>(std::clamp(std::floor(p.x * n), 0.0, n - 1.0));
        const auto j = static_cast<std::size_t>(std::clamp(std::floor(p.y * n), 0.0, n - 1.0));
        hist.masses[i][j] += w;
    }
    return hist;
}

double tv_distance(const CellHistogram& p, const CellHistogram& q) {
    if (p.cells_per_axis != q.cells_per_axis)
        throw ValidationError("tv_distance: mismatched discretizations");
    double l1 = 0.0;
    for (std::size_t i = 0; i < p.cells_per_axis; ++i)
        for (std::size_t j = 0; j < p.cells_per_axis; ++j)
            l1 += std::fabs(p.masses[i][j] - q.masses[i][j]);
    return 0.5 * l1;
}

MixingEstimate estimate_mixing(const IfsSystem& ifs, std::size_t cells_per_axis, double epsilon,
                               std::size_t n_starts, std::size_t n_reps, std::size_t horizon,
                               std::uint64_t seed) {
    if (epsilon <= 0.0 || epsilon > 1.0)
        throw ValidationError("estimate_mixing: epsilon must be in (0, 1]");
    if (horizon < 1) throw ValidationError("estimate_mixing: horizon must be >= 1");
    if (n_starts < 1 || n_reps < 1)
        throw ValidationError("estimate_mixing: n_starts and n_reps must be >= 1");

    // Reference: cell histogram of one long run, discarding a burn-in of at
    // least the horizon.
    const std::size_t burn_in = std::max<std::size_t>(horizon, 1000);
    const std::size_t ref_len = burn_in + 100000;
    const Trajectory ref = simulate_chain(ifs, {0.5, 0.5}, ref_len,
                                          derive_seed(seed, Stream::mixing_base));
    const std::vector<Point> stationary(ref.states.begin() + static_cast<long>(burn_in),
                                        ref.states.end());

    // Discretize on the IFS breakpoint partition when it matches the requested
    // cell count (the one-step kernel is piecewise constant on those cells),
    // otherwise on a uniform grid.
    const bool use_breaks = ifs.col_breaks.size() == cells_per_axis + 1 &&
                            ifs.row_breaks.size() == cells_per_axis + 1;
    auto bin = [&](const std::vector<Point>& points) {
        if (!use_breaks) return CellHistogram::from_points(points, cells_per_axis);
        CellHistogram hist;
        hist.cells_per_axis = cells_per_axis;
        hist.masses.assign(cells_per_axis, std::vector<double>(cells_per_axis, 0.0));
        if (points.empty()) return hist;
        const double w = 1.0 / static_cast<double>(points.size());
        auto index = [cells_per_axis](const std::vector<double>& breaks, double v) {
            std::size_t i = 0;
            while (i + 1 < cells_per_axis && v >= breaks[i + 1]) ++i;
            return i;
        };
        for (const Point& p : points)
            hist.masses[index(ifs.col_breaks, p.x)][index(ifs.row_breaks, p.y)] += w;
        return hist;
    };
    const CellHistogram rho_hat = bin(stationary);

    const std::vector<double> cum = cumulative_probs(ifs);
    std::vector<double> d_curve(horizon + 1, 0.0);
    for (std::size_t s = 0; s < n_starts; ++s) {
        // Deterministic spread of point-mass initial states.
        const double fs = static_cast<double>(s);
        const Point x0{(fs + 0.5) / static_cast<double>(n_starts),
                       std::fmod(0.5 + fs * 0.6180339887498949, 1.0)};
        // positions[t][r]: state of replicate r after t steps.
        std::vector<std::vector<Point>> positions(horizon + 1,
                                                  std::vector<Point>(n_reps));
        for (std::size_t r = 0; r < n_reps; ++r) {
            Rng rng(derive_seed(seed, Stream::mixing_base, 1 + s * n_reps + r));
            Point x = x0;
            positions[0][r] = x;
            for (std::size_t t = 1; t <= horizon; ++t) {
                x = ifs.maps[pick_map(cum, rng.next_double())](x);
                positions[t][r] = x;
            }
        }
        for (std::size_t t = 0; t <= horizon; ++t) {
            const CellHistogram h = bin(positions[t]);
            d_curve[t] = std::max(d_curve[t], tv_distance(h, rho_hat));
        }
    }

    MixingEstimate est;
    est.d_curve = d_curve;
    est.epsilon = epsilon;
    est.n_reps = n_reps;
    bool mixed = false;
    for (std::size_t t = 0; t <= horizon; ++t) {
        if (d_curve[t] <= epsilon) {
            est.t_mix = t;
            mixed = true;
            break;
        }
    }
    if (!mixed)
        throw NotMixedError("estimate_mixing: not mixed within horizon " +
                                std::to_string(horizon) + " (d(horizon) = " +
                                std::to_string(d_curve[horizon]) + ")",
                            d_curve);
    return est;
}

MixingBoundsReport check_mixing_bounds(const MixingEstimate& est, std::size_t T) {
    MixingBoundsReport report;
    // t_mix = 0 only occurs for epsilon = 1, where the decay bound is vacuous.
    const double t_mix = static_cast<double>(std::max<std::size_t>(est.t_mix, 1));
    report.decay_worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < est.d_curve.size(); ++t) {
        const double bound = std::exp2(1.0 - static_cast<double>(t) / t_mix);
        const double margin = bound - est.d_curve[t];
        if (margin < report.decay_worst_margin) report.decay_worst_margin = margin;
        if (est.d_curve[t] >= bound && report.decay_bound_ok) {
            report.decay_bound_ok = false;
            report.decay_first_violation = t;
        }
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < std::min<std::size_t>(T, est.d_curve.size()); ++t)
        sum += est.d_curve[t];
    report.sum_margin = 4.0 * t_mix - sum;
    report.sum_bound_ok = report.sum_margin >= 0.0;
    return report;
}

} // namespace ifsl
