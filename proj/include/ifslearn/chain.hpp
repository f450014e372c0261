#pragma once

#include "ifslearn/copula.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ifsl {

/// One realization of the i.i.d. random iteration scheme. Replayable: the same
/// seed and start point reproduce states bit for bit.
struct Trajectory {
    std::vector<Point> states;       // states[t], t = 0..T-1 (after the first step)
    std::vector<std::size_t> map_indices;
    std::uint64_t seed = 0;
    Point x0;
};

struct LabeledSample {
    Point x;
    double y = 0.0;
};

/// Probability masses on a uniform cells_per_axis x cells_per_axis partition.
struct CellHistogram {
    std::size_t cells_per_axis = 0;
    std::vector<std::vector<double>> masses; // masses[i][j], i along x

    static CellHistogram from_points(const std::vector<Point>& points,
                                     std::size_t cells_per_axis);
};

struct MixingEstimate {
    std::vector<double> d_curve; // d_curve[t] for t = 0..horizon
    std::size_t t_mix = 0;
    double epsilon = 0.25;
    std::size_t n_reps = 0;
};

struct MixingBoundsReport {
    bool decay_bound_ok = true;    // d(t) < 2^(1 - t/t_mix) for all t
    bool sum_bound_ok = true;      // sum_{t<T} d(t) <= 4 t_mix
    double decay_worst_margin = 0; // min over t of bound - d(t)
    double sum_margin = 0;         // 4 t_mix - sum
    std::size_t decay_first_violation = 0;

    bool all_ok() const { return decay_bound_ok && sum_bound_ok; }
};

Trajectory simulate_chain(const IfsSystem& ifs, Point x0, std::size_t T, std::uint64_t seed);

/// y_t = target(x_t) + e_t with e_t uniform on [-noise_level, noise_level].
std::vector<LabeledSample> attach_observations(const Trajectory& traj,
                                               const std::function<double(Point)>& target,
                                               double noise_level, double bound_M,
                                               std::uint64_t seed);

double tv_distance(const CellHistogram& p, const CellHistogram& q);

MixingEstimate estimate_mixing(const IfsSystem& ifs, std::size_t cells_per_axis, double epsilon,
                               std::size_t n_starts, std::size_t n_reps, std::size_t horizon,
                               std::uint64_t seed);

MixingBoundsReport check_mixing_bounds(const MixingEstimate& est, std::size_t T);

} // namespace ifsl
