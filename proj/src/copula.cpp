#include "ifslearn/copula.hpp"
#include "ifslearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

namespace ifsl {

namespace {

std::string cell_name(std::size_t i, std::size_t j) {
    return "(col " + std::to_string(i + 1) + ", row " + std::to_string(j + 1) + ")";
}

} // namespace

TransformationMatrix::TransformationMatrix(std::vector<std::vector<double>> rows_bottom_to_top)
    : entries_(std::move(rows_bottom_to_top)) {
    rows_ = entries_.size();
    if (rows_ == 0) throw ValidationError("transformation matrix: no rows");
    cols_ = entries_[0].size();
    if (cols_ == 0) throw ValidationError("transformation matrix: no columns");

    double total = 0.0;
    std::vector<double> row_sum(rows_, 0.0), col_sum(cols_, 0.0);
    for (std::size_t j = 0; j < rows_; ++j) {
        if (entries_[j].size() != cols_)
            throw ValidationError("transformation matrix: ragged rows");
        for (std::size_t i = 0; i < cols_; ++i) {
            const double u = entries_[j][i];
            if (u < 0.0)
                throw ValidationError("transformation matrix: negative entry at " + cell_name(i, j));
            total += u;
            row_sum[j] += u;
            col_sum[i] += u;
        }
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw ValidationError("transformation matrix: entries sum to " + std::to_string(total) +
                              ", expected 1");
    for (std::size_t j = 0; j < rows_; ++j)
        if (row_sum[j] == 0.0)
            throw ValidationError("transformation matrix: row " + std::to_string(j + 1) +
                                  " all-zero");
    for (std::size_t i = 0; i < cols_; ++i)
        if (col_sum[i] == 0.0)
            throw ValidationError("transformation matrix: column " + std::to_string(i + 1) +
                                  " all-zero");
}

TransformationMatrix TransformationMatrix::uniform(std::size_t rows, std::size_t cols) {
    const double u = 1.0 / static_cast<double>(rows * cols);
    return TransformationMatrix(
        std::vector<std::vector<double>>(rows, std::vector<double>(cols, u)));
}

IfsSystem build_ifs(const TransformationMatrix& matrix) {
    IfsSystem ifs;
    const std::size_t R = matrix.rows(), C = matrix.cols();

    ifs.col_breaks.assign(C + 1, 0.0);
    for (std::size_t i = 0; i < C; ++i) {
        double col_sum = 0.0;
        for (std::size_t j = 0; j < R; ++j) col_sum += matrix.entry(i, j);
        ifs.col_breaks[i + 1] = ifs.col_breaks[i] + col_sum;
    }
    ifs.row_breaks.assign(R + 1, 0.0);
    for (std::size_t j = 0; j < R; ++j) {
        double row_sum = 0.0;
        for (std::size_t i = 0; i < C; ++i) row_sum += matrix.entry(i, j);
        ifs.row_breaks[j + 1] = ifs.row_breaks[j] + row_sum;
    }
    ifs.col_breaks[C] = 1.0;
    ifs.row_breaks[R] = 1.0;

    for (std::size_t j = 0; j < R; ++j) {
        for (std::size_t i = 0; i < C; ++i) {
            const double u = matrix.entry(i, j);
            if (u <= 0.0) continue;
            AffineMap map;
            map.x_offset = ifs.col_breaks[i];
            map.x_scale = ifs.col_breaks[i + 1] - ifs.col_breaks[i];
            map.y_offset = ifs.row_breaks[j];
            map.y_scale = ifs.row_breaks[j + 1] - ifs.row_breaks[j];
            ifs.maps.push_back(map);
            ifs.probs.push_back(u);
        }
    }
    return ifs;
}

GridCopula::GridCopula(std::size_t grid_size, std::vector<std::vector<double>> values)
    : grid_size_(grid_size), values_(std::move(values)) {
    if (grid_size_ == 0) throw ValidationError("grid copula: grid size must be positive");
    if (values_.size() != grid_size_ + 1)
        throw ValidationError("grid copula: value table has wrong row count");
    for (const auto& row : values_)
        if (row.size() != grid_size_ + 1)
            throw ValidationError("grid copula: value table has wrong column count");
}

double GridCopula::cell_mass(std::size_t p, std::size_t q) const {
    return values_[p + 1][q + 1] - values_[p][q + 1] - values_[p + 1][q] + values_[p][q];
}

void GridCopula::check_axioms() const {
    const std::size_t G = grid_size_;
    for (std::size_t p = 0; p <= G; ++p) {
        if (std::fabs(values_[p][0]) > 1e-12 || std::fabs(values_[0][p]) > 1e-12)
            throw ValidationError("grid copula: groundedness violated");
        const double u = static_cast<double>(p) / static_cast<double>(G);
        if (std::fabs(values_[G][p] - u) > 1e-10 || std::fabs(values_[p][G] - u) > 1e-10)
            throw ValidationError("grid copula: uniform margins violated");
    }
    for (std::size_t p = 0; p < G; ++p)
        for (std::size_t q = 0; q < G; ++q)
            if (cell_mass(p, q) < -1e-12)
                throw ValidationError("grid copula: 2-increasingness violated");
    for (std::size_t p = 0; p <= G; ++p) {
        for (std::size_t q = 0; q <= G; ++q) {
            const double u = static_cast<double>(p) / static_cast<double>(G);
            const double v = static_cast<double>(q) / static_cast<double>(G);
            const double c = values_[p][q];
            if (c < std::max(u + v - 1.0, 0.0) - 1e-10 || c > std::min(u, v) + 1e-10)
                throw ValidationError("grid copula: Frechet bounds violated");
        }
    }
}

namespace {

using MassGrid = std::vector<std::vector<double>>; // masses[p][q], p along x

// Per source index, the destination indices and fractions of an affine image
// interval split by grid lines. Exact for a piecewise-uniform density.
struct IntervalSplit {
    std::vector<std::pair<std::size_t, double>> parts;
};

std::vector<IntervalSplit> split_axis(std::size_t G, double offset, double scale) {
    std::vector<IntervalSplit> splits(G);
    const double h = 1.0 / static_cast<double>(G);
    for (std::size_t p = 0; p < G; ++p) {
        const double lo = offset + scale * (static_cast<double>(p) * h);
        const double hi = offset + scale * (static_cast<double>(p + 1) * h);
        const double width = hi - lo;
        auto first = static_cast<std::size_t>(std::clamp(std::floor(lo * G), 0.0, double(G - 1)));
        auto last = static_cast<std::size_t>(std::clamp(std::ceil(hi * G) - 1.0, 0.0, double(G - 1)));
        for (std::size_t d = first; d <= last; ++d) {
            const double a = std::max(lo, static_cast<double>(d) * h);
            const double b = std::min(hi, static_cast<double>(d + 1) * h);
            if (b > a) splits[p].parts.emplace_back(d, (b - a) / width);
        }
    }
    return splits;
}

MassGrid apply_push_forward(const IfsSystem& ifs,
                            const std::vector<std::vector<IntervalSplit>>& x_splits,
                            const std::vector<std::vector<IntervalSplit>>& y_splits,
                            const MassGrid& masses, std::size_t G) {
    MassGrid next(G, std::vector<double>(G, 0.0));
    for (std::size_t m = 0; m < ifs.maps.size(); ++m) {
        const double prob = ifs.probs[m];
        const auto& xs = x_splits[m];
        const auto& ys = y_splits[m];
        for (std::size_t p = 0; p < G; ++p) {
            for (std::size_t q = 0; q < G; ++q) {
                const double mass = masses[p][q] * prob;
                if (mass == 0.0) continue;
                for (const auto& [dx, fx] : xs[p].parts)
                    for (const auto& [dy, fy] : ys[q].parts)
                        next[dx][dy] += mass * fx * fy;
            }
        }
    }
    return next;
}

std::vector<std::vector<double>> cumulative_grid(const MassGrid& masses, std::size_t G) {
    std::vector<std::vector<double>> values(G + 1, std::vector<double>(G + 1, 0.0));
    for (std::size_t p = 1; p <= G; ++p)
        for (std::size_t q = 1; q <= G; ++q)
            values[p][q] = masses[p - 1][q - 1] + values[p - 1][q] + values[p][q - 1] -
                           values[p - 1][q - 1];
    return values;
}

double sup_diff(const std::vector<std::vector<double>>& a,
                const std::vector<std::vector<double>>& b) {
    double worst = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p)
        for (std::size_t q = 0; q < a.size(); ++q)
            worst = std::max(worst, std::fabs(a[p][q] - b[p][q]));
    return worst;
}

} // namespace

GridCopula invariant_copula(const TransformationMatrix& matrix, std::size_t grid_size, double tol,
                            std::size_t max_iter) {
    if (grid_size < 8) throw ValidationError("invariant_copula: grid size must be >= 8");
    if (tol <= 0.0) throw ValidationError("invariant_copula: tol must be positive");
    const std::size_t G = grid_size;
    const IfsSystem ifs = build_ifs(matrix);

    std::vector<std::vector<IntervalSplit>> x_splits, y_splits;
    x_splits.reserve(ifs.maps.size());
    y_splits.reserve(ifs.maps.size());
    for (const auto& map : ifs.maps) {
        x_splits.push_back(split_axis(G, map.x_offset, map.x_scale));
        y_splits.push_back(split_axis(G, map.y_offset, map.y_scale));
    }

    const double cell_mass = 1.0 / static_cast<double>(G * G);
    MassGrid masses(G, std::vector<double>(G, cell_mass));
    auto values = cumulative_grid(masses, G);

    double gap = 0.0;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        masses = apply_push_forward(ifs, x_splits, y_splits, masses, G);
        auto next_values = cumulative_grid(masses, G);
        gap = sup_diff(values, next_values);
        values = std::move(next_values);
        if (gap < tol) return GridCopula(G, std::move(values));
    }
    throw ConvergenceError("invariant_copula: no fixed point within " + std::to_string(max_iter) +
                               " iterations (last sup-norm gap " + std::to_string(gap) + ")",
                           gap);
}

GridCopula push_forward_step(const TransformationMatrix& matrix, const GridCopula& copula) {
    const std::size_t G = copula.grid_size();
    const IfsSystem ifs = build_ifs(matrix);
    std::vector<std::vector<IntervalSplit>> x_splits, y_splits;
    for (const auto& map : ifs.maps) {
        x_splits.push_back(split_axis(G, map.x_offset, map.x_scale));
        y_splits.push_back(split_axis(G, map.y_offset, map.y_scale));
    }
    MassGrid masses(G, std::vector<double>(G, 0.0));
    for (std::size_t p = 0; p < G; ++p)
        for (std::size_t q = 0; q < G; ++q) masses[p][q] = copula.cell_mass(p, q);
    masses = apply_push_forward(ifs, x_splits, y_splits, masses, G);
    return GridCopula(G, cumulative_grid(masses, G));
}

namespace {

// Right-continuous empirical ranks: rank(v) = #{ values <= v }.
std::vector<long> empirical_ranks(const std::vector<double>& values) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<long> ranks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        ranks[i] = static_cast<long>(std::upper_bound(sorted.begin(), sorted.end(), values[i]) -
                                     sorted.begin());
    return ranks;
}

class Fenwick {
public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
    void add(long idx) {
        for (long i = idx; i < static_cast<long>(tree_.size()); i += i & (-i)) tree_[i] += 1;
    }
    long prefix(long idx) const {
        long s = 0;
        for (long i = idx; i > 0; i -= i & (-i)) s += tree_[i];
        return s;
    }

private:
    std::vector<long> tree_;
};

// Attained rank values 0 = k_0 < k_1 < ... <= n along one margin.
std::vector<long> rank_breaks(const std::vector<long>& ranks) {
    std::vector<long> breaks = ranks;
    breaks.push_back(0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return breaks;
}

} // namespace

GridCopula empirical_copula(const std::vector<Point>& sample, std::size_t grid_size) {
    if (sample.empty()) throw ValidationError("empirical_copula: empty sample");
    const long n = static_cast<long>(sample.size());
    const long G = static_cast<long>(grid_size);

    std::vector<double> xs(sample.size()), ys(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        xs[i] = sample[i].x;
        ys[i] = sample[i].y;
    }
    const std::vector<long> rx = empirical_ranks(xs);
    const std::vector<long> ry = empirical_ranks(ys);
    const std::vector<long> x_breaks = rank_breaks(rx);
    const std::vector<long> y_breaks = rank_breaks(ry);

    // Bracket u = p/G between attained rank values; exact integer comparison
    // k/n <= p/G  <=>  k*G <= p*n.
    auto bracket = [n, G](const std::vector<long>& breaks, long p) {
        const long target = p * n;
        auto it = std::upper_bound(breaks.begin(), breaks.end(), target,
                                   [G](long t, long k) { return t < k * G; });
        const std::size_t hi = static_cast<std::size_t>(it - breaks.begin());
        // breaks[hi-1]*G <= target < breaks[hi]*G (hi may be past the last break
        // only when target == n*G, where the last break n matches exactly).
        const std::size_t lo = hi - 1;
        if (breaks[lo] * G == target) return std::tuple<std::size_t, std::size_t, double>{lo, lo, 0.0};
        const double w = static_cast<double>(target - breaks[lo] * G) /
                         static_cast<double>((breaks[hi] - breaks[lo]) * G);
        return std::tuple<std::size_t, std::size_t, double>{lo, hi, w};
    };

    // Only break indices bracketing some grid target are needed, so the
    // dominance-count table stays O(G^2) regardless of the sample size.
    auto needed_indices = [&bracket, G](const std::vector<long>& breaks) {
        std::vector<std::size_t> idx;
        for (long p = 0; p <= G; ++p) {
            const auto [lo, hi, w] = bracket(breaks, p);
            (void)w;
            idx.push_back(lo);
            idx.push_back(hi);
        }
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        return idx;
    };
    const std::vector<std::size_t> need_x = needed_indices(x_breaks);
    const std::vector<std::size_t> need_y = needed_indices(y_breaks);
    std::vector<std::size_t> col_of(x_breaks.size(), 0), row_of(y_breaks.size(), 0);
    for (std::size_t i = 0; i < need_x.size(); ++i) col_of[need_x[i]] = i;
    for (std::size_t i = 0; i < need_y.size(); ++i) row_of[need_y[i]] = i;

    // Dominance counts sub[a][b] = #{ i : rx_i <= x_break, ry_i <= y_break } / n
    // via a sweep in x-rank order.
    std::vector<std::size_t> order(sample.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rx[a] < rx[b]; });

    std::vector<std::vector<double>> sub(need_x.size(), std::vector<double>(need_y.size(), 0.0));
    Fenwick fen(sample.size());
    std::size_t next_point = 0;
    for (std::size_t a = 0; a < need_x.size(); ++a) {
        while (next_point < order.size() && rx[order[next_point]] <= x_breaks[need_x[a]]) {
            fen.add(ry[order[next_point]]);
            ++next_point;
        }
        for (std::size_t b = 0; b < need_y.size(); ++b)
            sub[a][b] =
                static_cast<double>(fen.prefix(y_breaks[need_y[b]])) / static_cast<double>(n);
    }

    std::vector<std::vector<double>> values(grid_size + 1, std::vector<double>(grid_size + 1, 0.0));
    for (long p = 0; p <= G; ++p) {
        auto [alo, ahi, wa] = bracket(x_breaks, p);
        for (long q = 0; q <= G; ++q) {
            auto [blo, bhi, wb] = bracket(y_breaks, q);
            const double v00 = sub[col_of[alo]][row_of[blo]];
            const double v10 = sub[col_of[ahi]][row_of[blo]];
            const double v01 = sub[col_of[alo]][row_of[bhi]];
            const double v11 = sub[col_of[ahi]][row_of[bhi]];
            values[p][q] = (1 - wa) * (1 - wb) * v00 + wa * (1 - wb) * v10 +
                           (1 - wa) * wb * v01 + wa * wb * v11;
        }
    }
    return GridCopula(grid_size, std::move(values));
}

double d_inf(const GridCopula& a, const GridCopula& b) {
    if (a.grid_size() != b.grid_size())
        throw ValidationError("d_inf: mismatched grid sizes");
    double worst = 0.0;
    for (std::size_t p = 0; p <= a.grid_size(); ++p)
        for (std::size_t q = 0; q <= a.grid_size(); ++q)
            worst = std::max(worst, std::fabs(a.value(p, q) - b.value(p, q)));
    return worst;
}

namespace {

std::size_t node_index(const GridCopula& copula, double u, const char* what) {
    const double scaled = u * static_cast<double>(copula.grid_size());
    const double rounded = std::round(scaled);
    if (std::fabs(scaled - rounded) > 1e-9 || rounded < 0 ||
        rounded > static_cast<double>(copula.grid_size()))
        throw ValidationError(std::string("c_volume: ") + what + " is not a grid node");
    return static_cast<std::size_t>(rounded);
}

} // namespace

double c_volume(const GridCopula& copula, double u1, double u2, double v1, double v2) {
    if (u1 > u2 || v1 > v2) throw ValidationError("c_volume: rectangle corners out of order");
    const std::size_t p1 = node_index(copula, u1, "u1");
    const std::size_t p2 = node_index(copula, u2, "u2");
    const std::size_t q1 = node_index(copula, v1, "v1");
    const std::size_t q2 = node_index(copula, v2, "v2");
    return copula.value(p2, q2) - copula.value(p1, q2) - copula.value(p2, q1) +
           copula.value(p1, q1);
}

GridCopula independence_copula(std::size_t grid_size) {
    const double G = static_cast<double>(grid_size);
    std::vector<std::vector<double>> values(grid_size + 1, std::vector<double>(grid_size + 1));
    for (std::size_t p = 0; p <= grid_size; ++p)
        for (std::size_t q = 0; q <= grid_size; ++q)
            values[p][q] = (p / G) * (q / G);
    return GridCopula(grid_size, std::move(values));
}

GridCopula comonotone_copula(std::size_t grid_size) {
    const double G = static_cast<double>(grid_size);
    std::vector<std::vector<double>> values(grid_size + 1, std::vector<double>(grid_size + 1));
    for (std::size_t p = 0; p <= grid_size; ++p)
        for (std::size_t q = 0; q <= grid_size; ++q)
            values[p][q] = std::min(p / G, q / G);
    return GridCopula(grid_size, std::move(values));
}

} // namespace ifsl
