#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace ifsl {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Non-negative matrix with total mass 1 and no zero row or column.
/// Rows are indexed bottom-to-top: entry(col i, row j) corresponds to the
/// rectangle in column strip i (left to right) and row strip j (bottom to top).
class TransformationMatrix {
public:
    // entries[j][i] = mass of column i, row j with row 0 at the bottom.
    explicit TransformationMatrix(std::vector<std::vector<double>> rows_bottom_to_top);

    std::size_t cols() const { return cols_; }
    std::size_t rows() const { return rows_; }
    double entry(std::size_t col, std::size_t row) const { return entries_[row][col]; }

    static TransformationMatrix uniform(std::size_t rows, std::size_t cols);

private:
    std::vector<std::vector<double>> entries_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
};

// Axis-aligned affine contraction of the unit square into one cell rectangle.
struct AffineMap {
    double x_offset = 0.0;
    double x_scale = 0.0;
    double y_offset = 0.0;
    double y_scale = 0.0;

    Point operator()(Point p) const {
        return {x_offset + p.x * x_scale, y_offset + p.y * y_scale};
    }
};

/// IFS induced by a transformation matrix: one map per positive entry, with
/// breakpoints a_i (cumulative column sums) and b_j (cumulative bottom-to-top
/// row sums).
struct IfsSystem {
    std::vector<AffineMap> maps;
    std::vector<double> probs;           // positive entries of U, sum 1
    std::vector<double> col_breaks;      // a_0 = 0 .. a_C = 1
    std::vector<double> row_breaks;      // b_0 = 0 .. b_R = 1
};

/// A copula on a uniform grid: value(p, q) = C(p/G, q/G).
class GridCopula {
public:
    GridCopula(std::size_t grid_size, std::vector<std::vector<double>> values);

    std::size_t grid_size() const { return grid_size_; }
    double value(std::size_t p, std::size_t q) const { return values_[p][q]; }

    // Mass of the grid cell [p/G,(p+1)/G] x [q/G,(q+1)/G] by inclusion-exclusion.
    double cell_mass(std::size_t p, std::size_t q) const;

    // Checks groundedness, uniform margins, 2-increasingness and the Frechet
    // bounds; throws ValidationError naming the first violated axiom.
    void check_axioms() const;

private:
    std::size_t grid_size_;
    std::vector<std::vector<double>> values_; // (G+1) x (G+1), values_[p][q]
};

IfsSystem build_ifs(const TransformationMatrix& matrix);

/// Fixed point of the push-forward operator, computed by deterministic measure
/// iteration on a grid of cell masses starting from the uniform measure.
GridCopula invariant_copula(const TransformationMatrix& matrix, std::size_t grid_size = 64,
                            double tol = 1e-9, std::size_t max_iter = 10000);

/// Empirical copula: sub-copula on the ranges of the marginal empirical
/// distribution functions, extended by bilinear interpolation, evaluated on
/// the uniform grid.
GridCopula empirical_copula(const std::vector<Point>& sample, std::size_t grid_size);

double d_inf(const GridCopula& a, const GridCopula& b);

// C-volume of [u1,u2] x [v1,v2]; the corners must sit on grid nodes.
double c_volume(const GridCopula& copula, double u1, double u2, double v1, double v2);

// Closed forms for test oracles.
GridCopula independence_copula(std::size_t grid_size);   // Pi(u,v) = u v
GridCopula comonotone_copula(std::size_t grid_size);     // M(u,v) = min(u,v)

// One application of the push-forward operator to the cell masses of a grid
// copula; exposed so the fixed-point property is directly checkable.
GridCopula push_forward_step(const TransformationMatrix& matrix, const GridCopula& copula);

} // namespace ifsl
