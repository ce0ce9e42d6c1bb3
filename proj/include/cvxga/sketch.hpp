#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace cvxga::sketch {

// Column-sparse r x d random projection: one signed unit entry per column
// (row index uniform on [r], sign uniform on {-1,+1}). Immutable after
// construction.
struct SketchOperator {
    int target_dim = 0; // r
    int source_dim = 0; // d
    std::vector<int> row_of_col;     // size d, values in [0, r)
    std::vector<std::int8_t> sign_of_col; // size d, values in {-1, +1}
};

SketchOperator make_sketch(int r, int d, std::uint64_t seed);

// S x, computed in O(d) via the column map.
Eigen::VectorXd project(const SketchOperator& s, const Eigen::VectorXd& x);

// S' v_r, back to dimension d.
Eigen::VectorXd lift(const SketchOperator& s, const Eigen::VectorXd& v_r);

// Lifted cross product of projected data vectors:
// v = S' x cross(S x_1, ..., S x_{r-1}). Columns of `rows` are the r-1 data
// vectors in R^d. Exactly orthogonal to every input (up to float). Throws
// DegenerateTupleError when the projected tuple is rank deficient.
Eigen::VectorXd sketched_gate(const SketchOperator& s, const Eigen::MatrixXd& rows);

// Dense r x d materialization, for tests and small problems.
Eigen::MatrixXd to_dense(const SketchOperator& s);

} // namespace cvxga::sketch
