#pragma once

#include <Eigen/Dense>

namespace cvxga::geometry {

// A tuple of d-1 vectors in R^d is stored as the d x (d-1) matrix whose
// columns are the tuple members.

// Generalized cross product: the unique vector v with v'x_j = 0 for every
// column x_j and |v| equal to the (d-1)-volume of the parallelotope the
// columns span. Component i is the signed cofactor (-1)^(i-1) |A_i| where
// A_i deletes row i. Rank-deficient tuples give the zero vector.
Eigen::VectorXd cross_product(const Eigen::MatrixXd& tuple);

// Signed volume det[x, x_1, ..., x_{d-1}]; equals dot(x, cross_product(tuple)).
double parallelotope_volume(const Eigen::VectorXd& x, const Eigen::MatrixXd& tuple);

// Numerical rank test via column-pivoted QR: true when the smallest pivot
// falls below 1e-10 of the largest. Generic random tuples in high dimension
// have determinants exponentially below the Hadamard bound, so a volume-based
// threshold would misclassify them; the pivot ratio is scale-free.
bool tuple_is_degenerate(const Eigen::MatrixXd& tuple);

// ReLU-clipped distance from x to span of the tuple:
// (x' cross(tuple))_+ / |cross(tuple)|. Throws DegenerateTupleError when the
// cross product vanishes.
double kappa(const Eigen::VectorXd& x, const Eigen::MatrixXd& tuple);

} // namespace cvxga::geometry
