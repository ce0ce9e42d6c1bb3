#include "cvxga/geometry.hpp"

#include <cmath>
#include <string>

#include "cvxga/errors.hpp"

namespace cvxga::geometry {

namespace {

void check_tuple(const Eigen::MatrixXd& tuple) {
    const Eigen::Index d = tuple.rows();
    if (d < 2 || tuple.cols() != d - 1) {
        throw DimensionError("cross_product: tuple must be d x (d-1) with d >= 2, got " +
                             std::to_string(d) + " x " + std::to_string(tuple.cols()));
    }
    if (!tuple.allFinite()) throw DimensionError("cross_product: non-finite tuple entry");
}

} // namespace

Eigen::VectorXd cross_product(const Eigen::MatrixXd& tuple) {
    check_tuple(tuple);
    const Eigen::Index d = tuple.rows();

    if (d == 2) {
        // x = (a, b) -> (b, -a)
        return Eigen::Vector2d(tuple(1, 0), -tuple(0, 0));
    }

    // Cofactor expansion: one LU determinant per deleted row.
    Eigen::VectorXd v(d);
    Eigen::MatrixXd minor(d - 1, d - 1);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (i > 0) minor.topRows(i) = tuple.topRows(i);
        if (i < d - 1) minor.bottomRows(d - 1 - i) = tuple.bottomRows(d - 1 - i);
        const double det = minor.partialPivLu().determinant();
        v[i] = (i % 2 == 0) ? det : -det;
    }
    return v;
}

double parallelotope_volume(const Eigen::VectorXd& x, const Eigen::MatrixXd& tuple) {
    check_tuple(tuple);
    if (x.size() != tuple.rows()) {
        throw DimensionError("parallelotope_volume: x has dimension " + std::to_string(x.size()) +
                             ", tuple lives in dimension " + std::to_string(tuple.rows()));
    }
    const Eigen::Index d = tuple.rows();
    Eigen::MatrixXd m(d, d);
    m.col(0) = x;
    m.rightCols(d - 1) = tuple;
    return m.partialPivLu().determinant();
}

bool tuple_is_degenerate(const Eigen::MatrixXd& tuple) {
    if (tuple.cols() == 0) return false;
    if (!tuple.allFinite()) return true;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(tuple);
    const Eigen::Index k = std::min(tuple.rows(), tuple.cols());
    const double largest = std::abs(qr.matrixR()(0, 0));
    if (largest == 0.0) return true;
    const double smallest = std::abs(qr.matrixR()(k - 1, k - 1));
    return smallest <= 1e-10 * largest;
}

double kappa(const Eigen::VectorXd& x, const Eigen::MatrixXd& tuple) {
    const Eigen::VectorXd v = cross_product(tuple);
    const double base = v.norm();
    if (base == 0.0 || tuple_is_degenerate(tuple)) {
        throw DegenerateTupleError("kappa: tuple spans a degenerate parallelotope");
    }
    if (x.size() != v.size()) {
        throw DimensionError("kappa: dimension mismatch");
    }
    const double vol = x.dot(v);
    return vol > 0.0 ? vol / base : 0.0;
}

} // namespace cvxga::geometry
