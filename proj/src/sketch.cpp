#include "cvxga/sketch.hpp"

#include <string>

#include "cvxga/errors.hpp"
#include "cvxga/geometry.hpp"
#include "cvxga/rng.hpp"

namespace cvxga::sketch {

SketchOperator make_sketch(int r, int d, std::uint64_t seed) {
    if (r < 2 || r > d) {
        throw ParameterError("make_sketch: need 2 <= r <= d, got r=" + std::to_string(r) +
                             ", d=" + std::to_string(d));
    }
    SketchOperator s;
    s.target_dim = r;
    s.source_dim = d;
    s.row_of_col.resize(d);
    s.sign_of_col.resize(d);
    Rng rng(seed);
    for (int j = 0; j < d; ++j) {
        s.row_of_col[j] = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(r)));
        s.sign_of_col[j] = rng.coin() ? 1 : -1;
    }
    return s;
}

Eigen::VectorXd project(const SketchOperator& s, const Eigen::VectorXd& x) {
    if (x.size() != s.source_dim) {
        throw DimensionError("project: x has dimension " + std::to_string(x.size()) +
                             ", sketch expects " + std::to_string(s.source_dim));
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(s.target_dim);
    for (int j = 0; j < s.source_dim; ++j) {
        out[s.row_of_col[j]] += s.sign_of_col[j] * x[j];
    }
    return out;
}

Eigen::VectorXd lift(const SketchOperator& s, const Eigen::VectorXd& v_r) {
    if (v_r.size() != s.target_dim) {
        throw DimensionError("lift: v has dimension " + std::to_string(v_r.size()) +
                             ", sketch expects " + std::to_string(s.target_dim));
    }
    Eigen::VectorXd out(s.source_dim);
    for (int j = 0; j < s.source_dim; ++j) {
        out[j] = s.sign_of_col[j] * v_r[s.row_of_col[j]];
    }
    return out;
}

Eigen::VectorXd sketched_gate(const SketchOperator& s, const Eigen::MatrixXd& rows) {
    if (rows.rows() != s.source_dim || rows.cols() != s.target_dim - 1) {
        throw DimensionError("sketched_gate: need d x (r-1) columns of data vectors");
    }
    Eigen::MatrixXd projected(s.target_dim, rows.cols());
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
        projected.col(c) = project(s, rows.col(c));
    }
    const Eigen::VectorXd tilde = geometry::cross_product(projected);
    if (tilde.norm() == 0.0 || geometry::tuple_is_degenerate(projected)) {
        throw DegenerateTupleError("sketched_gate: projected tuple is rank deficient");
    }
    Eigen::VectorXd v = lift(s, tilde);
    // a sketch with a target row no column maps to can concentrate the cross
    // product on that row, in which case the lift collapses to zero
    if (v.norm() <= 1e-12 * tilde.norm()) {
        throw DegenerateTupleError("sketched_gate: lifted gate vanishes");
    }
    return v;
}

Eigen::MatrixXd to_dense(const SketchOperator& s) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(s.target_dim, s.source_dim);
    for (int j = 0; j < s.source_dim; ++j) {
        m(s.row_of_col[j], j) = s.sign_of_col[j];
    }
    return m;
}

} // namespace cvxga::sketch
