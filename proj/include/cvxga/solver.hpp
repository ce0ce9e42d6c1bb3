#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cvxga/data.hpp"
#include "cvxga/sampling.hpp"

namespace cvxga::solver {

enum class Loss { squared, logistic };

// Gated-ReLU convex program: min ell(sum_i D_i (X u_i + b_i 1), y) +
// beta sum_i |u_i|_2, with the biases b_i unpenalized (present only when
// with_bias). Block i is the masked matrix D_i X, realized lazily through
// the pattern bits.
struct GroupLassoProblem {
    Eigen::MatrixXd X;        // n x d
    Eigen::MatrixXd masks;    // n x k, entries in {0,1}
    Eigen::VectorXd y;        // n
    double beta = 0.0;
    Loss loss = Loss::squared;
    bool with_bias = false;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }
    Eigen::Index blocks() const { return masks.cols(); }
};

GroupLassoProblem make_problem(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const sampling::PatternSet& patterns, double beta,
                               Loss loss = Loss::squared, bool with_bias = false);

struct GroupLassoSolution {
    Eigen::MatrixXd weights;  // d x k, column i = u_i
    Eigen::VectorXd biases;   // k (zeros when bias-free)
    std::vector<double> objective_trace;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;

    int active_blocks(double tol = 0.0) const;
};

struct FistaOptions {
    int max_iters = 5000;
    double tol = 1e-6;
    int check_every = 10;     // KKT residual cadence
};

// Block soft-threshold: max(0, 1 - t/|u|) u.
Eigen::VectorXd prox_group(const Eigen::VectorXd& u, double t);

// Loss value and gradient in prediction space.
double loss_value(Loss loss, const Eigen::VectorXd& z, const Eigen::VectorXd& y);
Eigen::VectorXd loss_gradient(Loss loss, const Eigen::VectorXd& z, const Eigen::VectorXd& y);

// Model output sum_i D_i (X u_i + b_i 1) for given weights.
Eigen::VectorXd forward(const GroupLassoProblem& p, const Eigen::MatrixXd& U,
                        const Eigen::VectorXd& b);

// Smallest beta for which the all-zero weights are optimal:
// max_i |(D_i X)' grad ell(0)|_2.
double beta_max(const GroupLassoProblem& p);

// First-order optimality certificate. Max over blocks of
// |(D_i X)' g + beta u_i/|u_i||  (active) or  max(0, |(D_i X)' g| - beta)
// (zero), plus |1' D_i g| per unpenalized bias.
double kkt_residual(const GroupLassoProblem& p, const GroupLassoSolution& s);

// Accelerated proximal gradient with a power-iteration Lipschitz estimate,
// backtracking on sufficient-decrease violations and function-value adaptive
// restarts. Optional warm start. Throws DivergenceError on a non-finite
// objective.
GroupLassoSolution fista_solve(const GroupLassoProblem& p, const FistaOptions& opts = {},
                               const GroupLassoSolution* warm = nullptr);

// Convex Lasso dictionary K[i][j] = kappa(x_i, oriented tuple j), both
// orientations per size-(d-1) row subset. Intended for d = 2 demos.
struct LassoDictionary {
    Eigen::MatrixXd K;                      // n x q, nonnegative
    std::vector<std::vector<int>> tuples;   // row multi-index per column
    std::vector<int> orientations;          // +1 / -1 per column
    std::vector<Eigen::VectorXd> gates;     // oriented cross product per column
    int skipped_degenerate = 0;
};

LassoDictionary build_dictionary(const data::Dataset& ds,
                                 std::optional<int> subsample_q = std::nullopt,
                                 std::uint64_t seed = 0);

struct LassoSolution {
    Eigen::VectorXd z;
    std::vector<double> objective_trace;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// min_z ell(Kz, y) + beta |z|_1 by the same FISTA machinery with scalar
// soft-thresholds.
LassoSolution lasso_solve(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double beta,
                          Loss loss = Loss::squared, const FistaOptions& opts = {},
                          const LassoSolution* warm = nullptr);

// Warm-started descending log-spaced beta grid from beta_max down to
// beta_max * 1e-4.
struct RegPath {
    std::vector<double> betas;                 // strictly decreasing
    std::vector<GroupLassoSolution> solutions; // one per beta
    std::vector<int> active_counts;
    int total_iterations = 0;
};

RegPath reg_path(GroupLassoProblem p, int grid_size, const FistaOptions& opts = {});

struct LassoRegPath {
    std::vector<double> betas;
    std::vector<LassoSolution> solutions;
    std::vector<int> active_counts;
    int total_iterations = 0;
};

LassoRegPath lasso_reg_path(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, int grid_size,
                            Loss loss = Loss::squared, const FistaOptions& opts = {});

} // namespace cvxga::solver
