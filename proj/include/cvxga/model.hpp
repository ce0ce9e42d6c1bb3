#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvxga/data.hpp"
#include "cvxga/sampling.hpp"
#include "cvxga/solver.hpp"

namespace cvxga::model {

// One gated neuron: output (x'u + b) when x'h + c >= 0, else 0.
struct Neuron {
    Eigen::VectorXd gate;       // h
    double gate_bias = 0.0;     // c
    Eigen::VectorXd weight;     // u
    double weight_bias = 0.0;   // b
};

struct GatedReluModel {
    std::vector<Neuron> neurons;
    Eigen::Index input_dim = 0;
    // reproducibility metadata
    std::string provenance;
    double beta = 0.0;
    std::uint64_t seed = 0;
};

struct Metrics {
    double accuracy = 0.0;
    double loss = 0.0;
    long true_pos = 0, true_neg = 0, false_pos = 0, false_neg = 0;
    long count = 0;
};

// Pair each pattern's gate with its solved block weights; zero blocks are
// pruned (they contribute nothing).
GatedReluModel assemble(const sampling::PatternSet& patterns,
                        const solver::GroupLassoSolution& solution);

// Dictionary-column variant: neuron j has gate and weight along the column's
// oriented cross product, scaled by z_j / |gate|.
GatedReluModel assemble_lasso(const solver::LassoDictionary& dict,
                              const solver::LassoSolution& solution, Eigen::Index input_dim);

// sum_i 1(x'h_i + c_i >= -eps) (x'u_i + b_i), same tie rule as sampling.
double predict(const GatedReluModel& m, const Eigen::VectorXd& x);
Eigen::VectorXd predict_rows(const GatedReluModel& m, const Eigen::MatrixXd& X);

// Sign-agreement accuracy for +-1 labels (score ties count as positive),
// loss value and confusion counts.
Metrics evaluate(const GatedReluModel& m, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 solver::Loss loss = solver::Loss::squared);

// Row-major score grid over [x_lo, x_hi] x [y_lo, y_hi] for 2D models.
struct GridPoint {
    double x, y, score;
};
std::vector<GridPoint> decision_grid(const GatedReluModel& m, double x_lo, double x_hi,
                                     double y_lo, double y_hi, int resolution);

// Line-oriented self-describing text format, version tagged.
void save_model(const GatedReluModel& m, const std::string& path);
GatedReluModel load_model(const std::string& path);

} // namespace cvxga::model
