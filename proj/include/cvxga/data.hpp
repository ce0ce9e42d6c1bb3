#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvxga::data {

// Labeled feature matrix with disjoint split index lists. Rows of X are the
// training points; y holds {-1,+1} labels (or reals for regression).
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<int> train, validation, test;
    std::string name;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }
};

// Rows/labels restricted to an index list.
Eigen::MatrixXd rows_of(const Dataset& ds, const std::vector<int>& idx);
Eigen::VectorXd labels_of(const Dataset& ds, const std::vector<int>& idx);
// Dataset restricted to an index list (all rows land in the train split).
Dataset subset(const Dataset& ds, const std::vector<int>& idx);

// Two interleaved spiral arms, n/2 points each. Arm k in {0,1}, grid
// parameter t in [0,1): radius 0.2 + 0.8t, angle 3*pi*t + k*pi, plus
// N(0, sigma^2 I) noise. Labels +1 (arm 0) / -1 (arm 1). All rows start in
// the train split.
Dataset make_spiral(int n, double noise_sigma, std::uint64_t seed);

// Synthetic embedding-like binary classification data: two Gaussian clusters
// with opposite means along a fixed direction and different covariance
// scales (so the Bayes boundary is curved), plus label-flip noise.
Dataset make_two_cluster(int n, int d, double flip_fraction, std::uint64_t seed);

// Delimited text with a header row. The label column is mapped {0,1} ->
// {-1,+1}; other numeric labels pass through. Rejects ragged rows,
// non-numeric cells and non-finite values with line numbers.
Dataset load_delimited(const std::string& path, const std::string& label_column,
                       char delimiter = ',');

void save_delimited(const Dataset& ds, const std::string& path, char delimiter = ',');

// Seeded shuffle then contiguous assignment into train/validation/test.
// Fractions must be positive and sum to at most 1.
Dataset split(const Dataset& ds, double train_frac, double val_frac, double test_frac,
              std::uint64_t seed);

// Per-feature standardization; statistics come from the named split
// ("train", "validation" or "test") and are applied to every row. Std floor
// 1e-8.
Dataset standardize(const Dataset& ds, const std::string& stats_from = "train");

} // namespace cvxga::data
