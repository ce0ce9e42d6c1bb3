#include "cvxga/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cvxga/errors.hpp"
#include "cvxga/rng.hpp"

namespace cvxga::data {

Eigen::MatrixXd rows_of(const Dataset& ds, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), ds.d());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = ds.X.row(idx[i]);
    return out;
}

Eigen::VectorXd labels_of(const Dataset& ds, const std::vector<int>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = ds.y[idx[i]];
    return out;
}

Dataset subset(const Dataset& ds, const std::vector<int>& idx) {
    Dataset out;
    out.X = rows_of(ds, idx);
    out.y = labels_of(ds, idx);
    out.name = ds.name;
    out.train.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out.train[i] = static_cast<int>(i);
    return out;
}

Dataset make_spiral(int n, double noise_sigma, std::uint64_t seed) {
    if (n < 4 || n % 2 != 0) {
        throw ParameterError("make_spiral: n must be even and >= 4, got " + std::to_string(n));
    }
    const int per_arm = n / 2;
    Dataset ds;
    ds.X.resize(n, 2);
    ds.y.resize(n);
    ds.name = "spiral";
    Rng rng(seed);
    for (int arm = 0; arm < 2; ++arm) {
        for (int i = 0; i < per_arm; ++i) {
            const double t = static_cast<double>(i) / per_arm;
            // Radii well beyond unit scale: gates drawn from a standard
            // Gaussian prior concentrate near the origin, so this range is
            // what separates data-adapted sampling from prior-bound sampling.
            const double rho = 1.0 + 4.0 * t;
            const double theta = 3.0 * std::numbers::pi * t + arm * std::numbers::pi;
            const int row = arm * per_arm + i;
            ds.X(row, 0) = rho * std::cos(theta) + noise_sigma * rng.normal();
            ds.X(row, 1) = rho * std::sin(theta) + noise_sigma * rng.normal();
            ds.y[row] = arm == 0 ? 1.0 : -1.0;
        }
    }
    ds.train.resize(n);
    for (int i = 0; i < n; ++i) ds.train[i] = i;
    return ds;
}

Dataset make_two_cluster(int n, int d, double flip_fraction, std::uint64_t seed) {
    if (n < 2 || d < 1) throw ParameterError("make_two_cluster: need n >= 2, d >= 1");
    if (flip_fraction < 0.0 || flip_fraction >= 0.5) {
        throw ParameterError("make_two_cluster: flip fraction must be in [0, 0.5)");
    }
    Dataset ds;
    ds.X.resize(n, d);
    ds.y.resize(n);
    ds.name = "two_cluster";
    Rng rng(seed);
    // Shared mean direction; the two classes differ in mean sign and in
    // covariance scale, which makes the Bayes boundary quadratic rather
    // than a hyperplane.
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
    const double offset = 0.8;
    const double sigma_pos = 0.5;
    const double sigma_neg = 1.6;
    for (int i = 0; i < n; ++i) {
        const bool positive = i % 2 == 0;
        const double s = positive ? sigma_pos : sigma_neg;
        for (int j = 0; j < d; ++j) {
            ds.X(i, j) = (positive ? offset : -offset) * mu[j] + s * rng.normal();
        }
        double label = positive ? 1.0 : -1.0;
        if (rng.uniform() < flip_fraction) label = -label;
        ds.y[i] = label;
    }
    ds.train.resize(n);
    for (int i = 0; i < n; ++i) ds.train[i] = i;
    return ds;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, delim)) out.push_back(cell);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

double parse_cell(const std::string& cell, long line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw ParseError("non-numeric cell '" + cell + "'", line_no);
    }
    // Allow trailing whitespace only.
    for (std::size_t i = pos; i < cell.size(); ++i) {
        if (!std::isspace(static_cast<unsigned char>(cell[i]))) {
            throw ParseError("non-numeric cell '" + cell + "'", line_no);
        }
    }
    if (!std::isfinite(v)) throw ParseError("non-finite value '" + cell + "'", line_no);
    return v;
}

} // namespace

Dataset load_delimited(const std::string& path, const std::string& label_column, char delimiter) {
    std::ifstream in(path);
    if (!in) throw ParameterError("load_delimited: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file, header required", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_line(line, delimiter);

    int label_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == label_column) { label_idx = static_cast<int>(i); break; }
    }
    if (label_idx < 0) throw ParseError("unknown label column '" + label_column + "'", 1);

    const std::size_t ncols = header.size();
    std::vector<std::vector<double>> feats;
    std::vector<double> labels;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_line(line, delimiter);
        if (cells.size() != ncols) {
            throw ParseError("ragged row: expected " + std::to_string(ncols) + " cells, got " +
                             std::to_string(cells.size()), line_no);
        }
        std::vector<double> row;
        row.reserve(ncols - 1);
        for (std::size_t c = 0; c < ncols; ++c) {
            const double v = parse_cell(cells[c], line_no);
            if (static_cast<int>(c) == label_idx) labels.push_back(v);
            else row.push_back(v);
        }
        feats.push_back(std::move(row));
    }
    if (feats.empty()) throw ParseError("no data rows", line_no);

    // Binary {0,1} labels map to {-1,+1}; anything else passes through.
    bool zero_one = true;
    for (double v : labels) {
        if (v != 0.0 && v != 1.0) { zero_one = false; break; }
    }

    Dataset ds;
    const Eigen::Index n = static_cast<Eigen::Index>(feats.size());
    const Eigen::Index d = static_cast<Eigen::Index>(ncols - 1);
    ds.X.resize(n, d);
    ds.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) ds.X(i, j) = feats[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const double raw = labels[static_cast<std::size_t>(i)];
        ds.y[i] = zero_one ? (raw == 1.0 ? 1.0 : -1.0) : raw;
    }
    ds.name = path;
    ds.train.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ds.train[static_cast<std::size_t>(i)] = i;
    return ds;
}

void save_delimited(const Dataset& ds, const std::string& path, char delimiter) {
    std::ofstream out(path);
    if (!out) throw ParameterError("save_delimited: cannot open '" + path + "' for writing");
    out.precision(17);
    for (Eigen::Index j = 0; j < ds.d(); ++j) out << "f" << j << delimiter;
    out << "y\n";
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        for (Eigen::Index j = 0; j < ds.d(); ++j) out << ds.X(i, j) << delimiter;
        out << ds.y[i] << "\n";
    }
}

Dataset split(const Dataset& ds, double train_frac, double val_frac, double test_frac,
              std::uint64_t seed) {
    if (train_frac <= 0.0 || val_frac < 0.0 || test_frac < 0.0 ||
        train_frac + val_frac + test_frac > 1.0 + 1e-12) {
        throw ParameterError("split: fractions must be positive and sum to at most 1");
    }
    const int n = static_cast<int>(ds.n());
    Rng rng(seed);
    const std::vector<int> perm = rng.permutation(n);
    const int n_train = static_cast<int>(train_frac * n);
    const int n_val = static_cast<int>(val_frac * n);
    const int n_test = static_cast<int>(test_frac * n);

    Dataset out = ds;
    out.train.assign(perm.begin(), perm.begin() + n_train);
    out.validation.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
    out.test.assign(perm.begin() + n_train + n_val, perm.begin() + n_train + n_val + n_test);
    return out;
}

Dataset standardize(const Dataset& ds, const std::string& stats_from) {
    const std::vector<int>* idx = nullptr;
    if (stats_from == "train") idx = &ds.train;
    else if (stats_from == "validation") idx = &ds.validation;
    else if (stats_from == "test") idx = &ds.test;
    else throw ParameterError("standardize: unknown split '" + stats_from + "'");
    if (idx->empty()) throw ParameterError("standardize: split '" + stats_from + "' is empty");

    const Eigen::MatrixXd ref = rows_of(ds, *idx);
    const Eigen::RowVectorXd mean = ref.colwise().mean();
    Eigen::RowVectorXd sd = ((ref.rowwise() - mean).array().square().colwise().mean()).sqrt();
    sd = sd.cwiseMax(1e-8);

    Dataset out = ds;
    out.X = (ds.X.rowwise() - mean).array().rowwise() / sd.array();
    return out;
}

} // namespace cvxga::data
