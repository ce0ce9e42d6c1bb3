#include "cvxga/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cvxga/errors.hpp"

namespace cvxga::model {

GatedReluModel assemble(const sampling::PatternSet& patterns,
                        const solver::GroupLassoSolution& solution) {
    const Eigen::Index k = static_cast<Eigen::Index>(patterns.patterns.size());
    if (solution.weights.cols() != k) {
        throw DimensionError("assemble: pattern count != block count");
    }
    GatedReluModel m;
    m.input_dim = solution.weights.rows();
    for (Eigen::Index i = 0; i < k; ++i) {
        const double unorm = solution.weights.col(i).norm();
        const double b = solution.biases.size() == k ? solution.biases[i] : 0.0;
        if (unorm == 0.0 && b == 0.0) continue;
        const auto& pat = patterns.patterns[static_cast<std::size_t>(i)];
        Neuron nr;
        nr.gate = pat.gate.direction;
        nr.gate_bias = pat.gate.bias;
        nr.weight = solution.weights.col(i);
        nr.weight_bias = b;
        m.neurons.push_back(std::move(nr));
        if (m.provenance.empty()) m.provenance = sampling::provenance_name(pat.provenance);
    }
    return m;
}

GatedReluModel assemble_lasso(const solver::LassoDictionary& dict,
                              const solver::LassoSolution& solution, Eigen::Index input_dim) {
    if (solution.z.size() != static_cast<Eigen::Index>(dict.gates.size())) {
        throw DimensionError("assemble_lasso: column count mismatch");
    }
    GatedReluModel m;
    m.input_dim = input_dim;
    m.provenance = "lasso_dictionary";
    for (Eigen::Index j = 0; j < solution.z.size(); ++j) {
        const double zj = solution.z[j];
        if (zj == 0.0) continue;
        const Eigen::VectorXd& g = dict.gates[static_cast<std::size_t>(j)];
        Neuron nr;
        nr.gate = g;
        nr.gate_bias = 0.0;
        nr.weight = (zj / g.norm()) * g; // kappa column == gated neuron along the gate
        nr.weight_bias = 0.0;
        m.neurons.push_back(std::move(nr));
    }
    return m;
}

namespace {

inline bool gate_open(const Neuron& nr, const Eigen::VectorXd& x, double xnorm) {
    const double eps = 1e-12 * nr.gate.norm() * xnorm;
    return nr.gate.dot(x) + nr.gate_bias >= -eps;
}

} // namespace

double predict(const GatedReluModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.input_dim) throw DimensionError("predict: dimension mismatch");
    const double xnorm = x.norm();
    double score = 0.0;
    for (const auto& nr : m.neurons) {
        if (gate_open(nr, x, xnorm)) score += nr.weight.dot(x) + nr.weight_bias;
    }
    return score;
}

Eigen::VectorXd predict_rows(const GatedReluModel& m, const Eigen::MatrixXd& X) {
    if (X.cols() != m.input_dim) throw DimensionError("predict_rows: dimension mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
    for (const auto& nr : m.neurons) {
        const Eigen::VectorXd act = X * nr.gate;
        const Eigen::VectorXd val = X * nr.weight;
        const double gnorm = nr.gate.norm();
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const double eps = 1e-12 * gnorm * X.row(i).norm();
            if (act[i] + nr.gate_bias >= -eps) out[i] += val[i] + nr.weight_bias;
        }
    }
    return out;
}

Metrics evaluate(const GatedReluModel& m, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 solver::Loss loss) {
    if (X.rows() != y.size()) throw DimensionError("evaluate: X/y row mismatch");
    if (y.size() == 0) throw ParameterError("evaluate: empty data");
    const Eigen::VectorXd scores = predict_rows(m, X);
    Metrics mt;
    mt.count = y.size();
    mt.loss = solver::loss_value(loss, scores, y) / static_cast<double>(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const bool pred_pos = scores[i] >= 0.0; // ties -> positive
        const bool is_pos = y[i] > 0.0;
        if (pred_pos && is_pos) ++mt.true_pos;
        else if (pred_pos && !is_pos) ++mt.false_pos;
        else if (!pred_pos && is_pos) ++mt.false_neg;
        else ++mt.true_neg;
    }
    mt.accuracy = static_cast<double>(mt.true_pos + mt.true_neg) / static_cast<double>(mt.count);
    return mt;
}

std::vector<GridPoint> decision_grid(const GatedReluModel& m, double x_lo, double x_hi,
                                     double y_lo, double y_hi, int resolution) {
    if (m.input_dim != 2) throw ParameterError("decision_grid: model must be 2D");
    if (resolution < 1) throw ParameterError("decision_grid: resolution must be >= 1");
    std::vector<GridPoint> grid;
    grid.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
    Eigen::Vector2d pt;
    for (int r = 0; r < resolution; ++r) {
        const double gy = resolution == 1 ? y_lo : y_lo + (y_hi - y_lo) * r / (resolution - 1);
        for (int c = 0; c < resolution; ++c) {
            const double gx = resolution == 1 ? x_lo : x_lo + (x_hi - x_lo) * c / (resolution - 1);
            pt << gx, gy;
            grid.push_back({gx, gy, predict(m, pt)});
        }
    }
    return grid;
}

void save_model(const GatedReluModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParameterError("save_model: cannot open '" + path + "' for writing");
    out.precision(17);
    out << "cvxga-model 1\n";
    out << "dim " << m.input_dim << "\n";
    out << "provenance " << (m.provenance.empty() ? "unknown" : m.provenance) << "\n";
    out << "beta " << m.beta << "\n";
    out << "seed " << m.seed << "\n";
    out << "neurons " << m.neurons.size() << "\n";
    for (const auto& nr : m.neurons) {
        for (Eigen::Index j = 0; j < m.input_dim; ++j) out << nr.gate[j] << " ";
        out << nr.gate_bias << " ";
        for (Eigen::Index j = 0; j < m.input_dim; ++j) out << nr.weight[j] << " ";
        out << nr.weight_bias << "\n";
    }
}

GatedReluModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("load_model: cannot open '" + path + "'");
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "cvxga-model" || version != 1) {
        throw ParseError("not a cvxga-model v1 file", 1);
    }
    GatedReluModel m;
    std::size_t count = 0;
    std::string key;
    while (in >> key) {
        if (key == "dim") in >> m.input_dim;
        else if (key == "provenance") in >> m.provenance;
        else if (key == "beta") in >> m.beta;
        else if (key == "seed") in >> m.seed;
        else if (key == "neurons") { in >> count; break; }
        else throw ParseError("unknown header key '" + key + "'", 2);
    }
    if (m.input_dim < 1) throw ParseError("missing dim header", 2);
    for (std::size_t i = 0; i < count; ++i) {
        Neuron nr;
        nr.gate.resize(m.input_dim);
        nr.weight.resize(m.input_dim);
        for (Eigen::Index j = 0; j < m.input_dim; ++j) in >> nr.gate[j];
        in >> nr.gate_bias;
        for (Eigen::Index j = 0; j < m.input_dim; ++j) in >> nr.weight[j];
        in >> nr.weight_bias;
        if (!in) throw ParseError("truncated neuron record", static_cast<long>(7 + i));
        m.neurons.push_back(std::move(nr));
    }
    return m;
}

} // namespace cvxga::model
