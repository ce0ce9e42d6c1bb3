// Command-line front end: train / compare / chambers / regpath / fetch.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvxga/chamber_lab.hpp"
#include "cvxga/data.hpp"
#include "cvxga/embeddings.hpp"
#include "cvxga/errors.hpp"
#include "cvxga/model.hpp"
#include "cvxga/rng.hpp"
#include "cvxga/sampling.hpp"
#include "cvxga/sketch.hpp"
#include "cvxga/solver.hpp"
#include "cvxga/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cvxga;

namespace {

// Files written by the current command; removed if it fails partway.
std::vector<std::string> g_written;

void write_atomic(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path().empty() ? "." : fs::path(path).parent_path().string());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ParameterError("cannot open '" + tmp + "' for writing");
        out << content;
    }
    fs::rename(tmp, path);
    g_written.push_back(path);
}

void remove_partial_outputs() {
    for (const auto& p : g_written) {
        std::error_code ec;
        fs::remove(p, ec);
    }
    g_written.clear();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return Rng(seed).derive(stream).next_u64();
}

// ---------------------------------------------------------------------------
// shared option blocks

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::string config_path;
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--seed", c.seed, "Master RNG seed");
    sub->add_option("--out-dir", c.out_dir, "Output directory");
    sub->add_option("--config", c.config_path, "JSON file with option defaults")
        ->check(CLI::ExistingFile);
}

struct DatasetOpts {
    std::string dataset = "spiral"; // spiral | synthetic | <path>
    std::string label_col = "y";
    std::string delimiter = ",";
    int spiral_n = 160;
    double spiral_noise = 0.05;
    int synthetic_n = 2000;
    int synthetic_d = 64;
    double train_frac = 0.8, val_frac = 0.1, test_frac = 0.1;
    bool standardize = false;
};

void add_dataset(CLI::App* sub, DatasetOpts& d) {
    sub->add_option("--dataset", d.dataset, "spiral, synthetic, or a delimited file path");
    sub->add_option("--label-col", d.label_col, "Label column name for file datasets");
    sub->add_option("--delimiter", d.delimiter, "Field delimiter for file datasets");
    sub->add_option("--spiral-n", d.spiral_n, "Training points for the spiral dataset");
    sub->add_option("--spiral-noise", d.spiral_noise, "Spiral noise sigma");
    sub->add_option("--synthetic-n", d.synthetic_n, "Rows for the synthetic dataset");
    sub->add_option("--synthetic-d", d.synthetic_d, "Features for the synthetic dataset");
    sub->add_option("--train-frac", d.train_frac, "Train fraction for file/synthetic splits");
    sub->add_option("--val-frac", d.val_frac, "Validation fraction");
    sub->add_option("--test-frac", d.test_frac, "Test fraction");
    sub->add_option("--standardize", d.standardize, "Standardize features on train statistics");
}

json dataset_config(const DatasetOpts& d) {
    return json{{"dataset", d.dataset},       {"label_col", d.label_col},
                {"delimiter", d.delimiter},   {"spiral_n", d.spiral_n},
                {"spiral_noise", d.spiral_noise}, {"synthetic_n", d.synthetic_n},
                {"synthetic_d", d.synthetic_d},   {"train_frac", d.train_frac},
                {"val_frac", d.val_frac},     {"test_frac", d.test_frac},
                {"standardize", d.standardize}};
}

data::Dataset load_dataset(const DatasetOpts& d, std::uint64_t seed) {
    data::Dataset ds;
    if (d.dataset == "spiral") {
        // Fresh validation/test spirals from derived seeds; the spiral is a
        // generator, so held-out data is just more of it.
        const data::Dataset tr = data::make_spiral(d.spiral_n, d.spiral_noise, mix_seed(seed, 1));
        const data::Dataset va = data::make_spiral(d.spiral_n, d.spiral_noise, mix_seed(seed, 2));
        const data::Dataset te = data::make_spiral(d.spiral_n, d.spiral_noise, mix_seed(seed, 3));
        const Eigen::Index n = tr.n();
        ds.X.resize(3 * n, 2);
        ds.y.resize(3 * n);
        ds.X << tr.X, va.X, te.X;
        ds.y << tr.y, va.y, te.y;
        ds.name = "spiral";
        for (int i = 0; i < n; ++i) ds.train.push_back(i);
        for (int i = 0; i < n; ++i) ds.validation.push_back(static_cast<int>(n) + i);
        for (int i = 0; i < n; ++i) ds.test.push_back(2 * static_cast<int>(n) + i);
    } else if (d.dataset == "synthetic") {
        ds = data::make_two_cluster(d.synthetic_n, d.synthetic_d, 0.05, mix_seed(seed, 1));
        ds = data::split(ds, d.train_frac, d.val_frac, d.test_frac, mix_seed(seed, 2));
    } else {
        if (d.delimiter.size() != 1) throw ParameterError("delimiter must be one character");
        ds = data::load_delimited(d.dataset, d.label_col, d.delimiter[0]);
        ds = data::split(ds, d.train_frac, d.val_frac, d.test_frac, mix_seed(seed, 2));
    }
    if (d.standardize) ds = data::standardize(ds, "train");
    return ds;
}

struct SamplerOpts {
    std::string sampler = "ga"; // gaussian | ga | random | linear
    int k = 200;
    int sketch_dim = 0;         // 0 = no sketch
    bool with_bias = true;
};

void add_sampler(CLI::App* sub, SamplerOpts& s) {
    sub->add_option("--sampler", s.sampler, "gaussian, ga, random, or linear");
    sub->add_option("--k", s.k, "Number of arrangement patterns to sample");
    sub->add_option("--sketch-dim", s.sketch_dim, "Sketch dimension r (0 disables sketching)");
    sub->add_option("--with-bias", s.with_bias, "Sample gates with bias terms");
}

json sampler_config(const SamplerOpts& s) {
    return json{{"sampler", s.sampler}, {"k", s.k}, {"sketch_dim", s.sketch_dim},
                {"with_bias", s.with_bias}};
}

sampling::PatternSet sample_patterns(const std::string& method, const data::Dataset& train,
                                     const SamplerOpts& s, std::uint64_t seed) {
    if (method == "linear") {
        sampling::PatternSet ps;
        ps.requested = 1;
        ps.patterns.push_back(sampling::all_ones_pattern(train));
        return ps;
    }
    if (method == "gaussian") return sampling::sample_gaussian(train, s.k, s.with_bias, seed);
    if (method == "random") return sampling::sample_random_gates(train, s.k, s.with_bias, seed);
    if (method == "ga") {
        const int d = static_cast<int>(train.d());
        if (s.sketch_dim > 0 && s.sketch_dim < d) {
            const auto sk = sketch::make_sketch(s.sketch_dim, d, mix_seed(seed, 77));
            return sampling::sample_ga(train, s.k, &sk, s.with_bias, seed);
        }
        return sampling::sample_ga(train, s.k, nullptr, s.with_bias, seed);
    }
    throw ParameterError("unknown sampler '" + method + "'");
}

struct SolverOpts {
    double beta = 1e-3;
    std::string loss = "squared";
    int max_iters = 5000;
    double tol = 1e-5;
};

void add_solver(CLI::App* sub, SolverOpts& s) {
    sub->add_option("--beta", s.beta, "Group-lasso regularization weight");
    sub->add_option("--loss", s.loss, "squared or logistic");
    sub->add_option("--max-iters", s.max_iters, "Solver iteration cap");
    sub->add_option("--tol", s.tol, "KKT residual tolerance");
}

json solver_config(const SolverOpts& s) {
    return json{{"beta", s.beta}, {"loss", s.loss}, {"max_iters", s.max_iters}, {"tol", s.tol}};
}

solver::Loss parse_loss(const std::string& name) {
    if (name == "squared") return solver::Loss::squared;
    if (name == "logistic") return solver::Loss::logistic;
    throw ParameterError("unknown loss '" + name + "'");
}

// ---------------------------------------------------------------------------
// single training run (shared by train / compare / regpath)

struct TrainResult {
    model::GatedReluModel model;
    sampling::PatternSet patterns;
    solver::GroupLassoSolution solution;
    double solver_seconds = 0.0;
    json metrics; // per-split accuracy/loss
};

json split_metrics(const model::GatedReluModel& m, const data::Dataset& ds,
                   const std::vector<int>& idx, solver::Loss loss) {
    if (idx.empty()) return json(nullptr);
    const auto mt = model::evaluate(m, data::rows_of(ds, idx), data::labels_of(ds, idx), loss);
    return json{{"accuracy", mt.accuracy},
                {"loss", mt.loss},
                {"count", mt.count},
                {"confusion", {{"tp", mt.true_pos}, {"tn", mt.true_neg},
                               {"fp", mt.false_pos}, {"fn", mt.false_neg}}}};
}

TrainResult run_training(const data::Dataset& ds, const std::string& method,
                         const SamplerOpts& sopt, const SolverOpts& solv, std::uint64_t seed) {
    if (sopt.k < 1) throw ParameterError("k must be >= 1");
    const data::Dataset train = data::subset(ds, ds.train);

    TrainResult res;
    res.patterns = sample_patterns(method, train, sopt, mix_seed(seed, 11));
    const bool with_bias = method == "linear" ? true : sopt.with_bias;
    const auto problem = solver::make_problem(train.X, train.y, res.patterns, solv.beta,
                                              parse_loss(solv.loss), with_bias);
    solver::FistaOptions fopts;
    fopts.max_iters = solv.max_iters;
    fopts.tol = solv.tol;

    const auto t0 = std::chrono::steady_clock::now();
    res.solution = solver::fista_solve(problem, fopts);
    const auto t1 = std::chrono::steady_clock::now();
    res.solver_seconds = std::chrono::duration<double>(t1 - t0).count();

    res.model = model::assemble(res.patterns, res.solution);
    res.model.beta = solv.beta;
    res.model.seed = seed;

    res.metrics = json{{"train", split_metrics(res.model, ds, ds.train, parse_loss(solv.loss))},
                       {"validation", split_metrics(res.model, ds, ds.validation, parse_loss(solv.loss))},
                       {"test", split_metrics(res.model, ds, ds.test, parse_loss(solv.loss))},
                       {"kkt_residual", res.solution.kkt_residual},
                       {"iterations", res.solution.iterations},
                       {"converged", res.solution.converged},
                       {"objective", res.solution.objective_trace.back()},
                       {"patterns_requested", res.patterns.requested},
                       {"patterns_achieved", res.patterns.achieved()},
                       {"active_neurons", static_cast<long>(res.model.neurons.size())}};
    return res;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const CommonOpts& common, const DatasetOpts& dopt, const SamplerOpts& sopt,
              const SolverOpts& solv) {
    const data::Dataset ds = load_dataset(dopt, common.seed);
    TrainResult res = run_training(ds, sopt.sampler, sopt, solv, common.seed);

    const json config{{"command", "train"},       {"seed", common.seed},
                      {"out_dir", common.out_dir}, {"data", dataset_config(dopt)},
                      {"sampler", sampler_config(sopt)}, {"solver", solver_config(solv)}};
    json metrics{{"config", config},
                 {"version", kVersion},
                 {"dataset", {{"name", ds.name}, {"n", ds.n()}, {"d", ds.d()},
                              {"train", ds.train.size()}, {"validation", ds.validation.size()},
                              {"test", ds.test.size()}}},
                 {"results", res.metrics}};

    fs::create_directories(common.out_dir);
    const std::string model_path = common.out_dir + "/model.txt";
    model::save_model(res.model, model_path + ".tmp");
    fs::rename(model_path + ".tmp", model_path);
    g_written.push_back(model_path);
    write_atomic(common.out_dir + "/metrics.json", metrics.dump(2) + "\n");
    // Wall time lives in its own file so metrics.json stays byte-identical
    // across reruns with the same seed.
    write_atomic(common.out_dir + "/timing.json",
                 json{{"solver_seconds", res.solver_seconds}}.dump(2) + "\n");
    std::cout << metrics["results"].dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// compare

std::vector<int> parse_n_grid(const std::string& spec) {
    std::vector<int> out;
    if (spec.find(':') != std::string::npos) {
        int lo = 0, hi = 0, step = 0;
        if (std::sscanf(spec.c_str(), "%d:%d:%d", &lo, &hi, &step) != 3 || step <= 0 || lo > hi) {
            throw ParameterError("bad n-grid '" + spec + "', expected lo:hi:step");
        }
        for (int n = lo; n <= hi; n += step) out.push_back(n);
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw ParameterError("empty n-grid");
    return out;
}

std::vector<double> parse_beta_grid(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw ParameterError("empty beta grid");
    std::sort(out.rbegin(), out.rend()); // descending: ties resolve to larger beta
    return out;
}

int cmd_compare(const CommonOpts& common, const DatasetOpts& dopt, const SamplerOpts& sopt,
                SolverOpts solv, const std::string& n_grid_spec, const std::string& methods_spec,
                const std::string& beta_grid_spec, int trials) {
    if (trials < 1) throw ParameterError("trials must be >= 1");
    data::Dataset ds = load_dataset(dopt, common.seed);
    if (ds.test.empty() || ds.validation.empty()) {
        throw ParameterError("compare needs validation and test splits");
    }
    const std::vector<int> n_grid = parse_n_grid(n_grid_spec);
    const std::vector<double> betas = parse_beta_grid(beta_grid_spec);
    std::vector<std::string> methods;
    {
        std::stringstream ss(methods_spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) methods.push_back(tok);
    }
    const int max_n = *std::max_element(n_grid.begin(), n_grid.end());
    if (max_n > static_cast<int>(ds.train.size())) {
        throw ParameterError("n-grid exceeds train split size " + std::to_string(ds.train.size()));
    }

    const Eigen::MatrixXd val_X = data::rows_of(ds, ds.validation);
    const Eigen::VectorXd val_y = data::labels_of(ds, ds.validation);
    const Eigen::MatrixXd test_X = data::rows_of(ds, ds.test);
    const Eigen::VectorXd test_y = data::labels_of(ds, ds.test);

    std::ostringstream detail, table;
    detail << "method,n,trial,beta,val_accuracy,test_accuracy\n";
    table << "method,n,mean_test_accuracy,std_test_accuracy\n";
    json summary_rows = json::array();

    for (const auto& method : methods) {
        for (int n : n_grid) {
            std::vector<double> accs;
            for (int trial = 0; trial < trials; ++trial) {
                const std::uint64_t trial_seed =
                    mix_seed(common.seed, 1000003ull * static_cast<std::uint64_t>(n) + trial);
                Rng rng(trial_seed);
                std::vector<int> rows = rng.sample_without_replacement(
                    static_cast<int>(ds.train.size()), n);
                data::Dataset sub;
                {
                    std::vector<int> abs_rows;
                    abs_rows.reserve(rows.size());
                    for (int r : rows) abs_rows.push_back(ds.train[static_cast<std::size_t>(r)]);
                    sub = data::subset(ds, abs_rows);
                }
                // beta selected on the validation split, descending grid so
                // ties keep the larger beta
                double best_beta = betas.front();
                double best_val = -1.0;
                double best_test = 0.0;
                for (double beta : betas) {
                    solv.beta = beta;
                    TrainResult r = run_training(sub, method, sopt, solv, trial_seed);
                    const double val_acc =
                        model::evaluate(r.model, val_X, val_y, parse_loss(solv.loss)).accuracy;
                    if (val_acc > best_val) {
                        best_val = val_acc;
                        best_beta = beta;
                        best_test =
                            model::evaluate(r.model, test_X, test_y, parse_loss(solv.loss)).accuracy;
                    }
                }
                accs.push_back(best_test);
                detail << method << "," << n << "," << trial << "," << best_beta << ","
                       << best_val << "," << best_test << "\n";
            }
            double mean = 0.0;
            for (double a : accs) mean += a;
            mean /= static_cast<double>(accs.size());
            double var = 0.0;
            for (double a : accs) var += (a - mean) * (a - mean);
            const double sd = accs.size() > 1 ? std::sqrt(var / (static_cast<double>(accs.size()) - 1.0)) : 0.0;
            table << method << "," << n << "," << mean << "," << sd << "\n";
            summary_rows.push_back(json{{"method", method}, {"n", n}, {"mean", mean}, {"std", sd}});
        }
    }

    const json config{{"command", "compare"}, {"seed", common.seed}, {"out_dir", common.out_dir},
                      {"data", dataset_config(dopt)}, {"sampler", sampler_config(sopt)},
                      {"solver", solver_config(solv)}, {"n_grid", n_grid_spec},
                      {"methods", methods_spec}, {"beta_grid", beta_grid_spec},
                      {"trials", trials}};
    write_atomic(common.out_dir + "/compare.csv", table.str());
    write_atomic(common.out_dir + "/compare_trials.csv", detail.str());
    write_atomic(common.out_dir + "/compare.json",
                 json{{"config", config}, {"version", kVersion}, {"rows", summary_rows}}.dump(2) + "\n");
    std::cout << table.str();
    return 0;
}

// ---------------------------------------------------------------------------
// chambers

int cmd_chambers(const CommonOpts& common, int uniformity_n, long uniformity_draws,
                 int minchamber_n, int minchamber_trials, int ks_trials) {
    const auto freq = chamber_lab::ga_frequency_test(uniformity_n, uniformity_draws,
                                                     mix_seed(common.seed, 1));
    const auto mc = chamber_lab::min_chamber_statistic(minchamber_n, minchamber_trials,
                                                       mix_seed(common.seed, 2));
    double mean = 0.0;
    for (double v : mc.geometry) mean += v;
    mean /= static_cast<double>(mc.geometry.size());
    const auto ks_samples = chamber_lab::min_chamber_statistic(minchamber_n, ks_trials,
                                                               mix_seed(common.seed, 3));
    const double ks = chamber_lab::ks_statistic(ks_samples.geometry, ks_samples.oracle);

    const bool freq_ok = freq.max_rel_deviation < 0.15 && freq.uniform_ok;
    const bool mean_ok = mean >= 0.35 && mean <= 0.65;
    const bool ks_ok = ks < 0.05;

    const json config{{"command", "chambers"}, {"seed", common.seed}, {"out_dir", common.out_dir},
                      {"uniformity_n", uniformity_n}, {"uniformity_draws", uniformity_draws},
                      {"minchamber_n", minchamber_n}, {"minchamber_trials", minchamber_trials},
                      {"ks_trials", ks_trials}};
    const json report{
        {"config", config},
        {"version", kVersion},
        {"uniformity", {{"max_rel_deviation", freq.max_rel_deviation},
                        {"max_rel_deviation_threshold", 0.15},
                        {"chi_square", freq.chi_square},
                        {"chi_square_critical_alpha_0.01", freq.chi_square_critical},
                        {"pass", freq_ok}}},
        {"min_chamber", {{"mean_n2_minprob", mean},
                         {"mean_bounds", {0.35, 0.65}},
                         {"ks_distance", ks},
                         {"ks_threshold", 0.05},
                         {"pass", mean_ok && ks_ok}}},
        {"pass", freq_ok && mean_ok && ks_ok}};

    std::ostringstream census;
    census << "chamber,lo,hi,measure,count\n";
    census.precision(17);
    for (std::size_t i = 0; i < freq.census.chambers.size(); ++i) {
        const auto& c = freq.census.chambers[i];
        census << i << "," << c.lo << "," << c.hi << "," << c.measure << ","
               << freq.counts[i] << "\n";
    }
    write_atomic(common.out_dir + "/chambers_report.json", report.dump(2) + "\n");
    write_atomic(common.out_dir + "/chambers_census.csv", census.str());
    std::cout << report.dump(2) << "\n";
    return report["pass"].get<bool>() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// regpath

int cmd_regpath(const CommonOpts& common, const DatasetOpts& dopt, const SamplerOpts& sopt,
                const SolverOpts& solv, const std::string& method, int grid_size,
                int grid_resolution) {
    const data::Dataset ds = load_dataset(dopt, common.seed);
    const data::Dataset train = data::subset(ds, ds.train);
    const solver::Loss loss = parse_loss(solv.loss);

    solver::FistaOptions fopts;
    fopts.max_iters = solv.max_iters;
    fopts.tol = solv.tol;

    std::vector<double> betas;
    std::vector<model::GatedReluModel> models;
    std::vector<int> active;

    if (method == "lasso") {
        const auto dict = solver::build_dictionary(train);
        const auto path = solver::lasso_reg_path(dict.K, train.y, grid_size, loss, fopts);
        betas = path.betas;
        active = path.active_counts;
        for (const auto& s : path.solutions) {
            models.push_back(model::assemble_lasso(dict, s, train.d()));
        }
    } else {
        sampling::PatternSet patterns = sample_patterns(method, train, sopt, mix_seed(common.seed, 11));
        auto problem = solver::make_problem(train.X, train.y, patterns, 1.0, loss, sopt.with_bias);
        const auto path = solver::reg_path(problem, grid_size, fopts);
        betas = path.betas;
        active = path.active_counts;
        for (const auto& s : path.solutions) models.push_back(model::assemble(patterns, s));
    }

    std::ostringstream summary;
    summary << "beta,active_blocks,train_accuracy,validation_accuracy,test_accuracy\n";
    json rows = json::array();
    fs::create_directories(common.out_dir);
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const auto& m = models[i];
        const double tr_acc = model::evaluate(m, train.X, train.y, loss).accuracy;
        const double va_acc = ds.validation.empty()
            ? -1.0
            : model::evaluate(m, data::rows_of(ds, ds.validation), data::labels_of(ds, ds.validation), loss).accuracy;
        const double te_acc = ds.test.empty()
            ? -1.0
            : model::evaluate(m, data::rows_of(ds, ds.test), data::labels_of(ds, ds.test), loss).accuracy;
        summary << betas[i] << "," << active[static_cast<std::size_t>(i)] << "," << tr_acc << ","
                << va_acc << "," << te_acc << "\n";
        rows.push_back(json{{"beta", betas[i]}, {"active_blocks", active[i]},
                            {"train_accuracy", tr_acc}, {"validation_accuracy", va_acc},
                            {"test_accuracy", te_acc}});

        if (ds.d() == 2) {
            const double x_lo = ds.X.col(0).minCoeff(), x_hi = ds.X.col(0).maxCoeff();
            const double y_lo = ds.X.col(1).minCoeff(), y_hi = ds.X.col(1).maxCoeff();
            const double mx = 0.1 * (x_hi - x_lo), my = 0.1 * (y_hi - y_lo);
            const auto grid = model::decision_grid(m, x_lo - mx, x_hi + mx, y_lo - my, y_hi + my,
                                                   grid_resolution);
            std::ostringstream g;
            g.precision(17);
            g << "x,y,score\n";
            for (const auto& pt : grid) g << pt.x << "," << pt.y << "," << pt.score << "\n";
            char name[64];
            std::snprintf(name, sizeof(name), "regpath_grid_%03zu.csv", i);
            write_atomic(common.out_dir + "/" + name, g.str());
        }
    }

    const json config{{"command", "regpath"}, {"seed", common.seed}, {"out_dir", common.out_dir},
                      {"data", dataset_config(dopt)}, {"sampler", sampler_config(sopt)},
                      {"solver", solver_config(solv)}, {"method", method},
                      {"grid_size", grid_size}, {"grid_resolution", grid_resolution}};
    write_atomic(common.out_dir + "/regpath_summary.csv", summary.str());
    write_atomic(common.out_dir + "/regpath.json",
                 json{{"config", config}, {"version", kVersion}, {"rows", rows}}.dump(2) + "\n");
    std::cout << summary.str();
    return 0;
}

// ---------------------------------------------------------------------------
// fetch

int cmd_fetch(const CommonOpts& common, const std::string& texts_path,
              const std::string& labels_path, const embeddings::EmbeddingFetchConfig& cfg,
              const std::string& out_name) {
    std::vector<std::string> texts;
    {
        std::ifstream in(texts_path);
        if (!in) throw ParameterError("cannot open texts file '" + texts_path + "'");
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            texts.push_back(line);
        }
    }
    Eigen::VectorXd labels = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(texts.size()));
    if (!labels_path.empty()) {
        std::ifstream in(labels_path);
        if (!in) throw ParameterError("cannot open labels file '" + labels_path + "'");
        std::string line;
        Eigen::Index i = 0;
        while (std::getline(in, line) && i < labels.size()) labels[i++] = std::stod(line);
        if (i != labels.size()) throw ParameterError("labels file shorter than texts file");
    }

    const Eigen::MatrixXd emb = embeddings::fetch_embeddings(texts, cfg);

    data::Dataset ds;
    ds.X = emb;
    ds.y = labels;
    ds.name = texts_path;
    fs::create_directories(common.out_dir);
    const std::string out_path = common.out_dir + "/" + out_name;
    data::save_delimited(ds, out_path + ".tmp");
    fs::rename(out_path + ".tmp", out_path);
    g_written.push_back(out_path);

    const json config{{"command", "fetch"}, {"seed", common.seed}, {"out_dir", common.out_dir},
                      {"endpoint", cfg.endpoint}, {"model", cfg.model},
                      {"api_key_env", cfg.api_key_env}, {"batch_size", cfg.batch_size},
                      {"timeout_seconds", cfg.timeout_seconds}, {"retries", cfg.retries},
                      {"texts", texts_path}, {"labels", labels_path}, {"out", out_name}};
    write_atomic(common.out_dir + "/fetch.json",
                 json{{"config", config}, {"version", kVersion},
                      {"rows", emb.rows()}, {"dim", emb.cols()}}.dump(2) + "\n");
    std::cout << "fetched " << emb.rows() << " embeddings of dimension " << emb.cols() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// --config: inject JSON values as CLI tokens ahead of the user's own flags

std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty() || args.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw ParameterError("cannot open config file '" + config_path + "'");
    json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        throw ParameterError("bad config JSON: " + std::string(e.what()));
    }
    if (!cfg.is_object()) throw ParameterError("config must be a JSON object");

    std::vector<std::string> injected;
    for (const auto& [key, value] : cfg.items()) {
        injected.push_back("--" + key);
        if (value.is_string()) injected.push_back(value.get<std::string>());
        else injected.push_back(value.dump());
    }
    // subcommand first, then config defaults, then explicit flags (TakeLast)
    std::vector<std::string> out;
    out.push_back(args.front());
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convex gated-ReLU network training via randomized geometric algebra"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOpts common;
    DatasetOpts dopt;
    SamplerOpts sopt;
    SolverOpts solv;

    auto* train = app.add_subcommand("train", "Sample patterns, solve, and save a model");
    add_common(train, common);
    add_dataset(train, dopt);
    add_sampler(train, sopt);
    add_solver(train, solv);

    auto* compare = app.add_subcommand("compare", "Accuracy vs training-set size per method");
    std::string n_grid = "200:2000:200";
    std::string methods = "gaussian,ga,linear";
    std::string beta_grid = "1e-3,1e-4,1e-5,1e-6";
    int trials = 5;
    add_common(compare, common);
    add_dataset(compare, dopt);
    add_sampler(compare, sopt);
    add_solver(compare, solv);
    compare->add_option("--n-grid", n_grid, "lo:hi:step or comma list of training sizes");
    compare->add_option("--methods", methods, "Comma list: gaussian,ga,random,linear");
    compare->add_option("--beta-grid", beta_grid, "Comma list of betas for validation selection");
    compare->add_option("--trials", trials, "Independent trials per configuration");

    auto* chambers = app.add_subcommand("chambers", "2D chamber-measure theorem checks");
    int uniformity_n = 50;
    long uniformity_draws = 200000;
    int minchamber_n = 200;
    int minchamber_trials = 1000;
    int ks_trials = 2000;
    add_common(chambers, common);
    chambers->add_option("--uniformity-n", uniformity_n, "Rows for the uniformity test");
    chambers->add_option("--uniformity-draws", uniformity_draws, "Sampler draws");
    chambers->add_option("--minchamber-n", minchamber_n, "Rows for the min-chamber test");
    chambers->add_option("--minchamber-trials", minchamber_trials, "Trials for the mean statistic");
    chambers->add_option("--ks-trials", ks_trials, "Matched samples for the KS comparison");

    auto* regpath = app.add_subcommand("regpath", "Warm-started beta path with decision grids");
    std::string rp_method = "ga";
    int grid_size = 10;
    int grid_resolution = 100;
    add_common(regpath, common);
    add_dataset(regpath, dopt);
    add_sampler(regpath, sopt);
    add_solver(regpath, solv);
    regpath->add_option("--method", rp_method, "gaussian, ga, random, linear, or lasso");
    regpath->add_option("--grid-size", grid_size, "Number of beta grid points");
    regpath->add_option("--grid-resolution", grid_resolution, "Decision grid resolution");

    auto* fetch = app.add_subcommand("fetch", "Fetch embeddings into a dataset file");
    std::string texts_path, labels_path;
    std::string out_name = "embeddings.csv";
    embeddings::EmbeddingFetchConfig fcfg;
    add_common(fetch, common);
    fetch->add_option("--texts", texts_path, "File with one text per line")->required();
    fetch->add_option("--labels", labels_path, "Optional file with one numeric label per line");
    fetch->add_option("--endpoint", fcfg.endpoint, "Embeddings endpoint URL");
    fetch->add_option("--model", fcfg.model, "Model identifier");
    fetch->add_option("--key-env", fcfg.api_key_env, "Environment variable holding the API key");
    fetch->add_option("--batch-size", fcfg.batch_size, "Texts per request");
    fetch->add_option("--timeout", fcfg.timeout_seconds, "Request timeout in seconds");
    fetch->add_option("--retries", fcfg.retries, "Retries on 429/5xx");
    fetch->add_option("--out", out_name, "Output file name inside out-dir");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());

        if (train->parsed()) return cmd_train(common, dopt, sopt, solv);
        if (compare->parsed()) {
            return cmd_compare(common, dopt, sopt, solv, n_grid, methods, beta_grid, trials);
        }
        if (chambers->parsed()) {
            return cmd_chambers(common, uniformity_n, uniformity_draws, minchamber_n,
                                minchamber_trials, ks_trials);
        }
        if (regpath->parsed()) {
            return cmd_regpath(common, dopt, sopt, solv, rp_method, grid_size, grid_resolution);
        }
        if (fetch->parsed()) return cmd_fetch(common, texts_path, labels_path, fcfg, out_name);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        remove_partial_outputs();
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
