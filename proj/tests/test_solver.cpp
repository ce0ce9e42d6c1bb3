#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cvxga/data.hpp"
#include "cvxga/errors.hpp"
#include "cvxga/rng.hpp"
#include "cvxga/sampling.hpp"
#include "cvxga/solver.hpp"

using namespace cvxga;

namespace {

data::Dataset rows_dataset(const Eigen::MatrixXd& X) {
    data::Dataset ds;
    ds.X = X;
    ds.y = Eigen::VectorXd::Ones(X.rows());
    for (int i = 0; i < X.rows(); ++i) ds.train.push_back(i);
    return ds;
}

sampling::PatternSet manual_patterns(const std::vector<std::vector<std::uint8_t>>& bit_rows,
                                     Eigen::Index d) {
    sampling::PatternSet ps;
    ps.requested = static_cast<int>(bit_rows.size());
    for (const auto& bits : bit_rows) {
        sampling::ArrangementPattern p;
        p.bits = bits;
        p.gate.direction = Eigen::VectorXd::Zero(d);
        p.gate.bias = 1.0;
        ps.patterns.push_back(std::move(p));
    }
    return ps;
}

solver::GroupLassoProblem random_problem(int n, int d, int k, std::uint64_t seed, double beta,
                                         solver::Loss loss, bool with_bias) {
    Rng rng(seed);
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) X.row(i) = rng.normal_vector(d).transpose();
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.coin() ? 1.0 : -1.0;
    auto ds = rows_dataset(X);
    ds.y = y;
    const auto ps = sampling::sample_gaussian(ds, k, with_bias, rng.next_u64());
    return solver::make_problem(X, y, ps, beta, loss, with_bias);
}

} // namespace

TEST_CASE("prox_group hand cases") {
    Eigen::VectorXd u(2);
    u << 3, 4;
    CHECK(solver::prox_group(u, 2.5).isApprox(Eigen::Vector2d(1.5, 2.0), 1e-14));
    CHECK(solver::prox_group(u, 6.0).norm() == 0.0);
    CHECK(solver::prox_group(Eigen::VectorXd::Zero(3), 1.0).norm() == 0.0);
}

TEST_CASE("single-block closed form: X=I2, y=(2,0), beta=1 -> u=(1,0)") {
    const Eigen::MatrixXd X = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd y(2);
    y << 2, 0;
    const auto ps = manual_patterns({{1, 1}}, 2);
    const auto prob = solver::make_problem(X, y, ps, 1.0);
    solver::FistaOptions opts;
    opts.tol = 1e-10;
    const auto sol = solver::fista_solve(prob, opts);
    CHECK(sol.weights.col(0).isApprox(Eigen::Vector2d(1, 0), 1e-6));

    // exact analytic optimum certifies to ~0
    solver::GroupLassoSolution exact;
    exact.weights = Eigen::Vector2d(1, 0);
    exact.biases = Eigen::VectorXd::Zero(1);
    CHECK(solver::kkt_residual(prob, exact) <= 1e-10);

    // certificate sensitivity: perturbing the optimum raises the residual
    exact.weights(0, 0) += 0.1;
    CHECK(solver::kkt_residual(prob, exact) > 1e-3);
}

TEST_CASE("beta >= beta_max gives the exact zero solution") {
    for (auto loss : {solver::Loss::squared, solver::Loss::logistic}) {
        auto prob = random_problem(30, 4, 6, 17, 1.0, loss, false);
        prob.beta = solver::beta_max(prob) * 1.001;
        const auto sol = solver::fista_solve(prob);
        CHECK(sol.weights.norm() == 0.0);
        CHECK(sol.kkt_residual == 0.0);
        CHECK(sol.converged);
        CHECK(sol.active_blocks() == 0);
    }
}

TEST_CASE("analytic loss gradients match central finite differences") {
    Rng rng(5);
    for (auto loss : {solver::Loss::squared, solver::Loss::logistic}) {
        const Eigen::VectorXd z = rng.normal_vector(12);
        Eigen::VectorXd y(12);
        for (int i = 0; i < 12; ++i) y[i] = rng.coin() ? 1.0 : -1.0;
        const Eigen::VectorXd g = solver::loss_gradient(loss, z, y);
        const double h = 1e-6;
        for (int i = 0; i < 12; ++i) {
            Eigen::VectorXd zp = z, zm = z;
            zp[i] += h;
            zm[i] -= h;
            const double fd =
                (solver::loss_value(loss, zp, y) - solver::loss_value(loss, zm, y)) / (2 * h);
            CHECK(std::abs(g[i] - fd) <= 1e-5 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("random instances reach tight KKT residuals") {
    for (auto loss : {solver::Loss::squared, solver::Loss::logistic}) {
        for (bool with_bias : {false, true}) {
            auto prob = random_problem(60, 8, 12, 23, 0.05, loss, with_bias);
            solver::FistaOptions opts;
            opts.tol = 1e-6;
            const auto sol = solver::fista_solve(prob, opts);
            CHECK(sol.converged);
            CHECK(sol.kkt_residual <= 1e-6);
            // convergence flag is exactly the residual test
            CHECK(sol.converged == (sol.kkt_residual <= opts.tol));
        }
    }
}

TEST_CASE("objective trace is nonincreasing and beats reference points") {
    auto prob = random_problem(50, 6, 10, 31, 0.1, solver::Loss::squared, true);
    const auto sol = solver::fista_solve(prob);
    const auto& trace = sol.objective_trace;
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        CHECK(trace[i + 1] <= trace[i] + 1e-12 * (1.0 + std::abs(trace[i])));
    }
    // zero point
    const double f0 = solver::loss_value(prob.loss, Eigen::VectorXd::Zero(prob.n()), prob.y);
    CHECK(trace.back() <= f0 + 1e-12);
    // random feasible points
    Rng rng(77);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXd U(prob.d(), prob.blocks());
        for (Eigen::Index c = 0; c < U.cols(); ++c) U.col(c) = 0.3 * rng.normal_vector(prob.d());
        const Eigen::VectorXd b = 0.3 * rng.normal_vector(prob.blocks());
        const double f = solver::loss_value(prob.loss, solver::forward(prob, U, b), prob.y) +
                         prob.beta * U.colwise().norm().sum();
        CHECK(trace.back() <= f + 1e-9);
    }
}

TEST_CASE("parameter validation") {
    const Eigen::MatrixXd X = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd y(2);
    y << 1, -1;
    const auto ps = manual_patterns({{1, 1}}, 2);
    CHECK_THROWS_AS(solver::make_problem(X, y, ps, 0.0), ParameterError);
    CHECK_THROWS_AS(solver::make_problem(X, Eigen::VectorXd::Zero(3), ps, 1.0), DimensionError);
    const auto prob = solver::make_problem(X, y, ps, 1.0);
    solver::FistaOptions bad;
    bad.max_iters = 0;
    CHECK_THROWS_AS(solver::fista_solve(prob, bad), ParameterError);
}

TEST_CASE("dictionary hand construction for rows e1, e2") {
    const auto ds = rows_dataset(Eigen::MatrixXd::Identity(2, 2));
    const auto dict = solver::build_dictionary(ds);
    REQUIRE(dict.K.cols() == 4); // q = 2n for d=2
    CHECK(dict.skipped_degenerate == 0);
    CHECK((dict.K.array() >= 0.0).all());

    // column for +cross(e1) = (0,-1): kappa values (0, 0); for -cross(e1): (0, 1)
    CHECK(dict.K.col(0).isApprox(Eigen::Vector2d(0, 0), 1e-14));
    CHECK(dict.K(0, 0) == 0.0);
    CHECK(dict.K.col(1).isApprox(Eigen::Vector2d(0, 1), 1e-14));
    // orientations alternate per tuple
    CHECK(dict.orientations == std::vector<int>{1, -1, 1, -1});
    CHECK(dict.tuples[0] == std::vector<int>{0});
    CHECK(dict.tuples[2] == std::vector<int>{1});
}

TEST_CASE("dictionary column subsampling") {
    Rng rng(3);
    Eigen::MatrixXd X(10, 2);
    for (int i = 0; i < 10; ++i) X.row(i) = rng.normal_vector(2).transpose();
    const auto full = solver::build_dictionary(rows_dataset(X));
    CHECK(full.K.cols() == 20);
    const auto sub = solver::build_dictionary(rows_dataset(X), 7, 99);
    CHECK(sub.K.cols() == 7);
    CHECK(sub.tuples.size() == 7);
}

TEST_CASE("scalar lasso closed form: K=[2], y=4, beta=1 -> z=1.75") {
    Eigen::MatrixXd K(1, 1);
    K << 2;
    Eigen::VectorXd y(1);
    y << 4;
    solver::FistaOptions opts;
    opts.tol = 1e-10;
    const auto sol = solver::lasso_solve(K, y, 1.0, solver::Loss::squared, opts);
    CHECK(sol.z[0] == doctest::Approx(1.75).epsilon(1e-8));
}

TEST_CASE("lasso beta above the gradient bound gives zero") {
    Rng rng(21);
    Eigen::MatrixXd K = Eigen::MatrixXd::Random(8, 3).cwiseAbs();
    const Eigen::VectorXd y = rng.normal_vector(8);
    const double bmax =
        (K.transpose() * solver::loss_gradient(solver::Loss::squared, Eigen::VectorXd::Zero(8), y))
            .lpNorm<Eigen::Infinity>();
    const auto sol = solver::lasso_solve(K, y, bmax * 1.01);
    CHECK(sol.z.norm() == 0.0);
    CHECK(sol.converged);
}

TEST_CASE("two-column lasso beats a brute-force grid") {
    Rng rng(55);
    Eigen::MatrixXd K(12, 2);
    for (int i = 0; i < 12; ++i) K.row(i) = rng.normal_vector(2).cwiseAbs().transpose();
    const Eigen::VectorXd y = rng.normal_vector(12);
    const double beta = 0.3;
    solver::FistaOptions opts;
    opts.tol = 1e-9;
    const auto sol = solver::lasso_solve(K, y, beta, solver::Loss::squared, opts);
    const double fstar = solver::loss_value(solver::Loss::squared, K * sol.z, y) +
                         beta * sol.z.lpNorm<1>();

    double grid_best = 1e300;
    Eigen::Vector2d z;
    for (double a = -3.0; a <= 3.0; a += 0.01) {
        for (double b = -3.0; b <= 3.0; b += 0.01) {
            z << a, b;
            const double f =
                solver::loss_value(solver::Loss::squared, K * z, y) + beta * z.lpNorm<1>();
            grid_best = std::min(grid_best, f);
        }
    }
    CHECK(fstar <= grid_best + 1e-6);
    // nonnegative K does not force a sign on z (the grid optimum may be
    // anywhere); only optimality matters, checked above
}

TEST_CASE("group-lasso regularization path") {
    Rng rng(88);
    Eigen::MatrixXd X(40, 2);
    for (int i = 0; i < 40; ++i) X.row(i) = rng.normal_vector(2).transpose();
    Eigen::VectorXd y(40);
    for (int i = 0; i < 40; ++i) y[i] = X(i, 0) * X(i, 1) > 0 ? 1.0 : -1.0;
    auto ds = rows_dataset(X);
    ds.y = y;
    const auto ps = sampling::sample_ga(ds, 30, nullptr, false, 7);
    auto prob = solver::make_problem(X, y, ps, 1.0, solver::Loss::squared, false);

    solver::FistaOptions opts;
    opts.tol = 1e-6;
    opts.max_iters = 3000;
    const auto path = solver::reg_path(prob, 6, opts);
    REQUIRE(path.betas.size() == 6);
    for (std::size_t i = 0; i + 1 < path.betas.size(); ++i) {
        CHECK(path.betas[i + 1] < path.betas[i]);
    }
    // first grid point is beta_max -> zero solution
    CHECK(path.solutions.front().weights.norm() == 0.0);
    CHECK(path.active_counts.front() == 0);
    CHECK(path.active_counts.back() >= path.active_counts.front());

    // warm starting does strictly less work than cold starting
    int cold_total = 0;
    for (double beta : path.betas) {
        prob.beta = beta;
        cold_total += solver::fista_solve(prob, opts).iterations;
    }
    CHECK(path.total_iterations < cold_total);
}

TEST_CASE("spiral path grows active blocks as beta shrinks") {
    const auto spiral = data::make_spiral(160, 0.05, 20260823ull);
    const auto ps = sampling::sample_ga(spiral, 40, nullptr, false, 5);
    auto prob = solver::make_problem(spiral.X, spiral.y, ps, 1.0, solver::Loss::squared, false);
    solver::FistaOptions opts;
    opts.tol = 1e-6;
    opts.max_iters = 20000;
    const auto path = solver::reg_path(prob, 11, opts);
    int monotone = 0;
    const int pairs = static_cast<int>(path.active_counts.size()) - 1;
    for (int i = 0; i < pairs; ++i) {
        if (path.active_counts[static_cast<std::size_t>(i) + 1] >=
            path.active_counts[static_cast<std::size_t>(i)]) {
            ++monotone;
        }
    }
    CHECK(monotone >= (9 * pairs + 9) / 10);
    CHECK(path.active_counts.back() > path.active_counts.front());
}

TEST_CASE("lasso regularization path mirrors the group path contract") {
    Rng rng(91);
    Eigen::MatrixXd X(20, 2);
    for (int i = 0; i < 20; ++i) X.row(i) = rng.normal_vector(2).transpose();
    auto ds = rows_dataset(X);
    for (int i = 0; i < 20; ++i) ds.y[i] = rng.coin() ? 1.0 : -1.0;
    const auto dict = solver::build_dictionary(ds);
    const auto path = solver::lasso_reg_path(dict.K, ds.y, 5);
    REQUIRE(path.betas.size() == 5);
    CHECK(path.solutions.front().z.norm() == 0.0);
    CHECK(path.active_counts.front() == 0);
    CHECK(path.active_counts.back() >= 1);
}
