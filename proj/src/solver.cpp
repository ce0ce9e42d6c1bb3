#include "cvxga/solver.hpp"

#include <cmath>
#include <string>

#include "cvxga/errors.hpp"
#include "cvxga/geometry.hpp"
#include "cvxga/rng.hpp"

namespace cvxga::solver {

GroupLassoProblem make_problem(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const sampling::PatternSet& patterns, double beta,
                               Loss loss, bool with_bias) {
    if (X.rows() != y.size()) throw DimensionError("make_problem: X/y row mismatch");
    if (beta <= 0.0) throw ParameterError("make_problem: beta must be positive");
    if (patterns.patterns.empty()) throw ParameterError("make_problem: empty pattern set");
    GroupLassoProblem p;
    p.X = X;
    p.y = y;
    p.beta = beta;
    p.loss = loss;
    p.with_bias = with_bias;
    const Eigen::Index n = X.rows();
    const Eigen::Index k = static_cast<Eigen::Index>(patterns.patterns.size());
    p.masks.resize(n, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& bits = patterns.patterns[static_cast<std::size_t>(i)].bits;
        if (static_cast<Eigen::Index>(bits.size()) != n) {
            throw DimensionError("make_problem: pattern length mismatch");
        }
        for (Eigen::Index r = 0; r < n; ++r) p.masks(r, i) = bits[static_cast<std::size_t>(r)];
    }
    return p;
}

int GroupLassoSolution::active_blocks(double tol) const {
    int c = 0;
    for (Eigen::Index i = 0; i < weights.cols(); ++i) {
        if (weights.col(i).norm() > tol) ++c;
    }
    return c;
}

Eigen::VectorXd prox_group(const Eigen::VectorXd& u, double t) {
    if (t < 0.0) throw ParameterError("prox_group: t must be nonnegative");
    const double nrm = u.norm();
    if (nrm <= t) return Eigen::VectorXd::Zero(u.size());
    return (1.0 - t / nrm) * u;
}

double loss_value(Loss loss, const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
    if (loss == Loss::squared) return 0.5 * (z - y).squaredNorm();
    // log(1 + exp(-y z)) evaluated stably
    double total = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double m = -y[i] * z[i];
        total += m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    }
    return total;
}

Eigen::VectorXd loss_gradient(Loss loss, const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
    if (loss == Loss::squared) return z - y;
    Eigen::VectorXd g(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        g[i] = -y[i] / (1.0 + std::exp(y[i] * z[i]));
    }
    return g;
}

Eigen::VectorXd forward(const GroupLassoProblem& p, const Eigen::MatrixXd& U,
                        const Eigen::VectorXd& b) {
    Eigen::MatrixXd Z = p.X * U;                     // n x k
    if (p.with_bias) Z.rowwise() += b.transpose();
    return (Z.array() * p.masks.array()).rowwise().sum();
}

namespace {

// Gradient of the data term with respect to (U, b): GU = X' (M .* g 1'),
// gb = M' g.
void block_gradient(const GroupLassoProblem& p, const Eigen::VectorXd& g,
                    Eigen::MatrixXd& GU, Eigen::VectorXd& gb) {
    const Eigen::MatrixXd Gm = p.masks.array().colwise() * g.array(); // n x k
    GU.noalias() = p.X.transpose() * Gm;                               // d x k
    if (p.with_bias) gb = Gm.colwise().sum().transpose();
    else gb = Eigen::VectorXd::Zero(p.blocks());
}

double curvature_bound(Loss loss) { return loss == Loss::squared ? 1.0 : 0.25; }

// Largest eigenvalue of A'A for the stacked block operator (U, b) -> z,
// by 50 power iterations from a fixed seeded start.
double operator_norm_sq(const GroupLassoProblem& p) {
    Rng rng(0x9E3779B9ull);
    Eigen::MatrixXd U(p.d(), p.blocks());
    for (Eigen::Index c = 0; c < U.cols(); ++c) U.col(c) = rng.normal_vector(p.d());
    Eigen::VectorXd b = p.with_bias ? rng.normal_vector(p.blocks())
                                    : Eigen::VectorXd::Zero(p.blocks());
    double lambda = 0.0;
    for (int it = 0; it < 50; ++it) {
        const double nrm = std::sqrt(U.squaredNorm() + b.squaredNorm());
        if (nrm == 0.0) return 1.0;
        U /= nrm;
        b /= nrm;
        const Eigen::VectorXd z = forward(p, U, b);
        Eigen::MatrixXd GU;
        Eigen::VectorXd gb;
        block_gradient(p, z, GU, gb);
        lambda = z.squaredNorm();
        U = GU;
        if (p.with_bias) b = gb; else b.setZero();
    }
    return lambda > 0.0 ? lambda : 1.0;
}

double penalty(const Eigen::MatrixXd& U, double beta) {
    return beta * U.colwise().norm().sum();
}

} // namespace

double beta_max(const GroupLassoProblem& p) {
    const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(p.n());
    const Eigen::VectorXd g0 = loss_gradient(p.loss, z0, p.y);
    Eigen::MatrixXd GU;
    Eigen::VectorXd gb;
    block_gradient(p, g0, GU, gb);
    return GU.colwise().norm().maxCoeff();
}

double kkt_residual(const GroupLassoProblem& p, const GroupLassoSolution& s) {
    if (s.weights.rows() != p.d() || s.weights.cols() != p.blocks()) {
        throw DimensionError("kkt_residual: weight shape mismatch");
    }
    const Eigen::VectorXd z = forward(p, s.weights, s.biases);
    const Eigen::VectorXd g = loss_gradient(p.loss, z, p.y);
    Eigen::MatrixXd GU;
    Eigen::VectorXd gb;
    block_gradient(p, g, GU, gb);
    double res = 0.0;
    for (Eigen::Index i = 0; i < p.blocks(); ++i) {
        const double unorm = s.weights.col(i).norm();
        double r;
        if (unorm > 0.0) {
            r = (GU.col(i) + p.beta * s.weights.col(i) / unorm).norm();
        } else {
            r = std::max(0.0, GU.col(i).norm() - p.beta);
        }
        res = std::max(res, r);
        if (p.with_bias) res = std::max(res, std::abs(gb[i]));
    }
    return res;
}

GroupLassoSolution fista_solve(const GroupLassoProblem& p, const FistaOptions& opts,
                               const GroupLassoSolution* warm) {
    if (opts.max_iters < 1) throw ParameterError("fista_solve: max_iters must be >= 1");
    if (opts.tol <= 0.0) throw ParameterError("fista_solve: tol must be positive");

    const Eigen::Index d = p.d();
    const Eigen::Index k = p.blocks();

    GroupLassoSolution sol;
    if (warm && warm->weights.rows() == d && warm->weights.cols() == k) {
        sol.weights = warm->weights;
        sol.biases = warm->biases.size() == k ? warm->biases : Eigen::VectorXd::Zero(k);
    } else {
        sol.weights = Eigen::MatrixXd::Zero(d, k);
        sol.biases = Eigen::VectorXd::Zero(k);
    }

    const double L = curvature_bound(p.loss) * operator_norm_sq(p);
    double step = 1.0 / L;

    Eigen::MatrixXd U = sol.weights;
    Eigen::VectorXd b = sol.biases;
    Eigen::MatrixXd Uy = U;
    Eigen::VectorXd by = b;
    double t_momentum = 1.0;

    double F = loss_value(p.loss, forward(p, U, b), p.y) + penalty(U, p.beta);
    if (!std::isfinite(F)) throw DivergenceError("fista_solve: non-finite initial objective");
    sol.objective_trace.push_back(F);

    sol.kkt_residual = kkt_residual(p, sol);
    if (sol.kkt_residual <= opts.tol) {
        sol.converged = true;
        return sol;
    }

    Eigen::MatrixXd GU(d, k);
    Eigen::VectorXd gb(k);

    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        const Eigen::VectorXd zy = forward(p, Uy, by);
        const double fy = loss_value(p.loss, zy, p.y);
        const Eigen::VectorXd g = loss_gradient(p.loss, zy, p.y);
        block_gradient(p, g, GU, gb);

        Eigen::MatrixXd Unew(d, k);
        Eigen::VectorXd bnew(k);
        double fnew = 0.0;
        while (true) {
            for (Eigen::Index i = 0; i < k; ++i) {
                Unew.col(i) = prox_group(Uy.col(i) - step * GU.col(i), step * p.beta);
            }
            bnew = p.with_bias ? Eigen::VectorXd(by - step * gb) : Eigen::VectorXd::Zero(k);
            fnew = loss_value(p.loss, forward(p, Unew, bnew), p.y);
            const double du2 = (Unew - Uy).squaredNorm() + (bnew - by).squaredNorm();
            const double quad = fy + (GU.array() * (Unew - Uy).array()).sum() +
                                gb.dot(bnew - by) + du2 / (2.0 * step);
            if (std::isfinite(fnew) && fnew <= quad + 1e-12 * std::abs(fy) + 1e-300) break;
            step *= 0.5;
            if (step < 1e-300) throw DivergenceError("fista_solve: backtracking underflow");
        }
        const double Fnew = fnew + penalty(Unew, p.beta);
        if (!std::isfinite(Fnew)) throw DivergenceError("fista_solve: non-finite objective");

        if (Fnew > F + 1e-12 * (1.0 + std::abs(F))) {
            // Function-value adaptive restart: drop the accelerated point and
            // take a plain proximal step from the last accepted iterate.
            Uy = U;
            by = b;
            t_momentum = 1.0;
            sol.iterations = iter;
            continue;
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
        const double mom = (t_momentum - 1.0) / t_next;
        Uy = Unew + mom * (Unew - U);
        by = bnew + mom * (bnew - b);
        t_momentum = t_next;
        U = Unew;
        b = bnew;
        F = Fnew;
        sol.objective_trace.push_back(F);
        sol.iterations = iter;

        if (iter % opts.check_every == 0 || iter == opts.max_iters) {
            sol.weights = U;
            sol.biases = b;
            sol.kkt_residual = kkt_residual(p, sol);
            if (sol.kkt_residual <= opts.tol) {
                sol.converged = true;
                return sol;
            }
        }
    }
    sol.weights = U;
    sol.biases = b;
    sol.kkt_residual = kkt_residual(p, sol);
    sol.converged = sol.kkt_residual <= opts.tol;
    return sol;
}

LassoDictionary build_dictionary(const data::Dataset& ds, std::optional<int> subsample_q,
                                 std::uint64_t seed) {
    const int n = static_cast<int>(ds.n());
    const int d = static_cast<int>(ds.d());
    if (d < 2) throw ParameterError("build_dictionary: need d >= 2");
    if (n < d - 1) throw ParameterError("build_dictionary: need at least d-1 rows");

    LassoDictionary dict;
    std::vector<Eigen::VectorXd> columns;

    // Enumerate size-(d-1) row subsets in lexicographic order.
    std::vector<int> comb(static_cast<std::size_t>(d - 1));
    for (int i = 0; i < d - 1; ++i) comb[static_cast<std::size_t>(i)] = i;
    Eigen::MatrixXd tuple(d, d - 1);
    while (true) {
        for (int c = 0; c < d - 1; ++c) tuple.col(c) = ds.X.row(comb[static_cast<std::size_t>(c)]).transpose();
        const Eigen::VectorXd v = geometry::cross_product(tuple);
        const double nrm = v.norm();
        const double bound = tuple.colwise().norm().prod();
        if (nrm == 0.0 || nrm <= 1e-12 * bound) {
            ++dict.skipped_degenerate;
        } else {
            for (int orient : {+1, -1}) {
                const Eigen::VectorXd gate = orient * v;
                Eigen::VectorXd col = (ds.X * gate) / nrm;
                col = col.cwiseMax(0.0);
                columns.push_back(col);
                dict.tuples.push_back(comb);
                dict.orientations.push_back(orient);
                dict.gates.push_back(gate);
            }
        }
        // advance combination
        int pos = d - 2;
        while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == n - (d - 1) + pos) --pos;
        if (pos < 0) break;
        ++comb[static_cast<std::size_t>(pos)];
        for (int c = pos + 1; c < d - 1; ++c) comb[static_cast<std::size_t>(c)] = comb[static_cast<std::size_t>(c - 1)] + 1;
    }

    std::vector<int> keep(columns.size());
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<int>(i);
    if (subsample_q && static_cast<std::size_t>(*subsample_q) < columns.size()) {
        Rng rng(seed);
        keep = rng.sample_without_replacement(static_cast<int>(columns.size()), *subsample_q);
        std::sort(keep.begin(), keep.end());
    }

    dict.K.resize(n, static_cast<Eigen::Index>(keep.size()));
    std::vector<std::vector<int>> tuples;
    std::vector<int> orientations;
    std::vector<Eigen::VectorXd> gates;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const std::size_t src = static_cast<std::size_t>(keep[i]);
        dict.K.col(static_cast<Eigen::Index>(i)) = columns[src];
        tuples.push_back(dict.tuples[src]);
        orientations.push_back(dict.orientations[src]);
        gates.push_back(dict.gates[src]);
    }
    dict.tuples = std::move(tuples);
    dict.orientations = std::move(orientations);
    dict.gates = std::move(gates);
    return dict;
}

namespace {

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

double lasso_kkt(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double beta, Loss loss,
                 const Eigen::VectorXd& z) {
    const Eigen::VectorXd g = loss_gradient(loss, K * z, y);
    const Eigen::VectorXd Kg = K.transpose() * g;
    double res = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        const double r = z[j] != 0.0 ? std::abs(Kg[j] + beta * (z[j] > 0.0 ? 1.0 : -1.0))
                                     : std::max(0.0, std::abs(Kg[j]) - beta);
        res = std::max(res, r);
    }
    return res;
}

double lasso_operator_norm_sq(const Eigen::MatrixXd& K) {
    Rng rng(0x9E3779B9ull);
    Eigen::VectorXd w = rng.normal_vector(K.cols());
    double lambda = 0.0;
    for (int it = 0; it < 50; ++it) {
        const double nrm = w.norm();
        if (nrm == 0.0) return 1.0;
        w /= nrm;
        const Eigen::VectorXd Kw = K * w;
        lambda = Kw.squaredNorm();
        w = K.transpose() * Kw;
    }
    return lambda > 0.0 ? lambda : 1.0;
}

} // namespace

LassoSolution lasso_solve(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double beta,
                          Loss loss, const FistaOptions& opts, const LassoSolution* warm) {
    if (K.rows() != y.size()) throw DimensionError("lasso_solve: K/y row mismatch");
    if (beta <= 0.0) throw ParameterError("lasso_solve: beta must be positive");

    const Eigen::Index q = K.cols();
    LassoSolution sol;
    sol.z = (warm && warm->z.size() == q) ? warm->z : Eigen::VectorXd::Zero(q);

    const double L = curvature_bound(loss) * lasso_operator_norm_sq(K);
    double step = 1.0 / L;

    Eigen::VectorXd z = sol.z;
    Eigen::VectorXd zy = z;
    double t_momentum = 1.0;
    double F = loss_value(loss, K * z, y) + beta * z.lpNorm<1>();
    if (!std::isfinite(F)) throw DivergenceError("lasso_solve: non-finite initial objective");
    sol.objective_trace.push_back(F);

    sol.kkt_residual = lasso_kkt(K, y, beta, loss, z);
    if (sol.kkt_residual <= opts.tol) {
        sol.converged = true;
        return sol;
    }

    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        const Eigen::VectorXd pred = K * zy;
        const double fy = loss_value(loss, pred, y);
        const Eigen::VectorXd g = K.transpose() * loss_gradient(loss, pred, y);

        Eigen::VectorXd znew(q);
        double fnew = 0.0;
        while (true) {
            for (Eigen::Index j = 0; j < q; ++j) znew[j] = soft_threshold(zy[j] - step * g[j], step * beta);
            fnew = loss_value(loss, K * znew, y);
            const double dz2 = (znew - zy).squaredNorm();
            const double quad = fy + g.dot(znew - zy) + dz2 / (2.0 * step);
            if (std::isfinite(fnew) && fnew <= quad + 1e-12 * std::abs(fy) + 1e-300) break;
            step *= 0.5;
            if (step < 1e-300) throw DivergenceError("lasso_solve: backtracking underflow");
        }
        const double Fnew = fnew + beta * znew.lpNorm<1>();
        if (!std::isfinite(Fnew)) throw DivergenceError("lasso_solve: non-finite objective");

        if (Fnew > F + 1e-12 * (1.0 + std::abs(F))) {
            zy = z;
            t_momentum = 1.0;
            sol.iterations = iter;
            continue;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
        zy = znew + ((t_momentum - 1.0) / t_next) * (znew - z);
        t_momentum = t_next;
        z = znew;
        F = Fnew;
        sol.objective_trace.push_back(F);
        sol.iterations = iter;

        if (iter % opts.check_every == 0 || iter == opts.max_iters) {
            sol.kkt_residual = lasso_kkt(K, y, beta, loss, z);
            if (sol.kkt_residual <= opts.tol) {
                sol.z = z;
                sol.converged = true;
                return sol;
            }
        }
    }
    sol.z = z;
    sol.kkt_residual = lasso_kkt(K, y, beta, loss, z);
    sol.converged = sol.kkt_residual <= opts.tol;
    return sol;
}

namespace {

std::vector<double> beta_grid(double bmax, int grid_size) {
    if (grid_size < 2) throw ParameterError("reg_path: grid size must be >= 2");
    std::vector<double> betas(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) {
        betas[static_cast<std::size_t>(i)] = bmax * std::pow(10.0, -4.0 * i / (grid_size - 1));
    }
    return betas;
}

} // namespace

RegPath reg_path(GroupLassoProblem p, int grid_size, const FistaOptions& opts) {
    RegPath path;
    p.beta = 1.0; // placeholder; beta_max ignores it
    path.betas = beta_grid(beta_max(p), grid_size);
    const GroupLassoSolution* warm = nullptr;
    for (double beta : path.betas) {
        p.beta = beta;
        try {
            GroupLassoSolution s = fista_solve(p, opts, warm);
            path.active_counts.push_back(s.active_blocks());
            path.total_iterations += s.iterations;
            path.solutions.push_back(std::move(s));
            warm = &path.solutions.back();
        } catch (const std::exception& e) {
            throw DivergenceError("reg_path: solve failed at beta=" + std::to_string(beta) +
                                  ": " + e.what());
        }
    }
    return path;
}

LassoRegPath lasso_reg_path(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, int grid_size,
                            Loss loss, const FistaOptions& opts) {
    LassoRegPath path;
    const Eigen::VectorXd g0 = loss_gradient(loss, Eigen::VectorXd::Zero(y.size()), y);
    const double bmax = (K.transpose() * g0).lpNorm<Eigen::Infinity>();
    path.betas = beta_grid(bmax, grid_size);
    const LassoSolution* warm = nullptr;
    for (double beta : path.betas) {
        try {
            LassoSolution s = lasso_solve(K, y, beta, loss, opts, warm);
            int active = 0;
            for (Eigen::Index j = 0; j < s.z.size(); ++j) active += s.z[j] != 0.0;
            path.active_counts.push_back(active);
            path.total_iterations += s.iterations;
            path.solutions.push_back(std::move(s));
            warm = &path.solutions.back();
        } catch (const std::exception& e) {
            throw DivergenceError("lasso_reg_path: solve failed at beta=" + std::to_string(beta) +
                                  ": " + e.what());
        }
    }
    return path;
}

} // namespace cvxga::solver
