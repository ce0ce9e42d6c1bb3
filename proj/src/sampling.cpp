#include "cvxga/sampling.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

#include "cvxga/errors.hpp"
#include "cvxga/geometry.hpp"
#include "cvxga/rng.hpp"

namespace cvxga::sampling {

std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::gaussian: return "gaussian";
        case Provenance::geometric_algebra: return "geometric_algebra";
        case Provenance::ga_sketched: return "ga_sketched";
        case Provenance::manual: return "manual";
    }
    return "unknown";
}

int ArrangementPattern::active_count() const {
    int c = 0;
    for (std::uint8_t b : bits) c += b;
    return c;
}

ArrangementPattern pattern_from_gate(const data::Dataset& ds, const Gate& g) {
    if (g.direction.size() != ds.d()) {
        throw DimensionError("pattern_from_gate: gate dimension mismatch");
    }
    ArrangementPattern p;
    p.gate = g;
    const Eigen::Index n = ds.n();
    p.bits.resize(static_cast<std::size_t>(n));
    const double vnorm = g.direction.norm();
    const Eigen::VectorXd act = ds.X * g.direction;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double eps = 1e-12 * vnorm * ds.X.row(i).norm();
        p.bits[static_cast<std::size_t>(i)] = (act[i] + g.bias >= -eps) ? 1 : 0;
    }
    return p;
}

namespace {

std::string bits_key(const std::vector<std::uint8_t>& bits) {
    return std::string(bits.begin(), bits.end());
}

// Dedup on bit vectors, keeping the first-seen gate.
PatternSet dedup(std::vector<ArrangementPattern> raw, int requested) {
    PatternSet out;
    out.requested = requested;
    std::unordered_set<std::string> seen;
    for (auto& p : raw) {
        if (seen.insert(bits_key(p.bits)).second) out.patterns.push_back(std::move(p));
    }
    return out;
}

bool cross_is_degenerate(const Eigen::VectorXd& v, const Eigen::MatrixXd& tuple) {
    return v.norm() == 0.0 || geometry::tuple_is_degenerate(tuple);
}

} // namespace

PatternSet sample_gaussian(const data::Dataset& ds, int k, bool with_bias, std::uint64_t seed) {
    if (k < 1) throw ParameterError("sample_gaussian: k must be >= 1");
    const Rng master(seed);
    std::vector<ArrangementPattern> raw;
    raw.reserve(static_cast<std::size_t>(k));
    for (int slot = 0; slot < k; ++slot) {
        Rng rng = master.derive(static_cast<std::uint64_t>(slot));
        Gate g;
        g.direction = rng.normal_vector(ds.d());
        g.bias = with_bias ? rng.normal() : 0.0;
        ArrangementPattern p = pattern_from_gate(ds, g);
        p.provenance = Provenance::gaussian;
        raw.push_back(std::move(p));
    }
    return dedup(std::move(raw), k);
}

PatternSet sample_ga(const data::Dataset& ds, int k, const sketch::SketchOperator* sk,
                     bool with_bias, std::uint64_t seed) {
    if (k < 1) throw ParameterError("sample_ga: k must be >= 1");
    const int n = static_cast<int>(ds.n());
    const int d = static_cast<int>(ds.d());
    const int work_dim = sk ? sk->target_dim : d;
    if (sk && sk->source_dim != d) throw DimensionError("sample_ga: sketch source dim mismatch");
    const int subset_size = with_bias ? work_dim : work_dim - 1;
    if (subset_size < 1 || subset_size > n) {
        throw ParameterError("sample_ga: subset size " + std::to_string(subset_size) +
                             " not in [1, n=" + std::to_string(n) + "]");
    }

    const Rng master(seed);
    std::vector<ArrangementPattern> raw;
    raw.reserve(static_cast<std::size_t>(k));
    for (int slot = 0; slot < k; ++slot) {
        Rng rng = master.derive(static_cast<std::uint64_t>(slot));
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            const std::vector<int> rows = rng.sample_without_replacement(n, subset_size);
            Gate g;
            try {
                if (!with_bias) {
                    Eigen::MatrixXd tuple(d, subset_size);
                    for (int c = 0; c < subset_size; ++c) tuple.col(c) = ds.X.row(rows[static_cast<std::size_t>(c)]).transpose();
                    if (sk) {
                        g.direction = sketch::sketched_gate(*sk, tuple);
                    } else {
                        g.direction = geometry::cross_product(tuple);
                        if (cross_is_degenerate(g.direction, tuple)) continue;
                    }
                    g.bias = 0.0;
                } else {
                    // Anchor at the last sampled row; gate vanishes on every
                    // sampled row since v'(x_j - anchor) = 0 and b = -v'anchor.
                    const Eigen::VectorXd anchor = ds.X.row(rows.back()).transpose();
                    Eigen::MatrixXd tuple(d, subset_size - 1);
                    for (int c = 0; c + 1 < subset_size; ++c) {
                        tuple.col(c) = ds.X.row(rows[static_cast<std::size_t>(c)]).transpose() - anchor;
                    }
                    if (sk) {
                        g.direction = sketch::sketched_gate(*sk, tuple);
                    } else {
                        g.direction = geometry::cross_product(tuple);
                        if (cross_is_degenerate(g.direction, tuple)) continue;
                    }
                    g.bias = -g.direction.dot(anchor);
                }
            } catch (const DegenerateTupleError&) {
                continue;
            }
            if (rng.coin()) {
                g.direction = -g.direction;
                g.bias = -g.bias;
            }
            ArrangementPattern p = pattern_from_gate(ds, g);
            p.provenance = sk ? Provenance::ga_sketched : Provenance::geometric_algebra;
            p.sampled_rows = rows;
            raw.push_back(std::move(p));
            ok = true;
        }
        if (!ok) {
            throw DegenerateTupleError("sample_ga: slot " + std::to_string(slot) +
                                       " stayed degenerate after 100 retries");
        }
    }
    return dedup(std::move(raw), k);
}

ArrangementPattern all_ones_pattern(const data::Dataset& ds) {
    Gate g;
    g.direction = Eigen::VectorXd::Zero(ds.d());
    g.bias = 1.0;
    ArrangementPattern p = pattern_from_gate(ds, g);
    p.provenance = Provenance::manual;
    return p;
}

PatternSet sample_random_gates(const data::Dataset& ds, int k, bool with_bias, std::uint64_t seed) {
    if (k < 1) throw ParameterError("sample_random_gates: k must be >= 1");
    const Rng master(seed);
    std::vector<ArrangementPattern> raw;
    raw.reserve(static_cast<std::size_t>(k));
    auto cauchy = [](Rng& r) { return std::tan(std::numbers::pi * (r.uniform() - 0.5)); };
    for (int slot = 0; slot < k; ++slot) {
        Rng rng = master.derive(static_cast<std::uint64_t>(slot));
        ArrangementPattern p;
        // the mask is pure coin flips, deliberately decoupled from the gate:
        // it plays the role of an arbitrary re-initialization rather than a
        // geometrically realizable arrangement
        p.bits.resize(static_cast<std::size_t>(ds.n()));
        for (auto& b : p.bits) b = rng.coin() ? 1 : 0;
        p.gate.direction.resize(ds.d());
        for (Eigen::Index j = 0; j < ds.d(); ++j) p.gate.direction[j] = cauchy(rng);
        p.gate.bias = with_bias ? 4.0 * cauchy(rng) : 0.0;
        p.provenance = Provenance::manual;
        raw.push_back(std::move(p));
    }
    return dedup(std::move(raw), k);
}

} // namespace cvxga::sampling
