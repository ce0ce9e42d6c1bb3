#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvxga/data.hpp"
#include "cvxga/sketch.hpp"

namespace cvxga::sampling {

// Affine gate (v, b): the hyperplane x'v + b = 0 whose positive side defines
// an activation pattern.
struct Gate {
    Eigen::VectorXd direction;
    double bias = 0.0;
};

enum class Provenance { gaussian, geometric_algebra, ga_sketched, manual };

std::string provenance_name(Provenance p);

// Activation mask over the n training rows together with the gate that
// generated it.
struct ArrangementPattern {
    std::vector<std::uint8_t> bits; // diag of D
    Gate gate;
    Provenance provenance = Provenance::manual;
    std::vector<int> sampled_rows;  // GA row subset, empty otherwise

    int active_count() const;
};

struct PatternSet {
    std::vector<ArrangementPattern> patterns;
    int requested = 0;
    int achieved() const { return static_cast<int>(patterns.size()); }
};

// bits[i] = 1 iff x_i'v + b >= -eps with eps = 1e-12 |v| |x_i|; boundary
// points count as active, matching the >= 0 convention. GA gates land
// exactly on their generating rows, so the guard keeps float noise from
// flipping those bits.
ArrangementPattern pattern_from_gate(const data::Dataset& ds, const Gate& g);

// Gaussian sampling: v ~ N(0, I_d), and b ~ N(0,1) when with_bias. Returns
// up to k patterns after dedup on the bit vectors (first-seen gate kept).
PatternSet sample_gaussian(const data::Dataset& ds, int k, bool with_bias, std::uint64_t seed);

// Geometric-algebra sampling: per slot, a uniform row subset without
// replacement; gate = lifted cross product of the (projected) rows, with the
// bias variant anchored at the last sampled row. Both orientations +-v are
// admitted with probability 1/2. Degenerate tuples are resampled up to 100
// times per slot.
PatternSet sample_ga(const data::Dataset& ds, int k, const sketch::SketchOperator* sk,
                     bool with_bias, std::uint64_t seed);

// The all-active pattern (gate accepting every row); backs the linear
// baseline.
ArrangementPattern all_ones_pattern(const data::Dataset& ds);

// Random bit-mask patterns with heavy-tailed random gates; a deliberately
// pattern-agnostic control for robustness experiments.
PatternSet sample_random_gates(const data::Dataset& ds, int k, bool with_bias, std::uint64_t seed);

} // namespace cvxga::sampling
