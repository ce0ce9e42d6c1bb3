#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cvxga/data.hpp"

namespace cvxga::chamber_lab {

// One arc of the unit circle on which the arrangement pattern is constant.
struct Chamber {
    double lo = 0.0, hi = 0.0;       // angles, hi > lo (hi may exceed 2*pi on wrap)
    double measure = 0.0;            // arc length / 2*pi
    std::vector<std::uint8_t> bits;
};

struct ChamberCensus {
    int n = 0;
    std::vector<double> boundaries;  // 2n sorted angles in [0, 2*pi)
    std::vector<Chamber> chambers;   // exactly 2n arcs
};

// Exact 2D enumeration: boundaries are the +-90 degree rotations of the row
// directions; each arc is labeled by the pattern at its midpoint. Throws
// ParameterError when two rows are (anti)parallel.
ChamberCensus enumerate_chambers(const data::Dataset& ds);

// Index of the chamber whose bit pattern matches, or -1.
int find_chamber(const ChamberCensus& census, const std::vector<std::uint8_t>& bits);

// Monte Carlo samples of n^2 * (minimum chamber probability) for random X
// with rows uniform on the circle, paired with draws from the exponential
// order-statistic oracle n^2 * (1/2) E_(n) / sum E_i.
struct MinChamberSamples {
    std::vector<double> geometry; // one per trial
    std::vector<double> oracle;   // one per trial
};
MinChamberSamples min_chamber_statistic(int n, int trials, std::uint64_t seed);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Empirical chamber frequencies of the rotate-90 sampler (uniform row,
// uniform orientation) against the uniform 1/(2n) law.
struct FrequencyReport {
    ChamberCensus census;            // the arrangement the draws were scored on
    std::vector<long> counts;        // per chamber
    long draws = 0;
    double max_rel_deviation = 0.0;  // vs 1/(2n)
    double chi_square = 0.0;
    double chi_square_critical = 0.0; // alpha = 0.01, dof = 2n-1
    bool uniform_ok = false;
};
FrequencyReport ga_frequency_test(int n, long draws, std::uint64_t seed);

// Fraction of trials in which k sampled directions hit all 2n patterns.
enum class SamplerKind { gaussian, geometric_algebra };
double coverage_test(SamplerKind kind, int n, int k, int trials, std::uint64_t seed);

} // namespace cvxga::chamber_lab
