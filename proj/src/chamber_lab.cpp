#include "cvxga/chamber_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "cvxga/errors.hpp"
#include "cvxga/rng.hpp"
#include "cvxga/sampling.hpp"

namespace cvxga::chamber_lab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

std::vector<std::uint8_t> pattern_at(const data::Dataset& ds, double angle) {
    sampling::Gate g;
    g.direction = Eigen::Vector2d(std::cos(angle), std::sin(angle));
    return sampling::pattern_from_gate(ds, g).bits;
}

data::Dataset random_circle_rows(int n, Rng& rng) {
    data::Dataset ds;
    ds.X.resize(n, 2);
    ds.y = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < n; ++i) {
        Eigen::Vector2d v(rng.normal(), rng.normal());
        while (v.norm() < 1e-12) v << rng.normal(), rng.normal();
        ds.X.row(i) = v.normalized().transpose();
    }
    return ds;
}

} // namespace

ChamberCensus enumerate_chambers(const data::Dataset& ds) {
    if (ds.d() != 2) throw ParameterError("enumerate_chambers: d must be 2");
    const int n = static_cast<int>(ds.n());
    if (n < 1) throw ParameterError("enumerate_chambers: need n >= 1");

    ChamberCensus census;
    census.n = n;
    census.boundaries.reserve(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
        const double theta = std::atan2(ds.X(i, 1), ds.X(i, 0));
        census.boundaries.push_back(wrap_angle(theta + std::numbers::pi / 2.0));
        census.boundaries.push_back(wrap_angle(theta - std::numbers::pi / 2.0));
    }
    std::sort(census.boundaries.begin(), census.boundaries.end());
    for (std::size_t i = 0; i + 1 < census.boundaries.size(); ++i) {
        if (census.boundaries[i + 1] - census.boundaries[i] < 1e-12) {
            throw ParameterError("enumerate_chambers: two rows are parallel");
        }
    }
    if (n > 1 && census.boundaries.front() + kTwoPi - census.boundaries.back() < 1e-12) {
        throw ParameterError("enumerate_chambers: two rows are parallel");
    }

    const std::size_t m = census.boundaries.size(); // 2n
    for (std::size_t i = 0; i < m; ++i) {
        Chamber c;
        c.lo = census.boundaries[i];
        c.hi = i + 1 < m ? census.boundaries[i + 1] : census.boundaries[0] + kTwoPi;
        c.measure = (c.hi - c.lo) / kTwoPi;
        c.bits = pattern_at(ds, 0.5 * (c.lo + c.hi));
        census.chambers.push_back(std::move(c));
    }
    return census;
}

int find_chamber(const ChamberCensus& census, const std::vector<std::uint8_t>& bits) {
    for (std::size_t i = 0; i < census.chambers.size(); ++i) {
        if (census.chambers[i].bits == bits) return static_cast<int>(i);
    }
    return -1;
}

MinChamberSamples min_chamber_statistic(int n, int trials, std::uint64_t seed) {
    if (n < 2 || trials < 1) throw ParameterError("min_chamber_statistic: need n >= 2, trials >= 1");
    MinChamberSamples out;
    out.geometry.reserve(static_cast<std::size_t>(trials));
    out.oracle.reserve(static_cast<std::size_t>(trials));
    const Rng master(seed);
    const double n2 = static_cast<double>(n) * n;
    for (int t = 0; t < trials; ++t) {
        Rng rng = master.derive(static_cast<std::uint64_t>(t));
        const data::Dataset ds = random_circle_rows(n, rng);
        const ChamberCensus census = enumerate_chambers(ds);
        double min_measure = 1.0;
        for (const auto& c : census.chambers) min_measure = std::min(min_measure, c.measure);
        out.geometry.push_back(n2 * min_measure);

        double min_e = 0.0, sum_e = 0.0;
        for (int i = 0; i < n; ++i) {
            const double e = rng.exponential();
            sum_e += e;
            if (i == 0 || e < min_e) min_e = e;
        }
        out.oracle.push_back(n2 * 0.5 * min_e / sum_e);
    }
    return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ParameterError("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        // step past every copy of the smaller value in both samples so tied
        // observations move the two empirical CDFs together
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] == x) ++ia;
        while (ib < b.size() && b[ib] == x) ++ib;
        const double fa = static_cast<double>(ia) / static_cast<double>(a.size());
        const double fb = static_cast<double>(ib) / static_cast<double>(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

// 0.99 quantile of chi-square with `dof` degrees of freedom
// (Wilson-Hilferty cube approximation; accurate to ~3 digits for dof >= 10,
// which is all the uniformity tests use).
static double chi_square_quantile_99(int dof) {
    const double z99 = 2.3263478740408408; // standard normal 0.99 quantile
    const double k = static_cast<double>(dof);
    const double t = 1.0 - 2.0 / (9.0 * k) + z99 * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

FrequencyReport ga_frequency_test(int n, long draws, std::uint64_t seed) {
    if (n < 2) throw ParameterError("ga_frequency_test: need n >= 2");
    if (draws < 100L * 2 * n) {
        throw ParameterError("ga_frequency_test: need at least 100 * 2n draws");
    }
    Rng rng(seed);
    const data::Dataset ds = random_circle_rows(n, rng);
    const ChamberCensus census = enumerate_chambers(ds);

    // Map bit patterns to chamber indices once.
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < census.chambers.size(); ++i) {
        index.emplace(std::string(census.chambers[i].bits.begin(), census.chambers[i].bits.end()),
                      static_cast<int>(i));
    }

    FrequencyReport rep;
    rep.census = census;
    rep.counts.assign(census.chambers.size(), 0);
    rep.draws = draws;
    for (long t = 0; t < draws; ++t) {
        const int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        const bool clockwise = rng.coin();
        // rotate row i by +-90 degrees
        const double x = ds.X(i, 0), y = ds.X(i, 1);
        sampling::Gate g;
        g.direction = clockwise ? Eigen::Vector2d(y, -x) : Eigen::Vector2d(-y, x);
        auto bits = sampling::pattern_from_gate(ds, g).bits;
        // The gate sits exactly on row i's boundary; resolve the tie by the
        // rotation direction (equivalently, tilt the gate infinitesimally
        // counterclockwise). This is what makes the rotated vectors map onto
        // the 2n chambers one-to-one; the blanket ties-active rule would send
        // both rotations of some rows to the same chamber.
        bits[static_cast<std::size_t>(i)] = clockwise ? 1 : 0;
        const auto it = index.find(std::string(bits.begin(), bits.end()));
        if (it != index.end()) ++rep.counts[static_cast<std::size_t>(it->second)];
    }

    const double expected = static_cast<double>(draws) / static_cast<double>(2 * n);
    for (long c : rep.counts) {
        rep.max_rel_deviation = std::max(rep.max_rel_deviation,
                                         std::abs(static_cast<double>(c) - expected) / expected);
        const double diff = static_cast<double>(c) - expected;
        rep.chi_square += diff * diff / expected;
    }
    rep.chi_square_critical = chi_square_quantile_99(2 * n - 1);
    rep.uniform_ok = rep.chi_square < rep.chi_square_critical;
    return rep;
}

double coverage_test(SamplerKind kind, int n, int k, int trials, std::uint64_t seed) {
    if (n < 1 || k < 1 || trials < 1) throw ParameterError("coverage_test: bad parameters");
    const Rng master(seed);
    int covered_trials = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng = master.derive(static_cast<std::uint64_t>(t));
        const data::Dataset ds = random_circle_rows(n, rng);
        std::unordered_set<std::string> seen;
        for (int j = 0; j < k; ++j) {
            sampling::Gate g;
            if (kind == SamplerKind::gaussian) {
                g.direction = Eigen::Vector2d(rng.normal(), rng.normal());
                const auto bits = sampling::pattern_from_gate(ds, g).bits;
                seen.insert(std::string(bits.begin(), bits.end()));
            } else {
                const int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
                const bool clockwise = rng.coin();
                const double x = ds.X(i, 0), y = ds.X(i, 1);
                g.direction = clockwise ? Eigen::Vector2d(y, -x) : Eigen::Vector2d(-y, x);
                auto bits = sampling::pattern_from_gate(ds, g).bits;
                // same boundary-tie resolution as ga_frequency_test
                bits[static_cast<std::size_t>(i)] = clockwise ? 1 : 0;
                seen.insert(std::string(bits.begin(), bits.end()));
            }
        }
        if (seen.size() == static_cast<std::size_t>(2 * n)) ++covered_trials;
    }
    return static_cast<double>(covered_trials) / static_cast<double>(trials);
}

} // namespace cvxga::chamber_lab
