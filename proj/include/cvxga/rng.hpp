#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace cvxga {

// Deterministic counter-free PRNG (splitmix64 core). We avoid the standard
// <random> distributions because their output sequences are
// implementation-defined; every draw here is pinned down by the algorithm,
// so seeded runs are bitwise reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Independent child stream; depends only on (seed, id), not on how many
    // draws the parent has made, so per-slot streams stay stable under any
    // worker layout.
    Rng derive(std::uint64_t id) const {
        Rng child(state_ ^ (0xD1B54A32D192ED03ull * (id + 1)));
        child.next_u64();
        return child;
    }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer on [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection to kill modulo bias.
        const std::uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= lim);
        return v % n;
    }

    bool coin() { return (next_u64() >> 63) != 0; }

    // Standard normal via Box-Muller; one value per call (the pair's twin is
    // discarded to keep the draw count predictable).
    double normal() {
        double u1;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double exponential() {
        double u;
        do { u = uniform(); } while (u <= 0.0);
        return -std::log(u);
    }

    Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    // First k entries of a Fisher-Yates shuffle of [0, n): a uniformly random
    // size-k subset in random order, without replacement.
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        for (int i = 0; i < k; ++i) {
            const int j = i + static_cast<int>(uniform_int(static_cast<std::uint64_t>(n - i)));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

    std::vector<int> permutation(int n) { return sample_without_replacement(n, n); }

private:
    std::uint64_t state_;
};

} // namespace cvxga
