#pragma once

// Counter-based SplitMix64 generator (Steele, Lea, Flood; mixing function by
// Vigna). Output k is a pure function mix(seed + (k+1)*GAMMA), so streams can
// be replayed from any counter position and split into independent substreams
// without shared state. All derived distributions avoid libm so that byte
// streams are identical across platforms.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace finsler {

class SplitMix64 {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Output at an absolute counter position; does not advance state.
    std::uint64_t at(std::uint64_t counter) const {
        return mix(seed_ + (counter + 1) * kGamma);
    }

    std::uint64_t next_u64() { return at(counter_++); }

    // 53-bit mantissa in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Independent substream: the tag is folded through the mixer so that
    // substreams with distinct tags never overlap the parent stream.
    SplitMix64 split(std::uint64_t tag) const {
        return SplitMix64(mix(seed_ ^ mix(tag + kGamma)));
    }

    Eigen::VectorXd vector(int n, double lo, double hi) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    // Random vector with all components in [lo, hi] and infinity norm
    // at least min_inf_norm (rejection loop).
    Eigen::VectorXd nonzero_vector(int n, double lo, double hi,
                                   double min_inf_norm = 0.1) {
        for (;;) {
            Eigen::VectorXd v = vector(n, lo, hi);
            if (v.lpNorm<Eigen::Infinity>() >= min_inf_norm) return v;
        }
    }

    Eigen::MatrixXd matrix(int rows, int cols, double lo, double hi) {
        Eigen::MatrixXd m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m(r, c) = uniform(lo, hi);
        return m;
    }

    // Random matrix rejected until comfortably invertible.
    Eigen::MatrixXd invertible_matrix(int n, double lo = -1.0, double hi = 1.0,
                                      double min_abs_det = 1e-3) {
        for (;;) {
            Eigen::MatrixXd m = matrix(n, n, lo, hi);
            if (std::abs(m.determinant()) > min_abs_det) return m;
        }
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace finsler
