#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace cqrel {

/// splitmix64 output function; used both as a seed scrambler and for the
/// per-task seed derivation documented in derive_seed().
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Per-task seed: a splitmix-style jump from a base seed. Task `index` gets
/// the same seed regardless of which worker thread runs it, so parallel
/// ensembles are reproducible independent of the schedule.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Seeded generator with hand-rolled samplers.
///
/// std::mt19937_64 has a fully standardized output sequence; the standard
/// *distributions* do not, so uniform/normal/categorical are implemented
/// here directly to keep results identical across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Index sampled with probabilities `probs` (assumed normalized), by
    /// inverse CDF walk.
    int categorical(const Eigen::VectorXd& probs) {
        const double u = uniform();
        double cum = 0.0;
        const int n = static_cast<int>(probs.size());
        for (int i = 0; i < n; ++i) {
            cum += probs[i];
            if (u < cum) return i;
        }
        return n - 1;
    }

    /// Dirichlet(1) draw: uniform over the simplex.
    Eigen::VectorXd dirichlet(int dim) {
        Eigen::VectorXd v(dim);
        double total = 0.0;
        for (int i = 0; i < dim; ++i) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            v[i] = -std::log(u);
            total += v[i];
        }
        return v / total;
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cqrel
