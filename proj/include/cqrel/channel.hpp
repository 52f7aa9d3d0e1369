#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cqrel/linalg.hpp"
#include "cqrel/rng.hpp"

namespace cqrel {

/// Point on the probability simplex; renormalized on construction.
class InputDistribution {
  public:
    explicit InputDistribution(RealVector probs);
    static InputDistribution uniform(int alphabet_size);
    static InputDistribution point_mass(int alphabet_size, int index);

    const RealVector& probs() const { return probs_; }
    int size() const { return static_cast<int>(probs_.size()); }
    double operator[](int i) const { return probs_[i]; }

  private:
    RealVector probs_;
};

/// Finite input alphabet mapped to density operators on a common dimension.
class CqChannel {
  public:
    explicit CqChannel(std::vector<DensityOperator> states,
                       std::optional<std::string> name = std::nullopt);

    int alphabet_size() const { return static_cast<int>(states_.size()); }
    int dim() const { return static_cast<int>(states_.front().dim()); }
    const DensityOperator& state(int i) const { return states_[static_cast<std::size_t>(i)]; }
    const std::vector<DensityOperator>& states() const { return states_; }
    const std::optional<std::string>& name() const { return name_; }

    // built-in parametric families
    static CqChannel bsc(double p);
    static CqChannel pure2(double eps);
    static CqChannel classical(const RealMatrix& transition);

  private:
    std::vector<DensityOperator> states_;
    std::optional<std::string> name_;
};

/// Word of alphabet indices (0-based internally; docs and CLI are 1-based).
struct Codeword {
    std::vector<std::uint8_t> symbols;
    int length() const { return static_cast<int>(symbols.size()); }
};

struct Codebook {
    std::vector<Codeword> words;
    int size() const { return static_cast<int>(words.size()); }
    int block_length() const { return words.empty() ? 0 : words.front().length(); }
};

/// Product signal state of a codeword, S_{i_1} x ... x S_{i_n}.
DensityOperator codeword_state(const CqChannel& ch, const Codeword& w);

/// M codewords of length n, symbols i.i.d. from pi. Deterministic given seed.
Codebook sample_codebook(const CqChannel& ch, const InputDistribution& pi, int M, int n,
                         std::uint64_t seed);

/// Classical channel embedding: row i of the transition matrix becomes the
/// diagonal state diag(P(.|i)).
CqChannel from_classical(const RealMatrix& transition);

/// Pairs (i, j) in i-major order with states S_i x T_j.
CqChannel parallel_compose(const CqChannel& ch1, const CqChannel& ch2);

/// True when all states are diagonal within tol (classical case).
bool is_classical(const CqChannel& ch, double tol = 1e-12);

// sampling helpers (tests, verification suites)
DensityOperator random_density_operator(int dim, Rng& rng, int rank = 0);
CqChannel random_channel(int alphabet_size, int dim, Rng& rng, bool allow_rank_deficient = true);
RealMatrix random_stochastic_matrix(int rows, int cols, Rng& rng);

}  // namespace cqrel
