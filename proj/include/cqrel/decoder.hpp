#pragma once

#include <cstdint>
#include <vector>

#include "cqrel/channel.hpp"
#include "cqrel/exponents.hpp"
#include "cqrel/linalg.hpp"

namespace cqrel {

/// Positive operators X_1..X_M with sum X_j <= I. The square-root rule takes
/// the pseudo-inverse on the support of sum S_l^r, so sum X_j equals that
/// support projector; the off-support deficit is never credited to any
/// message.
struct DecisionRule {
    std::vector<Matrix> operators;
    int size() const { return static_cast<int>(operators.size()); }
};

/// X_j = (sum_l S_l^r)^{-1/2} S_j^r (sum_l S_l^r)^{-1/2}, r in (0, 1].
DecisionRule srm_rule(const std::vector<DensityOperator>& states, double r);

/// P_j = 1 - Tr S_j X_j, clipped to [0, 1].
RealVector error_probabilities(const std::vector<DensityOperator>& states,
                               const DecisionRule& rule);

/// b_j = Tr S_j^{1-r} sum_{l != j} S_l^r; may exceed 1 (vacuous but valid).
RealVector lemma_bounds(const std::vector<DensityOperator>& states, double r);

/// Minimal error probability for discriminating two equiprobable states,
/// (1 - Tr|S - T| / 2) / 2.
double helstrom_error(const DensityOperator& s, const DensityOperator& t);

struct SandwichCheck {
    double lower = 0.0;           ///< 2 (1 - Tr sqrt(S) sqrt(T))
    double trace_distance = 0.0;  ///< Tr |S - T|
    double upper = 0.0;           ///< 2 sqrt(1 - (Tr sqrt(S) sqrt(T))^2)
    double upper_strong = 0.0;    ///< 2 sqrt(1 - (Tr |sqrt(S) sqrt(T)|)^2)
    bool holds = false;           ///< all three inequalities within 1e-9
};

SandwichCheck fidelity_sandwich_check(const DensityOperator& s, const DensityOperator& t);

struct TrialStats {
    RealVector error_probs;   ///< P_j per message
    double p_bar = 0.0;       ///< mean error probability
    double p_max = 0.0;       ///< worst message
    RealVector lemma_bound;   ///< b_j per message at the rule's r
    int lemma_violations = 0; ///< count of P_j > b_j + 1e-9
    double rc_bound = 0.0;    ///< the ensemble's s=1 random-coding bound
    std::uint64_t seed = 0;
};

struct RandomCodingSummary {
    double mean_p_bar = 0.0;
    double stderr_p_bar = 0.0;
    double mean_p_max = 0.0;
    double lemma_violation_fraction = 0.0;
    double rc_bound_s1 = 0.0;  ///< (M-1) [Tr(sum pi_i sqrt(S_i))^2]^n
    bool bound_holds = false;  ///< mean_p_bar <= rc_bound_s1 + 3 stderr
    int trials = 0;
    int M = 0;
    int n = 0;
    double r = 0.0;
    std::uint64_t seed = 0;
};

/// Seeded random-coding ensemble: sample codebooks, decode with the
/// square-root rule, test the per-message bounds, compare the ensemble mean
/// against the s=1 random-coding bound. The bound comparison is meaningful
/// at r = 1/2 (the rule the bound's derivation uses).
RandomCodingSummary run_random_coding(const CqChannel& ch, const InputDistribution& pi, int n,
                                      int M, double r, int trials, std::uint64_t seed,
                                      std::vector<TrialStats>* per_trial = nullptr);

struct ExpurgationSummary {
    double min_kept_bound = 0.0;  ///< best trial's max beta_j^s over the kept words
    double paper_bound = 0.0;     ///< (4(M-1)[sum pi pi c^{1/s}]^n)^s
    bool bound_attained = false;  ///< min_kept_bound <= paper_bound
    int best_trial = -1;
    double best_srm_p_max = -1.0;  ///< exact SRM(1/2) P_max of the best kept code; -1 if skipped
    int trials = 0;
    int M = 0;
    int M_prime = 0;
    int n = 0;
    double s = 1.0;
    std::uint64_t seed = 0;
};

/// Expurgated ensemble: sample 2M-1 words, keep the M words with the
/// smallest beta_j = sum_{l != j} (Tr sqrt(S_wj) sqrt(S_wl))^{1/s} (ties by
/// index), record max beta_j^s over the kept words as the trial's
/// guaranteed error bound, and report the minimum across trials.
ExpurgationSummary expurgate_trial(const CqChannel& ch, const InputDistribution& pi, int n, int M,
                                   double s, int trials, std::uint64_t seed);

}  // namespace cqrel
