#pragma once

#include <utility>
#include <vector>

#include "cqrel/channel.hpp"
#include "cqrel/linalg.hpp"
#include "cqrel/simplex.hpp"

namespace cqrel {

/// Pairwise overlaps Tr sqrt(S_i) sqrt(S_k). Entries at or below the zero
/// tolerance are snapped to exactly 0 so orthogonal pairs are represented
/// exactly. powered(s) is the elementwise view c^(1/s) with 0 staying 0.
struct OverlapMatrix {
    RealMatrix base;
    double zero_tol = 0.0;

    RealMatrix powered(double s) const;
};

OverlapMatrix overlap_matrix(const CqChannel& ch);

/// Pairwise Tr |sqrt(S_i) sqrt(S_k)| (trace-norm overlaps), same zero snap.
RealMatrix trace_norm_overlap_matrix(const CqChannel& ch);

struct CurvePoint {
    double rate = 0.0;   ///< R, bits
    double value = 0.0;  ///< exponent, bits; clamped at 0; may be +inf
    double raw = 0.0;    ///< unclamped supremum, for diagnostics
    double s_opt = 0.0;  ///< optimizing s (+inf in the limit regime)
    RealVector pi_opt;
};

/// Sampled exponent curve; rates strictly increase and values do not
/// increase along the record list.
struct ExponentCurve {
    std::vector<CurvePoint> points;
};

struct CapacityResult {
    double chi_max = 0.0;
    RealVector pi_opt;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct CutoffResult {
    double bits = 0.0;
    RealVector pi_opt;
    double kkt_residual = 0.0;
};

struct ZeroRateBounds {
    double lower = 0.0;  ///< bits or +inf
    double upper = 0.0;  ///< bits or +inf
    bool infinite = false;
    RealVector pi_lower;
    RealVector pi_upper;
};

enum class BoundKind { random_coding, expurgation };

struct BoundReport {
    double value = 0.0;          ///< raw bound, may exceed 1
    double display_value = 0.0;  ///< min(value, 1)
    BoundKind kind = BoundKind::random_coding;
    int M = 0;
    int n = 0;
    double s = 0.0;
    RealVector pi;
    bool proved_regime = false;
};

/// H(sum pi_i S_i) - sum pi_i H(S_i), in bits.
double holevo_quantity(const CqChannel& ch, const InputDistribution& pi);

/// -log2 Tr (sum pi_i S_i^{1/(1+s)})^{1+s}. The proved statements use
/// s in (0, 1]; larger s is accepted for exploration.
double mu_rc(const CqChannel& ch, const InputDistribution& pi, double s);

/// d/ds of mu_rc at fixed pi, bits per unit s; nonnegative up to rounding.
double mu_rc_s_derivative(const CqChannel& ch, const InputDistribution& pi, double s);

/// -s log2 sum_{ik} pi_i pi_k (Tr sqrt(S_i) sqrt(S_k))^{1/s}.
double mu_ex(const CqChannel& ch, const InputDistribution& pi, double s);
double mu_ex(const OverlapMatrix& overlaps, const InputDistribution& pi, double s);

/// s -> infinity limit; +inf when a zero-overlap pair carries weight.
double mu_ex_limit(const CqChannel& ch, const InputDistribution& pi);
double mu_ex_limit(const OverlapMatrix& overlaps, const InputDistribution& pi);

/// Closed-form first and second s-derivatives of mu_ex, bits.
std::pair<double, double> mu_ex_derivatives(const CqChannel& ch, const InputDistribution& pi,
                                            double s);
std::pair<double, double> mu_ex_derivatives(const OverlapMatrix& overlaps,
                                            const InputDistribution& pi, double s);

ExponentCurve random_coding_exponent(const CqChannel& ch, const std::vector<double>& rate_grid);

ExponentCurve expurgation_exponent(const CqChannel& ch, const std::vector<double>& rate_grid);

struct FixedPiExponent {
    double value = 0.0;  ///< clamped at 0
    double raw = 0.0;
    double s_opt = 1.0;       ///< +inf when the s-search hit its ceiling
    bool limit_regime = false;
};

/// sup_{s >= 1} [mu_ex(pi, s) - s R] for R > 0, by bisection on the concave
/// derivative. R <= 0 is an argument error; use mu_ex_limit for R -> +0.
FixedPiExponent expurgation_exponent_fixed_pi(const CqChannel& ch, const InputDistribution& pi,
                                              double R);
FixedPiExponent expurgation_exponent_fixed_pi(const OverlapMatrix& overlaps,
                                              const InputDistribution& pi, double R);
double expurgation_exponent_fixed_pi_value(const CqChannel& ch, const InputDistribution& pi,
                                           double R);

/// -log2 min_pi Tr(sum pi_i sqrt(S_i))^2.
CutoffResult cutoff_rate(const CqChannel& ch);

ZeroRateBounds zero_rate_bounds(const CqChannel& ch);

/// Finite-size error bounds. kind=random_coding evaluates
/// c (M-1)^s [Tr(sum pi_i S_i^{1/(1+s)})^{1+s}]^n with c=1 at s=1 (proved);
/// s<1 needs conjecture mode and uses the configured prefactor.
/// kind=expurgation evaluates (4(M-1)[sum pi_i pi_k c_ik^{1/s}]^n)^s, s>=1.
BoundReport finite_M_bounds(const CqChannel& ch, const InputDistribution& pi, int M, int n,
                            double s, BoundKind kind, bool conjecture_mode = false);

/// max over pi of the Holevo quantity, with the relative-entropy gradient
/// and the gradient-level optimality certificate.
CapacityResult capacity(const CqChannel& ch);

}  // namespace cqrel
