#include "cqrel/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cqrel/parallel.hpp"

namespace cqrel {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kInf = std::numeric_limits<double>::infinity();

double log2_clamped(double x) { return std::log(x) / kLn2; }

struct MuExTerms {
    double F = 0.0;        // sum pi_i pi_k F_ik(s), with F_ik = c^{1/s}
    double delta = 0.0;    // F - 1, accumulated without cancellation
    double L = 0.0;        // sum pi_i pi_k F_ik log F_ik  (natural logs)
    double Q = 0.0;        // sum pi_i pi_k F_ik (log F_ik)^2
    double zero_weight = 0.0;  // total pi_i pi_k on zero-overlap pairs
};

MuExTerms mu_ex_terms(const OverlapMatrix& ov, const RealVector& pi, double s) {
    MuExTerms t;
    const Eigen::Index a = ov.base.rows();
    for (Eigen::Index i = 0; i < a; ++i) {
        for (Eigen::Index k = 0; k < a; ++k) {
            const double w = pi[i] * pi[k];
            if (w <= 0.0) continue;
            const double c = ov.base(i, k);
            if (c <= 0.0) {
                t.zero_weight += w;
                t.delta -= w;
                continue;
            }
            const double logf = std::log(c) / s;  // log F_ik
            const double f = std::exp(logf);
            t.F += w * f;
            t.delta += w * std::expm1(logf);
            t.L += w * f * logf;
            t.Q += w * f * logf * logf;
        }
    }
    t.F = 1.0 + t.delta;  // the well-conditioned form
    return t;
}

double mu_ex_nats(const MuExTerms& t, double s) { return -s * std::log1p(t.delta); }

double mu_ex_first_nats(const MuExTerms& t) {
    // F^{-1} sum pi pi F_ik (log F_ik - log F)
    return t.L / t.F - std::log1p(t.delta);
}

double mu_ex_second_nats(const MuExTerms& t, double s) {
    return (t.L * t.L - t.Q * t.F) / (s * t.F * t.F);
}

RealVector as_probs(const InputDistribution& pi) { return pi.probs(); }

void check_alphabet(const CqChannel& ch, const InputDistribution& pi) {
    if (pi.size() != ch.alphabet_size()) {
        throw Error(Error::Kind::invalid_argument,
                    "distribution size does not match channel alphabet");
    }
}

/// Tr (sum pi_i P_i)^{1+s} for precomputed matrix powers P_i = S_i^{1/(1+s)}.
double trace_mix_power(const std::vector<Matrix>& powered, const RealVector& pi, double s) {
    Matrix A = Matrix::Zero(powered.front().rows(), powered.front().cols());
    for (std::size_t i = 0; i < powered.size(); ++i) A += pi[static_cast<Eigen::Index>(i)] * powered[i];
    const SpectralDecomposition sd = spectral_decompose_symmetrized(A);
    double total = 0.0;
    for (Eigen::Index k = 0; k < sd.eigenvalues.size(); ++k) {
        const double lambda = sd.eigenvalues[k];
        if (lambda > 0.0) total += std::pow(lambda, 1.0 + s);
    }
    return total;
}

std::vector<Matrix> state_powers(const CqChannel& ch, double p) {
    std::vector<Matrix> out(static_cast<std::size_t>(ch.alphabet_size()));
    for (int i = 0; i < ch.alphabet_size(); ++i) out[static_cast<std::size_t>(i)] = ch.state(i).power(p);
    return out;
}

struct SGridEntry {
    double s = 0.0;
    double mu_max = 0.0;  // bits
    RealVector pi;
};

void validate_rate_grid(const std::vector<double>& rate_grid) {
    for (std::size_t i = 0; i + 1 < rate_grid.size(); ++i) {
        if (!(rate_grid[i] < rate_grid[i + 1])) {
            throw Error(Error::Kind::invalid_argument, "rate grid must be strictly increasing");
        }
    }
}

void validate_curve_monotone(const ExponentCurve& curve) {
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const double a = curve.points[i].value;
        const double b = curve.points[i + 1].value;
        if (std::isinf(a)) continue;
        if (b > a + 1e-7) {
            throw Error(Error::Kind::numeric,
                        "exponent curve is not non-increasing; optimizer failure at R=" +
                            std::to_string(curve.points[i + 1].rate));
        }
    }
}

}  // namespace

RealMatrix OverlapMatrix::powered(double s) const {
    RealMatrix out(base.rows(), base.cols());
    for (Eigen::Index i = 0; i < base.rows(); ++i) {
        for (Eigen::Index k = 0; k < base.cols(); ++k) {
            out(i, k) = base(i, k) > 0.0 ? std::pow(base(i, k), 1.0 / s) : 0.0;
        }
    }
    return out;
}

OverlapMatrix overlap_matrix(const CqChannel& ch) {
    const int a = ch.alphabet_size();
    OverlapMatrix ov;
    ov.zero_tol = static_cast<double>(ch.dim()) * config().support_rel;
    ov.base.resize(a, a);
    std::vector<Matrix> roots(static_cast<std::size_t>(a));
    for (int i = 0; i < a; ++i) roots[static_cast<std::size_t>(i)] = ch.state(i).sqrt();
    for (int i = 0; i < a; ++i) {
        for (int k = i; k < a; ++k) {
            double c = std::real(
                (roots[static_cast<std::size_t>(i)] * roots[static_cast<std::size_t>(k)]).trace());
            if (c < -1e-9 || c > 1.0 + 1e-9) {
                throw Error(Error::Kind::numeric,
                            "overlap entry " + std::to_string(c) + " escapes [0, 1]");
            }
            c = std::clamp(c, 0.0, 1.0);
            if (c <= ov.zero_tol) c = 0.0;
            ov.base(i, k) = c;
            ov.base(k, i) = c;
        }
    }
    return ov;
}

RealMatrix trace_norm_overlap_matrix(const CqChannel& ch) {
    const int a = ch.alphabet_size();
    const double zero_tol = static_cast<double>(ch.dim()) * config().support_rel;
    RealMatrix out(a, a);
    std::vector<Matrix> roots(static_cast<std::size_t>(a));
    for (int i = 0; i < a; ++i) roots[static_cast<std::size_t>(i)] = ch.state(i).sqrt();
    for (int i = 0; i < a; ++i) {
        for (int k = i; k < a; ++k) {
            double c = trace_norm(roots[static_cast<std::size_t>(i)] *
                                  roots[static_cast<std::size_t>(k)]);
            c = std::clamp(c, 0.0, 1.0);
            if (c <= zero_tol) c = 0.0;
            out(i, k) = c;
            out(k, i) = c;
        }
    }
    return out;
}

double holevo_quantity(const CqChannel& ch, const InputDistribution& pi) {
    check_alphabet(ch, pi);
    Matrix avg = Matrix::Zero(ch.dim(), ch.dim());
    double mixture_entropy = 0.0;
    for (int i = 0; i < ch.alphabet_size(); ++i) {
        avg += pi[i] * ch.state(i).matrix();
        if (pi[i] > 0.0) mixture_entropy += pi[i] * von_neumann_entropy(ch.state(i));
    }
    const SpectralDecomposition sd = spectral_decompose_symmetrized(avg);
    double avg_entropy = 0.0;
    for (Eigen::Index k = 0; k < sd.eigenvalues.size(); ++k) {
        const double lambda = sd.eigenvalues[k];
        if (lambda > 0.0) avg_entropy -= lambda * std::log2(lambda);
    }
    return std::max(0.0, avg_entropy - mixture_entropy);
}

double mu_rc(const CqChannel& ch, const InputDistribution& pi, double s) {
    check_alphabet(ch, pi);
    if (!(s > 0.0)) {
        throw Error(Error::Kind::invalid_argument, "mu_rc requires s > 0");
    }
    const double g = trace_mix_power(state_powers(ch, 1.0 / (1.0 + s)), as_probs(pi), s);
    return -log2_clamped(g);
}

double mu_rc_s_derivative(const CqChannel& ch, const InputDistribution& pi, double s) {
    check_alphabet(ch, pi);
    if (!(s > 0.0)) {
        throw Error(Error::Kind::invalid_argument, "mu_rc_s_derivative requires s > 0");
    }
    const double p = 1.0 / (1.0 + s);
    const int a = ch.alphabet_size();

    Matrix A = Matrix::Zero(ch.dim(), ch.dim());
    std::vector<Matrix> powered(static_cast<std::size_t>(a));
    for (int i = 0; i < a; ++i) {
        powered[static_cast<std::size_t>(i)] = ch.state(i).power(p);
        A += pi[i] * powered[static_cast<std::size_t>(i)];
    }
    const SpectralDecomposition sd = spectral_decompose_symmetrized(A);
    const double tau = support_threshold(sd.eigenvalues.size() ? sd.eigenvalues[0] : 0.0, A.rows());

    // A^s and G = Tr A^{1+s}, T2 = Tr A^{1+s} log A on supp A
    RealVector as_eigs(sd.eigenvalues.size());
    double g_value = 0.0;
    double t2 = 0.0;
    for (Eigen::Index k = 0; k < sd.eigenvalues.size(); ++k) {
        const double lambda = sd.eigenvalues[k];
        if (lambda > tau) {
            as_eigs[k] = std::pow(lambda, s);
            g_value += std::pow(lambda, 1.0 + s);
            t2 += std::pow(lambda, 1.0 + s) * std::log(lambda);
        } else {
            as_eigs[k] = 0.0;
        }
    }
    const Matrix a_pow_s = sd.eigenvectors * as_eigs.asDiagonal() * sd.eigenvectors.adjoint();

    // T1 = sum_i pi_i Tr A^s S_i^p log S_i^p, via each state's spectrum
    double t1 = 0.0;
    for (int i = 0; i < a; ++i) {
        if (pi[i] <= 0.0) continue;
        const SpectralDecomposition& si = ch.state(i).spectral();
        const double tau_i = support_threshold(si.eigenvalues.size() ? si.eigenvalues[0] : 0.0,
                                               si.eigenvalues.size());
        RealVector mapped(si.eigenvalues.size());
        for (Eigen::Index k = 0; k < si.eigenvalues.size(); ++k) {
            const double lambda = si.eigenvalues[k];
            mapped[k] = lambda > tau_i ? p * std::pow(lambda, p) * std::log(lambda) : 0.0;
        }
        const Matrix w = si.eigenvectors * mapped.asDiagonal() * si.eigenvectors.adjoint();
        t1 += pi[i] * std::real((a_pow_s * w).trace());
    }

    // G' = -(T1 - T2); mu' = -G'/G, converted to bits
    return (t1 - t2) / (g_value * kLn2);
}

double mu_ex(const OverlapMatrix& overlaps, const InputDistribution& pi, double s) {
    if (!(s > 0.0)) {
        throw Error(Error::Kind::invalid_argument, "mu_ex requires s > 0");
    }
    const MuExTerms t = mu_ex_terms(overlaps, as_probs(pi), s);
    return mu_ex_nats(t, s) / kLn2;
}

double mu_ex(const CqChannel& ch, const InputDistribution& pi, double s) {
    check_alphabet(ch, pi);
    return mu_ex(overlap_matrix(ch), pi, s);
}

double mu_ex_limit(const OverlapMatrix& overlaps, const InputDistribution& pi) {
    const RealVector& p = pi.probs();
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            const double w = p[i] * p[k];
            if (w <= 0.0) continue;
            const double c = overlaps.base(i, k);
            if (c <= 0.0) return kInf;
            total -= w * std::log2(c);
        }
    }
    return total;
}

double mu_ex_limit(const CqChannel& ch, const InputDistribution& pi) {
    check_alphabet(ch, pi);
    return mu_ex_limit(overlap_matrix(ch), pi);
}

std::pair<double, double> mu_ex_derivatives(const OverlapMatrix& overlaps,
                                            const InputDistribution& pi, double s) {
    if (!(s > 0.0)) {
        throw Error(Error::Kind::invalid_argument, "mu_ex_derivatives requires s > 0");
    }
    const MuExTerms t = mu_ex_terms(overlaps, as_probs(pi), s);
    return {mu_ex_first_nats(t) / kLn2, mu_ex_second_nats(t, s) / kLn2};
}

std::pair<double, double> mu_ex_derivatives(const CqChannel& ch, const InputDistribution& pi,
                                            double s) {
    check_alphabet(ch, pi);
    return mu_ex_derivatives(overlap_matrix(ch), pi, s);
}

FixedPiExponent expurgation_exponent_fixed_pi(const OverlapMatrix& overlaps,
                                              const InputDistribution& pi, double R) {
    if (!(R > 0.0)) {
        throw Error(Error::Kind::invalid_argument,
                    "expurgation exponent needs R > 0; use mu_ex_limit at R -> +0");
    }
    const double s_max = config().s_max_expurgation;
    auto deriv = [&](double s) {
        return mu_ex_first_nats(mu_ex_terms(overlaps, as_probs(pi), s)) / kLn2;
    };
    FixedPiExponent out;
    if (deriv(1.0) <= R) {
        out.s_opt = 1.0;
    } else if (deriv(s_max) >= R) {
        // derivative never falls to R inside [1, s_max]: limit regime
        out.limit_regime = true;
        out.s_opt = kInf;
        out.raw = mu_ex_limit(overlaps, pi);
        out.value = std::max(0.0, out.raw);
        return out;
    } else {
        // bisect the decreasing derivative in log s
        double lo = 0.0, hi = std::log(s_max);
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (deriv(std::exp(mid)) > R) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.s_opt = std::exp(0.5 * (lo + hi));
    }
    out.raw = mu_ex(overlaps, pi, out.s_opt) - out.s_opt * R;
    out.value = std::max(0.0, out.raw);
    return out;
}

FixedPiExponent expurgation_exponent_fixed_pi(const CqChannel& ch, const InputDistribution& pi,
                                              double R) {
    check_alphabet(ch, pi);
    return expurgation_exponent_fixed_pi(overlap_matrix(ch), pi, R);
}

double expurgation_exponent_fixed_pi_value(const CqChannel& ch, const InputDistribution& pi,
                                           double R) {
    return expurgation_exponent_fixed_pi(ch, pi, R).value;
}

ExponentCurve random_coding_exponent(const CqChannel& ch, const std::vector<double>& rate_grid) {
    validate_rate_grid(rate_grid);
    for (double r : rate_grid) {
        if (r < 0.0) {
            throw Error(Error::Kind::invalid_argument, "rates must be nonnegative");
        }
    }

    // mu_max(s) = max_pi mu(pi, s) over a dense s-grid, warm-started upward
    const int grid_n = std::max(8, config().er_s_grid_points);
    const double s_min = 1e-4;
    std::vector<SGridEntry> grid(static_cast<std::size_t>(grid_n));
    FwOptions fw;
    fw.gap_tol = config().fw_gap_tol;
    for (int k = 0; k < grid_n; ++k) {
        const double t = static_cast<double>(k) / (grid_n - 1);
        const double s = std::exp(std::log(s_min) * (1.0 - t));
        if (k > 0) fw.start = grid[static_cast<std::size_t>(k - 1)].pi;
        const OptimizationReport rep = minimize_G(ch, s, fw);
        grid[static_cast<std::size_t>(k)] = {s, -log2_clamped(rep.optimum), rep.arg};
    }

    auto mu_max_at = [&](double s, const RealVector& warm) {
        FwOptions local;
        local.gap_tol = config().fw_gap_tol;
        local.start = warm;
        const OptimizationReport rep = minimize_G(ch, s, local);
        return std::pair<double, RealVector>(-log2_clamped(rep.optimum), rep.arg);
    };

    ExponentCurve curve;
    curve.points.resize(rate_grid.size());
    parallel_for(rate_grid.size(), [&](std::size_t idx) {
        const double R = rate_grid[idx];
        std::size_t best = 0;
        double best_val = -kInf;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double v = grid[k].mu_max - grid[k].s * R;
            if (v > best_val) {
                best_val = v;
                best = k;
            }
        }
        // golden-section refinement inside the best bracket (no concavity in
        // s is assumed globally; the dense grid supplies the bracket)
        double lo = grid[best > 0 ? best - 1 : 0].s;
        double hi = grid[std::min(best + 1, grid.size() - 1)].s;
        const RealVector& warm = grid[best].pi;
        double s_best = grid[best].s;
        double v_best = best_val;
        RealVector pi_best = grid[best].pi;
        const double invphi = 0.6180339887498949;
        double x1 = hi - invphi * (hi - lo);
        double x2 = lo + invphi * (hi - lo);
        auto eval = [&](double s) {
            auto [mu, pi] = mu_max_at(s, warm);
            const double v = mu - s * R;
            if (v > v_best) {
                v_best = v;
                s_best = s;
                pi_best = pi;
            }
            return v;
        };
        double f1 = eval(x1);
        double f2 = eval(x2);
        while (hi - lo > 1e-5 * std::max(1e-3, s_best)) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + invphi * (hi - lo);
                f2 = eval(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - invphi * (hi - lo);
                f1 = eval(x1);
            }
        }
        CurvePoint& pt = curve.points[idx];
        pt.rate = R;
        pt.raw = v_best;
        pt.value = std::max(0.0, v_best);
        pt.s_opt = s_best;
        pt.pi_opt = pi_best;
    });
    validate_curve_monotone(curve);
    return curve;
}

ExponentCurve expurgation_exponent(const CqChannel& ch, const std::vector<double>& rate_grid) {
    validate_rate_grid(rate_grid);
    for (double r : rate_grid) {
        if (r < 0.0) {
            throw Error(Error::Kind::invalid_argument, "rates must be nonnegative");
        }
    }
    const OverlapMatrix overlaps = overlap_matrix(ch);
    const int a = ch.alphabet_size();

    // mu_ex_max(s) on a log grid over [1, s_max]; pi by (multi-start)
    // quadratic-form minimization of the powered overlaps
    const int grid_n = std::max(8, config().ex_s_grid_points);
    const double s_max = config().s_max_expurgation;
    std::vector<SGridEntry> grid(static_cast<std::size_t>(grid_n));
    RealVector warm = RealVector::Constant(a, 1.0 / a);
    for (int k = 0; k < grid_n; ++k) {
        const double s = std::exp(std::log(s_max) * static_cast<double>(k) / (grid_n - 1));
        OptimizationReport rep =
            minimize_quadratic_form(overlaps.powered(s), /*convex_hint=*/s == 1.0);
        // warm candidate from the previous grid point
        const double warm_val = warm.dot(overlaps.powered(s) * warm);
        if (warm_val < rep.optimum) {
            rep.optimum = warm_val;
            rep.arg = warm;
        }
        grid[static_cast<std::size_t>(k)] = {s, -s * log2_clamped(rep.optimum), rep.arg};
        warm = rep.arg;
    }

    auto best_pi_at = [&](double s, const RealVector& seed_pi) {
        OptimizationReport rep = minimize_quadratic_form(overlaps.powered(s), s == 1.0);
        const double seed_val = seed_pi.dot(overlaps.powered(s) * seed_pi);
        if (seed_val < rep.optimum) return seed_pi;
        return rep.arg;
    };

    ExponentCurve curve;
    curve.points.resize(rate_grid.size());
    parallel_for(rate_grid.size(), [&](std::size_t idx) {
        const double R = rate_grid[idx];
        CurvePoint& pt = curve.points[idx];
        pt.rate = R;

        if (R == 0.0) {
            // E_ex(+0) = max_pi mu_ex_limit; the zero-rate machinery below
            // covers the infinite case
            const ZeroRateBounds zr = zero_rate_bounds(ch);
            pt.value = pt.raw = zr.lower;
            pt.s_opt = kInf;
            pt.pi_opt = zr.pi_lower;
            return;
        }

        std::size_t best = 0;
        double best_val = -kInf;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double v = grid[k].mu_max - grid[k].s * R;
            if (v > best_val) {
                best_val = v;
                best = k;
            }
        }
        RealVector pi = grid[best].pi;
        FixedPiExponent fixed = expurgation_exponent_fixed_pi(overlaps, InputDistribution(pi), R);
        // coordinate ascent: re-optimize pi at the current s, then s at the
        // current pi; every step is monotone in the objective
        for (int round = 0; round < 8 && !fixed.limit_regime; ++round) {
            const RealVector next_pi = best_pi_at(fixed.s_opt, pi);
            const FixedPiExponent next =
                expurgation_exponent_fixed_pi(overlaps, InputDistribution(next_pi), R);
            if (next.raw > fixed.raw + 1e-13) {
                pi = next_pi;
                fixed = next;
            } else {
                break;
            }
        }
        pt.raw = fixed.raw;
        pt.value = fixed.value;
        pt.s_opt = fixed.s_opt;
        pt.pi_opt = pi;
    });
    validate_curve_monotone(curve);
    return curve;
}

CutoffResult cutoff_rate(const CqChannel& ch) {
    const OverlapMatrix overlaps = overlap_matrix(ch);
    const OptimizationReport rep =
        minimize_quadratic_form(overlaps.base, /*convex_hint=*/true);
    CutoffResult out;
    out.bits = -log2_clamped(rep.optimum);
    out.pi_opt = rep.arg;
    out.kkt_residual = rep.kkt_residual;
    return out;
}

ZeroRateBounds zero_rate_bounds(const CqChannel& ch) {
    const int a = ch.alphabet_size();
    const OverlapMatrix overlaps = overlap_matrix(ch);
    const RealMatrix abs_overlaps = trace_norm_overlap_matrix(ch);

    ZeroRateBounds out;
    for (int i = 0; i < a; ++i) {
        for (int k = 0; k < a; ++k) {
            if (abs_overlaps(i, k) <= 0.0) {
                // an orthogonal pair: weighting it drives both minima to -inf
                out.infinite = true;
                out.lower = out.upper = kInf;
                RealVector pi = RealVector::Zero(a);
                pi[i] = 0.5;
                pi[k] += 0.5;
                out.pi_lower = out.pi_upper = pi;
                return out;
            }
        }
    }

    RealMatrix log_base(a, a), log_abs(a, a);
    for (int i = 0; i < a; ++i) {
        for (int k = 0; k < a; ++k) {
            log_base(i, k) = std::log2(overlaps.base(i, k));
            log_abs(i, k) = std::log2(abs_overlaps(i, k));
        }
    }
    const OptimizationReport lower_rep = minimize_quadratic_form(log_base, false);
    const OptimizationReport upper_rep = minimize_quadratic_form(log_abs, false);
    out.lower = -lower_rep.optimum;
    out.upper = -2.0 * upper_rep.optimum;
    out.pi_lower = lower_rep.arg;
    out.pi_upper = upper_rep.arg;
    return out;
}

BoundReport finite_M_bounds(const CqChannel& ch, const InputDistribution& pi, int M, int n,
                            double s, BoundKind kind, bool conjecture_mode) {
    check_alphabet(ch, pi);
    if (M < 2 || n < 1) {
        throw Error(Error::Kind::invalid_argument, "finite_M_bounds needs M >= 2 and n >= 1");
    }
    BoundReport report;
    report.kind = kind;
    report.M = M;
    report.n = n;
    report.s = s;
    report.pi = pi.probs();

    double log2_value;
    if (kind == BoundKind::random_coding) {
        if (!(s > 0.0) || s > 1.0) {
            throw Error(Error::Kind::invalid_argument,
                        "random-coding bound is defined for s in (0, 1]");
        }
        report.proved_regime = (s == 1.0);
        if (s < 1.0 && !conjecture_mode) {
            throw Error(Error::Kind::invalid_argument,
                        "random-coding bound with s < 1 is a conjecture; enable conjecture mode");
        }
        const double c = (s == 1.0) ? 1.0 : config().rc_conjecture_c;
        const double g = trace_mix_power(state_powers(ch, 1.0 / (1.0 + s)), pi.probs(), s);
        log2_value = std::log2(c) + s * std::log2(static_cast<double>(M - 1)) +
                     static_cast<double>(n) * log2_clamped(g);
    } else {
        if (!(s >= 1.0)) {
            throw Error(Error::Kind::invalid_argument, "expurgation bound requires s >= 1");
        }
        report.proved_regime = true;
        const OverlapMatrix overlaps = overlap_matrix(ch);
        const MuExTerms t = mu_ex_terms(overlaps, pi.probs(), s);
        // (4(M-1) F^n)^s, evaluated in logs
        log2_value = s * (std::log2(4.0 * static_cast<double>(M - 1)) +
                          static_cast<double>(n) * std::log1p(t.delta) / kLn2);
    }
    report.value = std::exp2(log2_value);
    report.display_value = std::min(1.0, report.value);
    return report;
}

CapacityResult capacity(const CqChannel& ch) {
    const int a = ch.alphabet_size();
    std::vector<double> state_entropy(static_cast<std::size_t>(a));
    for (int i = 0; i < a; ++i) {
        state_entropy[static_cast<std::size_t>(i)] = von_neumann_entropy(ch.state(i));
    }

    auto average = [&](const RealVector& pi) {
        Matrix avg = Matrix::Zero(ch.dim(), ch.dim());
        for (int i = 0; i < a; ++i) avg += pi[i] * ch.state(i).matrix();
        return avg;
    };

    SimplexObjective obj;
    obj.value = [&, state_entropy](const RealVector& pi) {
        const SpectralDecomposition sd = spectral_decompose_symmetrized(average(pi));
        double h = 0.0;
        for (Eigen::Index k = 0; k < sd.eigenvalues.size(); ++k) {
            if (sd.eigenvalues[k] > 0.0) h -= sd.eigenvalues[k] * std::log2(sd.eigenvalues[k]);
        }
        for (int i = 0; i < a; ++i) h -= pi[i] * state_entropy[static_cast<std::size_t>(i)];
        return h;
    };
    obj.gradient = [&, state_entropy](const RealVector& pi) {
        const SpectralDecomposition sd = spectral_decompose_symmetrized(average(pi));
        const double tau =
            support_threshold(sd.eigenvalues.size() ? sd.eigenvalues[0] : 0.0, ch.dim());
        RealVector g(a);
        for (int j = 0; j < a; ++j) {
            double cross = 0.0;  // Tr S_j log2 avg on supp avg
            double kernel_mass = 0.0;
            for (Eigen::Index k = 0; k < sd.eigenvalues.size(); ++k) {
                const double w = std::real(
                    sd.eigenvectors.col(k).dot(ch.state(j).matrix() * sd.eigenvectors.col(k)));
                if (sd.eigenvalues[k] > tau) {
                    cross += w * std::log2(sd.eigenvalues[k]);
                } else {
                    kernel_mass += w;
                }
            }
            if (kernel_mass > config().eta_psd) {
                g[j] = 1e6;  // relative entropy is +inf; finite stand-in for direction selection
            } else {
                g[j] = -state_entropy[static_cast<std::size_t>(j)] - cross;
            }
        }
        return g;
    };

    FwOptions fw;
    fw.gap_tol = 1e-9;
    const OptimizationReport rep = maximize_concave_over_simplex(obj, a, fw);

    CapacityResult out;
    out.chi_max = std::max(0.0, rep.optimum);
    out.pi_opt = rep.arg;
    out.kkt_residual = rep.gap;
    out.iterations = rep.iterations;
    out.converged = rep.converged;
    return out;
}

}  // namespace cqrel
