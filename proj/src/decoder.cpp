#include "cqrel/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cqrel/parallel.hpp"

namespace cqrel {

namespace {

void check_states(const std::vector<DensityOperator>& states, int minimum) {
    if (static_cast<int>(states.size()) < minimum) {
        throw Error(Error::Kind::invalid_argument,
                    "need at least " + std::to_string(minimum) + " states");
    }
    for (const auto& s : states) {
        if (s.dim() != states.front().dim()) {
            throw Error(Error::Kind::invalid_argument, "states live on different dimensions");
        }
    }
}

double check_cap_pow(int dim, int n) {
    double total = 1.0;
    for (int k = 0; k < n; ++k) {
        total *= dim;
        if (total > config().dim_cap) {
            throw Error(Error::Kind::dimension_cap,
                        "dimension " + std::to_string(dim) + "^" + std::to_string(n) +
                            " exceeds cap " + std::to_string(config().dim_cap));
        }
    }
    return total;
}

/// Pairwise codeword overlap Tr sqrt(S_w) sqrt(S_w') as a product of
/// single-letter overlaps; avoids building product states.
double word_overlap(const OverlapMatrix& ov, const Codeword& a, const Codeword& b) {
    double c = 1.0;
    for (int k = 0; k < a.length(); ++k) {
        c *= ov.base(a.symbols[static_cast<std::size_t>(k)],
                     b.symbols[static_cast<std::size_t>(k)]);
        if (c == 0.0) return 0.0;
    }
    return c;
}

}  // namespace

DecisionRule srm_rule(const std::vector<DensityOperator>& states, double r) {
    check_states(states, 2);
    if (!(r > 0.0) || r > 1.0) {
        throw Error(Error::Kind::invalid_argument, "srm_rule expects r in (0, 1]");
    }
    const Eigen::Index d = states.front().dim();
    Matrix b = Matrix::Zero(d, d);
    std::vector<Matrix> powered(states.size());
    for (std::size_t j = 0; j < states.size(); ++j) {
        powered[j] = states[j].power(r);
        b += powered[j];
    }
    const Matrix b_inv_sqrt = matrix_power(b, -0.5);
    DecisionRule rule;
    rule.operators.resize(states.size());
    for (std::size_t j = 0; j < states.size(); ++j) {
        Matrix x = b_inv_sqrt * powered[j] * b_inv_sqrt;
        rule.operators[j] = 0.5 * (x + x.adjoint().eval());
    }
    return rule;
}

RealVector error_probabilities(const std::vector<DensityOperator>& states,
                               const DecisionRule& rule) {
    if (states.size() != rule.operators.size()) {
        throw Error(Error::Kind::invalid_argument, "rule size does not match state count");
    }
    check_states(states, 1);
    RealVector p(static_cast<Eigen::Index>(states.size()));
    for (std::size_t j = 0; j < states.size(); ++j) {
        if (rule.operators[j].rows() != states[j].dim()) {
            throw Error(Error::Kind::invalid_argument, "rule dimension mismatch");
        }
        const double hit = std::real((states[j].matrix() * rule.operators[j]).trace());
        p[static_cast<Eigen::Index>(j)] = std::clamp(1.0 - hit, 0.0, 1.0);
    }
    return p;
}

RealVector lemma_bounds(const std::vector<DensityOperator>& states, double r) {
    check_states(states, 1);
    if (!(r > 0.0) || r > 1.0) {
        throw Error(Error::Kind::invalid_argument, "lemma_bounds expects r in (0, 1]");
    }
    const Eigen::Index d = states.front().dim();
    Matrix total = Matrix::Zero(d, d);
    std::vector<Matrix> powered(states.size());
    for (std::size_t j = 0; j < states.size(); ++j) {
        powered[j] = states[j].power(r);
        total += powered[j];
    }
    RealVector b(static_cast<Eigen::Index>(states.size()));
    for (std::size_t j = 0; j < states.size(); ++j) {
        const Matrix rest = total - powered[j];
        b[static_cast<Eigen::Index>(j)] =
            std::max(0.0, std::real((states[j].power(1.0 - r) * rest).trace()));
    }
    return b;
}

double helstrom_error(const DensityOperator& s, const DensityOperator& t) {
    if (s.dim() != t.dim()) {
        throw Error(Error::Kind::invalid_argument, "helstrom_error dimension mismatch");
    }
    const double dist = trace_norm(s.matrix() - t.matrix());
    return std::clamp(0.5 * (1.0 - 0.5 * dist), 0.0, 0.5);
}

SandwichCheck fidelity_sandwich_check(const DensityOperator& s, const DensityOperator& t) {
    const Matrix product = s.sqrt() * t.sqrt();
    const double overlap = std::max(0.0, std::real(product.trace()));
    const double abs_overlap = trace_norm(product);
    SandwichCheck out;
    out.trace_distance = trace_norm(s.matrix() - t.matrix());
    out.lower = 2.0 * (1.0 - overlap);
    out.upper = 2.0 * std::sqrt(std::max(0.0, 1.0 - overlap * overlap));
    out.upper_strong = 2.0 * std::sqrt(std::max(0.0, 1.0 - abs_overlap * abs_overlap));
    out.holds = out.lower <= out.trace_distance + 1e-9 &&
                out.trace_distance <= out.upper + 1e-9 &&
                out.trace_distance <= out.upper_strong + 1e-9;
    return out;
}

RandomCodingSummary run_random_coding(const CqChannel& ch, const InputDistribution& pi, int n,
                                      int M, double r, int trials, std::uint64_t seed,
                                      std::vector<TrialStats>* per_trial) {
    if (trials < 1 || M < 2 || n < 1) {
        throw Error(Error::Kind::invalid_argument,
                    "run_random_coding needs trials >= 1, M >= 2, n >= 1");
    }
    check_cap_pow(ch.dim(), n);

    std::vector<TrialStats> stats(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        const std::uint64_t trial_seed = derive_seed(seed, t);
        const Codebook book = sample_codebook(ch, pi, M, n, trial_seed);
        std::vector<DensityOperator> states;
        states.reserve(static_cast<std::size_t>(M));
        for (const auto& w : book.words) states.push_back(codeword_state(ch, w));
        const DecisionRule rule = srm_rule(states, r);

        TrialStats& ts = stats[t];
        ts.seed = trial_seed;
        ts.error_probs = error_probabilities(states, rule);
        ts.lemma_bound = lemma_bounds(states, r);
        ts.p_bar = ts.error_probs.mean();
        ts.p_max = ts.error_probs.maxCoeff();
        for (Eigen::Index j = 0; j < ts.error_probs.size(); ++j) {
            if (ts.error_probs[j] > ts.lemma_bound[j] + 1e-9) ++ts.lemma_violations;
        }
    });

    RandomCodingSummary summary;
    summary.trials = trials;
    summary.M = M;
    summary.n = n;
    summary.r = r;
    summary.seed = seed;
    double sum = 0.0, sum_sq = 0.0, sum_max = 0.0;
    long violations = 0;
    for (const auto& ts : stats) {
        sum += ts.p_bar;
        sum_sq += ts.p_bar * ts.p_bar;
        sum_max += ts.p_max;
        violations += ts.lemma_violations;
    }
    summary.mean_p_bar = sum / trials;
    const double var =
        trials > 1 ? std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1)) : 0.0;
    summary.stderr_p_bar = std::sqrt(var / trials);
    summary.mean_p_max = sum_max / trials;
    summary.lemma_violation_fraction =
        static_cast<double>(violations) / (static_cast<double>(trials) * M);
    summary.rc_bound_s1 =
        finite_M_bounds(ch, pi, M, n, 1.0, BoundKind::random_coding).value;
    summary.bound_holds = summary.mean_p_bar <= summary.rc_bound_s1 + 3.0 * summary.stderr_p_bar;
    for (auto& ts : stats) ts.rc_bound = summary.rc_bound_s1;
    if (per_trial != nullptr) *per_trial = std::move(stats);
    return summary;
}

ExpurgationSummary expurgate_trial(const CqChannel& ch, const InputDistribution& pi, int n, int M,
                                   double s, int trials, std::uint64_t seed) {
    if (trials < 1 || M < 2 || n < 1) {
        throw Error(Error::Kind::invalid_argument,
                    "expurgate_trial needs trials >= 1, M >= 2, n >= 1");
    }
    if (!(s >= 1.0)) {
        throw Error(Error::Kind::invalid_argument, "expurgate_trial requires s >= 1");
    }
    const int m_prime = 2 * M - 1;
    const OverlapMatrix overlaps = overlap_matrix(ch);

    struct TrialOutcome {
        double kept_bound = 0.0;
        std::vector<int> kept;
    };
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        const Codebook book = sample_codebook(ch, pi, m_prime, n, derive_seed(seed, t));
        std::vector<double> beta(static_cast<std::size_t>(m_prime), 0.0);
        for (int j = 0; j < m_prime; ++j) {
            for (int l = 0; l < m_prime; ++l) {
                if (l == j) continue;
                const double c = word_overlap(overlaps, book.words[static_cast<std::size_t>(j)],
                                              book.words[static_cast<std::size_t>(l)]);
                if (c > 0.0) beta[static_cast<std::size_t>(j)] += std::pow(c, 1.0 / s);
            }
        }
        std::vector<int> order(static_cast<std::size_t>(m_prime));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            return beta[static_cast<std::size_t>(x)] < beta[static_cast<std::size_t>(y)];
        });
        order.resize(static_cast<std::size_t>(M));
        double worst = 0.0;
        for (int j : order) {
            worst = std::max(worst, std::pow(beta[static_cast<std::size_t>(j)], s));
        }
        outcomes[t].kept_bound = worst;
        outcomes[t].kept = std::move(order);
    });

    ExpurgationSummary summary;
    summary.trials = trials;
    summary.M = M;
    summary.M_prime = m_prime;
    summary.n = n;
    summary.s = s;
    summary.seed = seed;
    summary.min_kept_bound = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        if (outcomes[static_cast<std::size_t>(t)].kept_bound < summary.min_kept_bound) {
            summary.min_kept_bound = outcomes[static_cast<std::size_t>(t)].kept_bound;
            summary.best_trial = t;
        }
    }
    summary.paper_bound =
        finite_M_bounds(ch, pi, M, n, s, BoundKind::expurgation).value;
    summary.bound_attained = summary.min_kept_bound <= summary.paper_bound + 1e-12;

    // exact SRM error of the winning expurgated code, when it fits in memory
    double total_dim = 1.0;
    for (int k = 0; k < n; ++k) total_dim *= ch.dim();
    if (total_dim <= config().dim_cap && summary.best_trial >= 0) {
        const Codebook book =
            sample_codebook(ch, pi, m_prime, n, derive_seed(seed, summary.best_trial));
        std::vector<DensityOperator> kept_states;
        for (int j : outcomes[static_cast<std::size_t>(summary.best_trial)].kept) {
            kept_states.push_back(codeword_state(ch, book.words[static_cast<std::size_t>(j)]));
        }
        const DecisionRule rule = srm_rule(kept_states, 0.5);
        summary.best_srm_p_max = error_probabilities(kept_states, rule).maxCoeff();
    }
    return summary;
}

}  // namespace cqrel
