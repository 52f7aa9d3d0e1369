#include "cqrel/verify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cqrel/decoder.hpp"
#include "cqrel/exponents.hpp"
#include "cqrel/io.hpp"
#include "cqrel/simplex.hpp"

namespace cqrel {

namespace {

struct Harness {
    std::vector<CheckResult> results;

    void check(const std::string& name, bool pass, const std::string& detail) {
        results.push_back({name, pass, detail});
    }
};

std::string worst_str(double v) { return "worst " + format_sig12(v); }

RealMatrix transition_of_diagonal(const CqChannel& ch) {
    RealMatrix p(ch.alphabet_size(), ch.dim());
    for (int i = 0; i < ch.alphabet_size(); ++i) {
        for (int y = 0; y < ch.dim(); ++y) {
            p(i, y) = std::real(ch.state(i).matrix()(y, y));
        }
    }
    return p;
}

double classical_e0_bits(const RealMatrix& p, const RealVector& pi, double s) {
    double total = 0.0;
    for (Eigen::Index y = 0; y < p.cols(); ++y) {
        double inner = 0.0;
        for (Eigen::Index x = 0; x < p.rows(); ++x) {
            inner += pi[x] * std::pow(p(x, y), 1.0 / (1.0 + s));
        }
        total += std::pow(inner, 1.0 + s);
    }
    return -std::log2(total);
}

RealMatrix classical_bhattacharyya(const RealMatrix& p, double r) {
    RealMatrix c(p.rows(), p.rows());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index k = 0; k < p.rows(); ++k) {
            double v = 0.0;
            for (Eigen::Index y = 0; y < p.cols(); ++y) {
                v += std::pow(p(i, y), 1.0 - r) * std::pow(p(k, y), r);
            }
            c(i, k) = v;
        }
    }
    return c;
}

double classical_mu_ex_bits(const RealMatrix& p, const RealVector& pi, double s) {
    const RealMatrix c = classical_bhattacharyya(p, 0.5);
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index k = 0; k < p.rows(); ++k) {
            if (c(i, k) > 0.0) total += pi[i] * pi[k] * std::pow(c(i, k), 1.0 / s);
        }
    }
    return -s * std::log2(total);
}

}  // namespace

std::vector<CheckResult> run_verification(const CqChannel& ch, SuiteLevel level,
                                          std::uint64_t seed) {
    const bool full = level == SuiteLevel::all;
    Harness h;
    Rng rng(seed);

    std::vector<CqChannel> fixtures;
    fixtures.push_back(CqChannel::bsc(0.1));
    fixtures.push_back(CqChannel::pure2(0.5));
    fixtures.push_back(ch);

    // ---- operator core ----
    {
        const int count = full ? 100 : 20;
        double worst = 0.0;
        for (int t = 0; t < count; ++t) {
            const int d = 2 + static_cast<int>(rng.uniform() * 3);
            const DensityOperator s = random_density_operator(d, rng);
            const double p = rng.uniform() * 2.0;
            const double q = rng.uniform() * 2.0;
            const Matrix lhs = matrix_power(matrix_power(s.matrix(), p), q);
            const Matrix rhs = matrix_power(s.matrix(), p * q);
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        h.check("operator-core/power-composition", worst <= 1e-9, worst_str(worst));
    }
    {
        const int count = full ? 200 : 30;
        double worst = -1.0;
        for (int t = 0; t < count; ++t) {
            const int d = 2 + static_cast<int>(rng.uniform() * 3);
            Matrix a(d, d), b(d, d);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    a(i, j) = Complex(rng.normal(), rng.normal());
                    b(i, j) = Complex(rng.normal(), rng.normal());
                }
            }
            worst = std::max(worst, trace_norm(a + b) - trace_norm(a) - trace_norm(b));
        }
        h.check("operator-core/trace-norm-triangle", worst <= 1e-10, worst_str(worst));
    }
    {
        const int count = full ? 50 : 10;
        double worst = 0.0;
        for (int t = 0; t < count; ++t) {
            const DensityOperator s = random_density_operator(2, rng);
            const DensityOperator u = random_density_operator(3, rng);
            const DensityOperator prod(tensor(s.matrix(), u.matrix()));
            worst = std::max(worst, std::abs(von_neumann_entropy(prod) - von_neumann_entropy(s) -
                                             von_neumann_entropy(u)));
        }
        h.check("operator-core/entropy-additivity", worst <= 1e-9, worst_str(worst));
    }
    {
        const int count = full ? 200 : 30;
        bool ok = true;
        std::string detail = "all nonnegative, zero iff equal";
        for (int t = 0; t < count && ok; ++t) {
            const int d = 2 + static_cast<int>(rng.uniform() * 2);
            const DensityOperator s = random_density_operator(d, rng);
            const DensityOperator u = random_density_operator(d, rng);
            const double v = relative_entropy(s, u);
            if (std::isfinite(v) && v < 0.0) {
                ok = false;
                detail = "negative value " + format_sig12(v);
            }
            const double self_v = relative_entropy(s, s);
            if (self_v > 1e-10) {
                ok = false;
                detail = "H(S,S) = " + format_sig12(self_v);
            }
            const double close = (s.matrix() - u.matrix()).cwiseAbs().maxCoeff();
            if (v <= 1e-10 && close > 1e-8) {
                ok = false;
                detail = "zero divergence for distinct states";
            }
        }
        h.check("operator-core/relative-entropy-nonneg", ok, detail);
    }
    {
        const int count = full ? 50 : 10;
        double worst = 0.0;
        for (int t = 0; t < count; ++t) {
            const DensityOperator s = random_density_operator(3, rng);
            const DensityOperator u = random_density_operator(3, rng, 2);
            const Matrix proj = matrix_power(u.matrix(), 0.0);
            const double direct = -std::log2(std::real((s.matrix() * proj).trace()));
            const double via_op = renyi_overlap(s, u, 0.0);
            worst = std::max(worst, std::abs(direct - via_op));
        }
        h.check("operator-core/renyi-r0-support-convention", worst <= 1e-9, worst_str(worst));
    }

    // ---- channel model ----
    {
        const int count = full ? 50 : 10;
        double worst = 0.0;
        for (int t = 0; t < count; ++t) {
            const CqChannel rc = random_channel(2 + static_cast<int>(rng.uniform() * 2), 2, rng);
            Codeword w1{{0, 1}};
            Codeword w2{{static_cast<std::uint8_t>(rng.uniform() * rc.alphabet_size())}};
            Codeword cat{{w1.symbols[0], w1.symbols[1], w2.symbols[0]}};
            const Matrix lhs = codeword_state(rc, cat).matrix();
            const Matrix rhs =
                tensor(codeword_state(rc, w1).matrix(), codeword_state(rc, w2).matrix());
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        h.check("channel/codeword-concatenation", worst <= 1e-12, worst_str(worst));
    }

    // ---- exponents ----
    {
        const int count = full ? 1000 : 100;
        double worst = -std::numeric_limits<double>::infinity();
        for (int t = 0; t < count; ++t) {
            const int a = 2 + static_cast<int>(rng.uniform() * 3);
            const int d = 2 + static_cast<int>(rng.uniform() * 3);
            const CqChannel rc = random_channel(a, d, rng);
            const InputDistribution pi(rng.dirichlet(a));
            const double s = t % 3 == 0 ? 0.1 : (t % 3 == 1 ? 0.5 : 1.0);
            const double chi = holevo_quantity(rc, pi);
            const double mu = mu_rc(rc, pi, s);
            worst = std::max(worst, mu / s - chi);
        }
        h.check("exponents/proposition-1", worst <= 1e-8, worst_str(worst));
    }
    {
        double worst = -std::numeric_limits<double>::infinity();
        const int count = full ? 100 : 20;
        for (const auto& cch : fixtures) {
            for (int t = 0; t < count; ++t) {
                const InputDistribution pi(rng.dirichlet(cch.alphabet_size()));
                worst = std::max(worst, mu_rc(cch, pi, 1.0) - holevo_quantity(cch, pi));
            }
        }
        h.check("exponents/holevo-dominates-mu1", worst <= 1e-8, worst_str(worst));
    }
    {
        double worst = 0.0;
        const int count = full ? 40 : 10;
        for (const auto& cch : fixtures) {
            for (int t = 0; t < count; ++t) {
                const InputDistribution pi(rng.dirichlet(cch.alphabet_size()));
                worst = std::max(worst, std::abs(mu_ex(cch, pi, 1.0) - mu_rc(cch, pi, 1.0)));
            }
        }
        h.check("exponents/mu-ex-equals-mu-rc-at-s1", worst <= 1e-10, worst_str(worst));
    }
    {
        bool ok = true;
        std::string detail = "first >= 0, second <= 0, second differences <= 1e-6";
        const int combos = full ? 20 : 6;
        for (int t = 0; t < combos && ok; ++t) {
            const CqChannel& cch = fixtures[static_cast<std::size_t>(t) % fixtures.size()];
            const InputDistribution pi(rng.dirichlet(cch.alphabet_size()));
            const OverlapMatrix ov = overlap_matrix(cch);
            for (double s = 1.0; s <= 32.0 && ok; s *= 2.0) {
                const auto [first, second] = mu_ex_derivatives(ov, pi, s);
                if (first < -1e-8 || second > 1e-8) {
                    ok = false;
                    detail = "derivative signs failed at s=" + format_sig12(s);
                }
                const double hstep = 1e-3 * s;
                const double dd = (mu_ex(ov, pi, s + hstep) - 2.0 * mu_ex(ov, pi, s) +
                                   mu_ex(ov, pi, s - hstep)) /
                                  (hstep * hstep);
                if (dd > 1e-6) {
                    ok = false;
                    detail = "positive second difference " + format_sig12(dd);
                }
            }
        }
        h.check("exponents/mu-ex-monotone-concave", ok, detail);
    }
    {
        double worst = -std::numeric_limits<double>::infinity();
        const int combos = full ? 20 : 6;
        for (int t = 0; t < combos; ++t) {
            const CqChannel& cch = fixtures[static_cast<std::size_t>(t) % fixtures.size()];
            const InputDistribution pi(rng.dirichlet(cch.alphabet_size()));
            for (double s : {0.1, 0.5, 1.0}) {
                worst = std::max(worst, -mu_rc_s_derivative(cch, pi, s));
            }
        }
        h.check("exponents/mu-rc-derivative-nonneg", worst <= 1e-8, worst_str(worst));
    }
    {
        double worst = 0.0;
        for (const auto& cch : fixtures) {
            const InputDistribution pi = InputDistribution::uniform(cch.alphabet_size());
            const OverlapMatrix ov = overlap_matrix(cch);
            const double mu1 = mu_ex(ov, pi, 1.0);
            const double d1 = mu_ex_derivatives(ov, pi, 1.0).first;
            const int steps = full ? 9 : 4;
            for (int k = 0; k <= steps; ++k) {
                const double rate = d1 + (mu1 - d1) * k / steps;
                if (rate <= 0.0) continue;
                const FixedPiExponent e = expurgation_exponent_fixed_pi(ov, pi, rate);
                worst = std::max(worst, std::abs(e.value - std::max(0.0, mu1 - rate)));
            }
        }
        h.check("exponents/expurgation-linear-segment", worst <= 1e-8, worst_str(worst));
    }
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& cch : fixtures) {
            const OverlapMatrix ov = overlap_matrix(cch);
            const RealMatrix abs_ov = trace_norm_overlap_matrix(cch);
            worst = std::max(worst, (ov.base - abs_ov).maxCoeff());
        }
        h.check("exponents/overlap-ordering", worst <= 1e-10, worst_str(worst));
    }
    {
        double worst = 0.0;
        const CqChannel composed = parallel_compose(fixtures[0], fixtures[1]);
        for (double s : {0.5, 1.0}) {
            const double lhs = -std::log2(minimize_G(composed, s).optimum);
            const double rhs = -std::log2(minimize_G(fixtures[0], s).optimum) -
                               std::log2(minimize_G(fixtures[1], s).optimum);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        h.check("exponents/parallel-additivity", worst <= 1e-6, worst_str(worst));
    }
    {
        std::vector<CqChannel> classical_channels;
        classical_channels.push_back(fixtures[0]);
        if (is_classical(ch)) classical_channels.push_back(ch);
        double worst = 0.0;
        for (const auto& cch : classical_channels) {
            const RealMatrix p = transition_of_diagonal(cch);
            const int count = full ? 20 : 5;
            for (int t = 0; t < count; ++t) {
                const InputDistribution pi(rng.dirichlet(cch.alphabet_size()));
                for (double s : {0.3, 1.0}) {
                    worst = std::max(worst, std::abs(mu_rc(cch, pi, s) -
                                                     classical_e0_bits(p, pi.probs(), s)));
                }
                for (double s : {1.0, 2.0}) {
                    worst = std::max(worst, std::abs(mu_ex(cch, pi, s) -
                                                     classical_mu_ex_bits(p, pi.probs(), s)));
                }
            }
            const double q_cut = cutoff_rate(cch).bits;
            const RealMatrix gram = classical_bhattacharyya(p, 0.5);
            const double c_cut = -std::log2(minimize_quadratic_form(gram, true).optimum);
            worst = std::max(worst, std::abs(q_cut - c_cut));
        }
        h.check("exponents/classical-reduction", worst <= 1e-9, worst_str(worst));
    }

    // ---- simplex optimization ----
    {
        double worst_res = 0.0;
        double worst_identity = 0.0;
        for (const auto& cch : fixtures) {
            for (double s : {0.5, 1.0, 2.0}) {
                const OptimizationReport rep = minimize_G(cch, s, {});
                worst_res = std::max(worst_res, rep.kkt_residual);
                // probability-weighted gradient identity at the optimum
                const double p = 1.0 / (1.0 + s);
                Matrix a = Matrix::Zero(cch.dim(), cch.dim());
                for (int i = 0; i < cch.alphabet_size(); ++i) {
                    a += rep.arg[i] * cch.state(i).power(p);
                }
                const Matrix a_s = matrix_power(a, s);
                double weighted = 0.0;
                for (int j = 0; j < cch.alphabet_size(); ++j) {
                    weighted +=
                        rep.arg[j] * std::real((cch.state(j).power(p) * a_s).trace());
                }
                worst_identity = std::max(
                    worst_identity, std::abs(weighted - std::real((a_s * a).trace())));
            }
        }
        h.check("simplex/kkt-certificate", worst_res <= 1e-7, worst_str(worst_res));
        h.check("simplex/weighted-gradient-identity", worst_identity <= 1e-10,
                worst_str(worst_identity));
    }
    {
        const OverlapMatrix ov = overlap_matrix(fixtures[1]);
        const RealMatrix f2 = ov.powered(2.0);
        const OptimizationReport r1 = minimize_quadratic_form(f2, false, 0, 1234);
        const OptimizationReport r2 = minimize_quadratic_form(f2, false, 0, 1234);
        const bool same = r1.optimum == r2.optimum &&
                          (r1.arg - r2.arg).cwiseAbs().maxCoeff() == 0.0;
        h.check("simplex/multistart-reproducibility", same,
                same ? "identical reports" : "reports differ for equal seeds");
    }
    {
        // convex instance: every start should land on the same value
        const OverlapMatrix ov = overlap_matrix(fixtures[0]);
        const OptimizationReport rep = minimize_quadratic_form(ov.base, false);
        double spread = 0.0;
        for (double v : rep.start_values) spread = std::max(spread, v - rep.optimum);
        h.check("simplex/convex-starts-agreement", spread <= 1e-7, worst_str(spread));
    }

    // ---- decoder ----
    {
        const int count = full ? 1000 : 100;
        double worst_violation = -std::numeric_limits<double>::infinity();
        double worst_completeness = 0.0;
        double worst_psd = 0.0;
        const double r_values[4] = {0.25, 0.5, 0.75, 1.0};
        for (int t = 0; t < count; ++t) {
            const int d = 2 + static_cast<int>(rng.uniform() * 2);
            const int n = 1 + static_cast<int>(rng.uniform() * 2);
            const int m = 2 + static_cast<int>(rng.uniform() * 5);
            const CqChannel rc = random_channel(2 + static_cast<int>(rng.uniform() * 2), d, rng);
            const Codebook book = sample_codebook(rc, InputDistribution::uniform(rc.alphabet_size()),
                                                  m, n, rng.next_u64());
            std::vector<DensityOperator> states;
            for (const auto& w : book.words) states.push_back(codeword_state(rc, w));
            const double r = r_values[t % 4];
            const DecisionRule rule = srm_rule(states, r);
            const RealVector p = error_probabilities(states, rule);
            const RealVector b = lemma_bounds(states, r);
            worst_violation = std::max(worst_violation, (p - b).maxCoeff());

            Matrix sum = Matrix::Zero(states.front().dim(), states.front().dim());
            Matrix powers = sum;
            for (std::size_t j = 0; j < states.size(); ++j) {
                sum += rule.operators[j];
                powers += states[j].power(r);
                const SpectralDecomposition sd =
                    spectral_decompose_symmetrized(rule.operators[j]);
                worst_psd = std::max(worst_psd, -sd.eigenvalues.minCoeff());
            }
            const Matrix projector = matrix_power(powers, 0.0);
            worst_completeness =
                std::max(worst_completeness, (sum - projector).cwiseAbs().maxCoeff());
        }
        h.check("decoder/lemma-e4-no-violations", worst_violation <= 1e-9,
                worst_str(worst_violation));
        h.check("decoder/srm-completeness", worst_completeness <= 1e-9,
                worst_str(worst_completeness));
        h.check("decoder/srm-psd", worst_psd <= 1e-9, worst_str(worst_psd));
    }
    {
        const int count = full ? 300 : 50;
        double worst = -std::numeric_limits<double>::infinity();
        double worst_pairwise = -std::numeric_limits<double>::infinity();
        for (int t = 0; t < count; ++t) {
            const int d = 2 + static_cast<int>(rng.uniform() * 2);
            std::vector<DensityOperator> pair{random_density_operator(d, rng),
                                              random_density_operator(d, rng)};
            const DecisionRule rule = srm_rule(pair, 0.5);
            const RealVector p = error_probabilities(pair, rule);
            const double floor = helstrom_error(pair[0], pair[1]);
            worst = std::max(worst, floor - p.mean());

            const double g = trace_norm(pair[0].sqrt() * pair[1].sqrt());
            worst_pairwise = std::max(worst_pairwise, 0.25 * g * g - floor);
        }
        h.check("decoder/helstrom-floor", worst <= 1e-9, worst_str(worst));
        h.check("decoder/pairwise-floor", worst_pairwise <= 1e-9, worst_str(worst_pairwise));
    }
    {
        const int count = full ? 10000 : 1000;
        int failures = 0;
        for (int t = 0; t < count; ++t) {
            const DensityOperator s = random_density_operator(2, rng);
            const DensityOperator u = random_density_operator(2, rng);
            if (!fidelity_sandwich_check(s, u).holds) ++failures;
        }
        h.check("decoder/fidelity-sandwich", failures == 0,
                std::to_string(failures) + " failures of " + std::to_string(count));
    }
    {
        const InputDistribution pi = InputDistribution::uniform(fixtures[0].alphabet_size());
        const RandomCodingSummary a = run_random_coding(fixtures[0], pi, 2, 2, 0.5, 50, 77);
        const RandomCodingSummary b = run_random_coding(fixtures[0], pi, 2, 2, 0.5, 50, 77);
        const ExpurgationSummary ea = expurgate_trial(fixtures[0], pi, 2, 2, 2.0, 50, 77);
        const ExpurgationSummary eb = expurgate_trial(fixtures[0], pi, 2, 2, 2.0, 50, 77);
        const bool same = a.mean_p_bar == b.mean_p_bar && a.mean_p_max == b.mean_p_max &&
                          ea.min_kept_bound == eb.min_kept_bound &&
                          ea.best_trial == eb.best_trial;
        h.check("decoder/summary-determinism", same,
                same ? "repeat runs identical" : "repeat runs differ");
    }

    return h.results;
}

}  // namespace cqrel
