// Acceptance suite: one check per numbered criterion, one PASS/FAIL line
// each, nonzero exit if anything fails. Derived expectations are computed
// from independent scalar expressions or the oracle in tests/oracle.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cqrel/decoder.hpp"
#include "cqrel/exponents.hpp"
#include "cqrel/simplex.hpp"
#include "oracle/classical_gallager.hpp"
#include "test_util.hpp"

using namespace cqrel;

namespace {

struct Criterion {
    int id;
    std::string label;
    std::function<bool(std::string&)> run;
    double time_limit_s;  // 0 = unconstrained
};

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

bool leq(double value, double bound, const char* what, std::string& detail) {
    if (value <= bound) return true;
    std::ostringstream os;
    os << what << " = " << value << " exceeds " << bound;
    detail = os.str();
    return false;
}

bool near(double value, double expected, double tol, const char* what, std::string& detail) {
    if (std::abs(value - expected) <= tol) return true;
    std::ostringstream os;
    os << what << " = " << value << " vs expected " << expected << " (tol " << tol << ")";
    detail = os.str();
    return false;
}

oracle::Mat to_oracle(const RealMatrix& p) {
    oracle::Mat out(static_cast<std::size_t>(p.rows()),
                    oracle::Vec(static_cast<std::size_t>(p.cols())));
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index y = 0; y < p.cols(); ++y) {
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(y)] = p(i, y);
        }
    }
    return out;
}

oracle::Vec to_oracle(const RealVector& v) {
    return oracle::Vec(v.data(), v.data() + v.size());
}

// ---- criterion 1: classical reduction ----
bool criterion_classical_reduction(std::string& detail) {
    std::vector<RealMatrix> transitions;
    for (double p : {0.05, 0.1, 0.25}) {
        RealMatrix t(2, 2);
        t << 1.0 - p, p, p, 1.0 - p;
        transitions.push_back(t);
    }
    {
        Rng rng(20260810);
        transitions.push_back(random_stochastic_matrix(4, 4, rng));
    }

    Rng rng(101);
    for (const RealMatrix& p : transitions) {
        const CqChannel ch = from_classical(p);
        const oracle::Mat op = to_oracle(p);
        const int a = ch.alphabet_size();

        // scalar functionals at sampled inputs
        std::vector<InputDistribution> pis{InputDistribution::uniform(a),
                                           InputDistribution(rng.dirichlet(a)),
                                           InputDistribution(rng.dirichlet(a))};
        for (const auto& pi : pis) {
            const oracle::Vec opi = to_oracle(pi.probs());
            for (double s : {0.3, 0.7, 1.0}) {
                if (!near(mu_rc(ch, pi, s), oracle::e0_bits(op, opi, s), 1e-9, "mu_rc", detail))
                    return false;
            }
            for (double s : {1.0, 2.0, 5.0}) {
                if (!near(mu_ex(ch, pi, s), oracle::mu_ex_bits(op, opi, s), 1e-9, "mu_ex",
                          detail))
                    return false;
            }
        }

        if (!near(cutoff_rate(ch).bits, oracle::cutoff_bits(op), 1e-6, "cutoff", detail))
            return false;

        // optimized curves on a grid spanning the useful rate range
        const double cap = capacity(ch).chi_max;
        std::vector<double> grid;
        for (int k = 0; k < 6; ++k) grid.push_back(cap * (0.08 + 0.14 * k));
        const ExponentCurve er = random_coding_exponent(ch, grid);
        const ExponentCurve ex = expurgation_exponent(ch, grid);
        const oracle::Vec oracle_er = oracle::random_coding_curve(op, grid);
        const oracle::Vec oracle_ex = oracle::expurgation_curve(op, grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (!near(er.points[k].value, oracle_er[k], 1e-6, "E_r", detail)) return false;
            if (!near(ex.points[k].value, oracle_ex[k], 1e-6, "E_ex", detail)) return false;
        }
    }
    return true;
}

// ---- criterion 2: derived fixtures ----
bool criterion_derived_fixtures(std::string& detail) {
    const CqChannel bsc = CqChannel::bsc(0.1);
    const InputDistribution u2 = InputDistribution::uniform(2);

    const double mu1 = -std::log2(0.8);
    const double mu2 = -2.0 * std::log2(0.5 + 0.5 * std::sqrt(0.6));
    const double mu_inf = -0.5 * std::log2(0.6);
    if (!near(mu_rc(bsc, u2, 1.0), mu1, 1e-6, "bsc mu(1)", detail)) return false;
    if (!near(mu_ex(bsc, u2, 1.0), mu1, 1e-6, "bsc mu_ex(1)", detail)) return false;
    if (!near(mu_ex(bsc, u2, 2.0), mu2, 1e-6, "bsc mu_ex(2)", detail)) return false;
    if (!near(mu_ex_limit(bsc, u2), mu_inf, 1e-6, "bsc mu_ex(inf)", detail)) return false;
    const ZeroRateBounds zb = zero_rate_bounds(bsc);
    if (!near(zb.lower, mu_inf, 1e-6, "bsc zero-rate lower", detail)) return false;
    if (!near(zb.upper, 2.0 * mu_inf, 1e-6, "bsc zero-rate upper", detail)) return false;

    const CqChannel p2 = CqChannel::pure2(0.5);
    const double h34 = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
    if (!near(holevo_quantity(p2, u2), h34, 1e-6, "pure2 chi", detail)) return false;
    if (!near(cutoff_rate(p2).bits, 1.0 - std::log2(1.25), 1e-6, "pure2 cutoff", detail))
        return false;
    const ZeroRateBounds zp = zero_rate_bounds(p2);
    if (!near(zp.lower, 1.0, 1e-6, "pure2 zero-rate lower", detail)) return false;
    if (!near(zp.upper, 1.0, 1e-6, "pure2 zero-rate upper", detail)) return false;
    return true;
}

// ---- criterion 3: Holevo quantity dominates mu/s ----
bool criterion_proposition1(std::string& detail) {
    Rng rng(103);
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 1000; ++t) {
        const int a = 2 + t % 3;
        const int d = 2 + t % 3;
        const CqChannel ch = random_channel(a, d, rng);
        const InputDistribution pi(rng.dirichlet(a));
        const double s = t % 3 == 0 ? 0.1 : (t % 3 == 1 ? 0.5 : 1.0);
        worst = std::max(worst, mu_rc(ch, pi, s) / s - holevo_quantity(ch, pi));
    }
    return leq(worst, 1e-8, "max mu/s - chi", detail);
}

// ---- criterion 4: per-message bound of the square-root rule ----
bool criterion_lemma(std::string& detail) {
    Rng rng(104);
    const double r_values[4] = {0.25, 0.5, 0.75, 1.0};
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 1000; ++t) {
        const int d = 2 + t % 2;
        const int n = 1 + t % 2;
        const int m = 2 + t % 5;
        const CqChannel ch = random_channel(2 + t % 2, d, rng);
        const Codebook book = sample_codebook(ch, InputDistribution::uniform(ch.alphabet_size()),
                                              m, n, rng.next_u64());
        std::vector<DensityOperator> states;
        for (const auto& w : book.words) states.push_back(codeword_state(ch, w));
        const double r = r_values[t % 4];
        const RealVector p = error_probabilities(states, srm_rule(states, r));
        const RealVector b = lemma_bounds(states, r);
        worst = std::max(worst, (p - b).maxCoeff());
    }
    return leq(worst, 1e-9, "max P_j - bound_j", detail);
}

// ---- criterion 5: ensemble mean against the s=1 random-coding bound ----
bool criterion_random_coding_bound(std::string& detail) {
    const std::vector<CqChannel> channels{CqChannel::bsc(0.1), CqChannel::pure2(0.5)};
    std::uint64_t seed = 1050;
    for (const CqChannel& ch : channels) {
        const InputDistribution pi = InputDistribution::uniform(ch.alphabet_size());
        for (int n : {1, 2, 3}) {
            for (int M : {2, 4}) {
                const RandomCodingSummary s =
                    run_random_coding(ch, pi, n, M, 0.5, 1000, seed++);
                if (s.lemma_violation_fraction != 0.0) {
                    detail = "per-message bound violated in the ensemble";
                    return false;
                }
                if (!s.bound_holds) {
                    std::ostringstream os;
                    os << "mean " << s.mean_p_bar << " > bound " << s.rc_bound_s1 << " + 3*"
                       << s.stderr_p_bar << " (n=" << n << ", M=" << M << ")";
                    detail = os.str();
                    return false;
                }
            }
        }
    }
    return true;
}

// ---- criterion 6: expurgated ensembles attain the theorem bound ----
bool criterion_expurgation(std::string& detail) {
    const std::vector<CqChannel> channels{CqChannel::bsc(0.1), CqChannel::pure2(0.5)};
    std::uint64_t seed = 1060;
    for (const CqChannel& ch : channels) {
        const InputDistribution pi = InputDistribution::uniform(ch.alphabet_size());
        for (int n : {1, 2, 3}) {
            for (int M : {2, 4}) {
                for (double s : {1.0, 2.0}) {
                    const ExpurgationSummary e =
                        expurgate_trial(ch, pi, n, M, s, 1000, seed++);
                    if (!e.bound_attained) {
                        std::ostringstream os;
                        os << "min kept bound " << e.min_kept_bound << " > theorem bound "
                           << e.paper_bound << " (n=" << n << ", M=" << M << ", s=" << s << ")";
                        detail = os.str();
                        return false;
                    }
                    if (e.best_srm_p_max < 0.0 || e.best_srm_p_max > e.paper_bound + 1e-12) {
                        std::ostringstream os;
                        os << "exact SRM P_max " << e.best_srm_p_max << " > theorem bound "
                           << e.paper_bound;
                        detail = os.str();
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

// ---- criterion 7: closed-form derivatives against finite differences ----
bool criterion_derivatives(std::string& detail) {
    Rng rng(107);
    auto richardson1 = [](auto&& f, double s, double h) {
        const double d_h = (f(s + h) - f(s - h)) / (2.0 * h);
        const double d_h2 = (f(s + h / 2) - f(s - h / 2)) / h;
        return (4.0 * d_h2 - d_h) / 3.0;
    };
    auto richardson2 = [](auto&& f, double s, double h) {
        const double d_h = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
        const double d_h2 = (f(s + h / 2) - 2.0 * f(s) + f(s - h / 2)) / (h * h / 4.0);
        return (4.0 * d_h2 - d_h) / 3.0;
    };
    auto matches = [](double a, double b) {
        return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a));
    };

    for (int t = 0; t < 100; ++t) {
        const int a = 2 + t % 3;
        const CqChannel ch = random_channel(a, 2 + t % 3, rng, false);
        const InputDistribution pi(rng.dirichlet(a));
        const OverlapMatrix ov = overlap_matrix(ch);
        const double s_ex = 1.0 + 4.0 * rng.uniform();
        const auto [first, second] = mu_ex_derivatives(ov, pi, s_ex);
        if (second > 1e-8) {
            detail = "positive mu_ex second derivative " + std::to_string(second);
            return false;
        }
        auto f_ex = [&](double s) { return mu_ex(ov, pi, s); };
        if (!matches(first, richardson1(f_ex, s_ex, 1e-3 * s_ex))) {
            detail = "mu_ex first derivative mismatch at s=" + std::to_string(s_ex);
            return false;
        }
        if (!matches(second, richardson2(f_ex, s_ex, 1e-2 * s_ex))) {
            detail = "mu_ex second derivative mismatch at s=" + std::to_string(s_ex);
            return false;
        }

        const double s_rc = 0.05 + 0.95 * rng.uniform();
        const double closed = mu_rc_s_derivative(ch, pi, s_rc);
        if (closed < -1e-8) {
            detail = "negative mu_rc derivative " + std::to_string(closed);
            return false;
        }
        auto f_rc = [&](double s) { return mu_rc(ch, pi, s); };
        if (!matches(closed, richardson1(f_rc, s_rc, 1e-4 * (1.0 + s_rc)))) {
            detail = "mu_rc derivative mismatch at s=" + std::to_string(s_rc);
            return false;
        }
    }
    return true;
}

// ---- criterion 8: optimality certificates and grid agreement ----
bool criterion_kkt(std::string& detail) {
    Rng rng(108);
    std::vector<CqChannel> channels{CqChannel::bsc(0.1), CqChannel::pure2(0.5),
                                    random_channel(2, 3, rng), random_channel(3, 2, rng),
                                    random_channel(3, 3, rng)};
    for (const CqChannel& ch : channels) {
        for (double s : {0.5, 1.0, 2.0}) {
            const OptimizationReport rep = minimize_G(ch, s);
            if (!leq(rep.kkt_residual, 1e-7, "kkt residual", detail)) return false;

            if (ch.alphabet_size() <= 3) {
                const double p = 1.0 / (1.0 + s);
                std::vector<Matrix> powered;
                for (int i = 0; i < ch.alphabet_size(); ++i) {
                    powered.push_back(ch.state(i).power(p));
                }
                auto g_of = [&](const RealVector& pi) {
                    Matrix acc = Matrix::Zero(ch.dim(), ch.dim());
                    for (int i = 0; i < ch.alphabet_size(); ++i) {
                        acc += pi[i] * powered[static_cast<std::size_t>(i)];
                    }
                    const SpectralDecomposition sd = spectral_decompose_symmetrized(acc);
                    double total = 0.0;
                    for (Eigen::Index k = 0; k < sd.eigenvalues.size(); ++k) {
                        if (sd.eigenvalues[k] > 0.0) {
                            total += std::pow(sd.eigenvalues[k], 1.0 + s);
                        }
                    }
                    return total;
                };
                const double grid_best =
                    testutil::grid_min_simplex(ch.alphabet_size(), 1e-3, g_of);
                if (!near(rep.optimum, grid_best, 1e-6, "grid agreement", detail)) return false;
            }
        }
    }
    return true;
}

// ---- criterion 9: additivity across parallel channels ----
bool criterion_parallel_additivity(std::string& detail) {
    const CqChannel c1 = CqChannel::bsc(0.1);
    const CqChannel c2 = CqChannel::pure2(0.5);
    const CqChannel both = parallel_compose(c1, c2);
    for (double s : {0.5, 1.0}) {
        const double joint = -std::log2(minimize_G(both, s).optimum);
        const double split = -std::log2(minimize_G(c1, s).optimum) -
                             std::log2(minimize_G(c2, s).optimum);
        if (!near(joint, split, 1e-6, "additivity", detail)) return false;
    }
    return true;
}

// ---- criterion 10: fidelity sandwich and the Helstrom value ----
bool criterion_sandwich_helstrom(std::string& detail) {
    Rng rng(110);
    for (int t = 0; t < 10000; ++t) {
        const DensityOperator s = random_density_operator(2, rng, 1 + t % 2);
        const DensityOperator u = random_density_operator(2, rng, 1 + (t / 2) % 2);
        if (!fidelity_sandwich_check(s, u).holds) {
            detail = "sandwich violated at trial " + std::to_string(t);
            return false;
        }
        std::vector<DensityOperator> pair{s, u};
        const double srm_avg = error_probabilities(pair, srm_rule(pair, 0.5)).mean();
        if (srm_avg < helstrom_error(s, u) - 1e-9) {
            detail = "square-root rule beat the Helstrom floor at trial " + std::to_string(t);
            return false;
        }
    }
    const CqChannel p2 = CqChannel::pure2(0.5);
    return near(helstrom_error(p2.state(0), p2.state(1)), 0.066987, 1e-6, "helstrom(0.5)",
                detail);
}

}  // namespace

int main() {
    std::vector<Criterion> criteria{
        {1, "classical reduction matches the scalar oracle", criterion_classical_reduction, 10.0},
        {2, "derived fixture values", criterion_derived_fixtures, 5.0},
        {3, "Holevo quantity dominates mu(pi,s)/s", criterion_proposition1, 60.0},
        {4, "square-root rule per-message bound", criterion_lemma, 120.0},
        {5, "random-coding bound at s=1 over seeded ensembles", criterion_random_coding_bound,
         120.0},
        {6, "expurgation bound attained by kept sub-codes", criterion_expurgation, 120.0},
        {7, "closed-form derivatives match finite differences", criterion_derivatives, 30.0},
        {8, "minimize_G certificates and grid agreement", criterion_kkt, 0.0},
        {9, "parallel-channel additivity of max_pi mu", criterion_parallel_additivity, 0.0},
        {10, "fidelity sandwich and Helstrom floor", criterion_sandwich_helstrom, 0.0},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        const double t0 = now_s();
        bool pass = false;
        try {
            pass = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed = now_s() - t0;
        if (pass && c.time_limit_s > 0.0 && elapsed > c.time_limit_s) {
            pass = false;
            detail = "runtime " + std::to_string(elapsed) + "s exceeds " +
                     std::to_string(c.time_limit_s) + "s";
        }
        std::printf("[%s] criterion %2d (%6.2fs): %s%s%s\n", pass ? "PASS" : "FAIL", c.id,
                    elapsed, c.label.c_str(), detail.empty() ? "" : " -- ",
                    detail.c_str());
        if (!pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
