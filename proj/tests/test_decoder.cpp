#include <doctest.h>

#include <cmath>

#include "cqrel/decoder.hpp"
#include "test_util.hpp"

using namespace cqrel;
using testutil::close;

namespace {

std::vector<DensityOperator> orthogonal_pair() {
    return {testutil::pure_state(Eigen::Vector2cd(1.0, 0.0)),
            testutil::pure_state(Eigen::Vector2cd(0.0, 1.0))};
}

}  // namespace

TEST_CASE("srm_rule on orthogonal pure states gives perfect projectors") {
    const auto states = orthogonal_pair();
    const DecisionRule rule = srm_rule(states, 0.5);
    for (int j = 0; j < 2; ++j) {
        CHECK((rule.operators[static_cast<std::size_t>(j)] - states[static_cast<std::size_t>(j)].matrix())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }
    const RealVector p = error_probabilities(states, rule);
    CHECK(close(p[0], 0.0, 1e-12));
    CHECK(close(p[1], 0.0, 1e-12));
}

TEST_CASE("srm_rule splits identical states evenly") {
    Rng rng(51);
    const DensityOperator s = random_density_operator(3, rng, 2);
    std::vector<DensityOperator> states{s, s};
    for (double r : {0.25, 0.5, 1.0}) {
        const DecisionRule rule = srm_rule(states, r);
        const Matrix projector = matrix_power(s.matrix(), 0.0);
        CHECK((rule.operators[0] - 0.5 * projector).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((rule.operators[0] - rule.operators[1]).cwiseAbs().maxCoeff() <= 1e-10);
        const RealVector p = error_probabilities(states, rule);
        CHECK(close(p[0], 0.5, 1e-10));
        CHECK(close(p[1], 0.5, 1e-10));
    }
}

TEST_CASE("srm_rule completeness and positivity on random instances") {
    Rng rng(52);
    for (int t = 0; t < 40; ++t) {
        const int m = 2 + t % 4;
        const int d = 2 + t % 3;
        std::vector<DensityOperator> states;
        for (int j = 0; j < m; ++j) {
            states.push_back(random_density_operator(d, rng, 1 + t % d));
        }
        const double r = 0.25 + 0.25 * (t % 4);
        const DecisionRule rule = srm_rule(states, r);

        Matrix sum = Matrix::Zero(d, d);
        Matrix powers = Matrix::Zero(d, d);
        for (int j = 0; j < m; ++j) {
            sum += rule.operators[static_cast<std::size_t>(j)];
            powers += states[static_cast<std::size_t>(j)].power(r);
            const SpectralDecomposition sd =
                spectral_decompose_symmetrized(rule.operators[static_cast<std::size_t>(j)]);
            CHECK(sd.eigenvalues.minCoeff() >= -1e-9);
        }
        CHECK((sum - matrix_power(powers, 0.0)).cwiseAbs().maxCoeff() <= 1e-9);
        const SpectralDecomposition total = spectral_decompose_symmetrized(sum);
        CHECK(total.eigenvalues.maxCoeff() <= 1.0 + 1e-8);
    }

    CHECK_THROWS_AS(srm_rule({random_density_operator(2, rng)}, 0.5), Error);
}

TEST_CASE("manual rule crediting everything to one message") {
    Rng rng(53);
    // full-support states sharing the whole space
    std::vector<DensityOperator> states{random_density_operator(2, rng),
                                        random_density_operator(2, rng),
                                        random_density_operator(2, rng)};
    DecisionRule rule;
    rule.operators = {Matrix::Identity(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
    const RealVector p = error_probabilities(states, rule);
    CHECK(close(p[0], 0.0, 1e-12));
    CHECK(close(p[1], 1.0, 1e-12));
    CHECK(close(p[2], 1.0, 1e-12));
}

TEST_CASE("lemma_bounds special values and the e4 inequality") {
    const auto orth = orthogonal_pair();
    const RealVector zero_bounds = lemma_bounds(orth, 0.5);
    CHECK(close(zero_bounds[0], 0.0, 1e-12));
    CHECK(close(zero_bounds[1], 0.0, 1e-12));

    const DensityOperator psi = testutil::pure_state(Eigen::Vector2cd(0.6, 0.8));
    const RealVector ones = lemma_bounds({psi, psi}, 0.5);
    CHECK(close(ones[0], 1.0, 1e-12));
    CHECK(close(ones[1], 1.0, 1e-12));

    Rng rng(54);
    for (int t = 0; t < 60; ++t) {
        std::vector<DensityOperator> states{random_density_operator(2, rng),
                                            random_density_operator(2, rng),
                                            random_density_operator(2, rng)};
        for (double r : {0.25, 0.5, 0.75, 1.0}) {
            const RealVector p = error_probabilities(states, srm_rule(states, r));
            const RealVector b = lemma_bounds(states, r);
            CHECK((p - b).maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("helstrom_error") {
    Rng rng(55);
    const DensityOperator s = random_density_operator(3, rng);
    CHECK(close(helstrom_error(s, s), 0.5, 1e-12));

    const auto orth = orthogonal_pair();
    CHECK(close(helstrom_error(orth[0], orth[1]), 0.0, 1e-12));

    const CqChannel p2 = CqChannel::pure2(0.5);
    CHECK(close(helstrom_error(p2.state(0), p2.state(1)), 0.5 * (1.0 - std::sqrt(0.75)), 1e-9));
}

TEST_CASE("fidelity sandwich") {
    Rng rng(56);
    const DensityOperator s = random_density_operator(2, rng);
    const SandwichCheck self = fidelity_sandwich_check(s, s);
    CHECK(close(self.lower, 0.0, 1e-10));
    CHECK(close(self.trace_distance, 0.0, 1e-10));
    CHECK(close(self.upper, 0.0, 1e-5));  // sqrt flattens the tolerance
    CHECK(self.holds);

    const auto orth = orthogonal_pair();
    const SandwichCheck far = fidelity_sandwich_check(orth[0], orth[1]);
    CHECK(close(far.lower, 2.0, 1e-12));
    CHECK(close(far.trace_distance, 2.0, 1e-12));
    CHECK(close(far.upper, 2.0, 1e-12));
    CHECK(close(far.upper_strong, 2.0, 1e-12));
    CHECK(far.holds);

    for (int t = 0; t < 500; ++t) {
        const SandwichCheck c = fidelity_sandwich_check(random_density_operator(2, rng),
                                                        random_density_operator(2, rng));
        CHECK(c.holds);
        CHECK(c.upper_strong <= c.upper + 1e-12);
    }
}

TEST_CASE("run_random_coding") {
    const InputDistribution u = InputDistribution::uniform(2);

    // orthogonal pure states: every trial with distinct codewords decodes
    // perfectly; repeated codewords force p_bar = 1/2 for any rule
    std::vector<TrialStats> orth_trials;
    const RandomCodingSummary perfect =
        run_random_coding(CqChannel::pure2(0.0), u, 1, 2, 0.5, 400, 3, &orth_trials);
    int repeats = 0;
    for (const auto& ts : orth_trials) {
        if (ts.p_bar > 0.0) {
            CHECK(close(ts.p_bar, 0.5, 1e-12));
            ++repeats;
        }
    }
    CHECK(close(perfect.mean_p_bar, 0.5 * repeats / 400.0, 1e-12));
    CHECK(perfect.mean_p_bar <= perfect.rc_bound_s1 + 3.0 * perfect.stderr_p_bar);
    CHECK(perfect.lemma_violation_fraction == 0.0);

    std::vector<TrialStats> trials;
    const RandomCodingSummary bsc =
        run_random_coding(CqChannel::bsc(0.1), u, 2, 2, 0.5, 1000, 5, &trials);
    CHECK(bsc.mean_p_bar <= 0.64 + 3.0 * bsc.stderr_p_bar);
    CHECK(close(bsc.rc_bound_s1, 0.64, 1e-12));
    CHECK(bsc.lemma_violation_fraction == 0.0);
    CHECK(bsc.bound_holds);
    CHECK(trials.size() == 1000);
    for (const auto& ts : trials) {
        CHECK(ts.error_probs.minCoeff() >= 0.0);
        CHECK(ts.error_probs.maxCoeff() <= 1.0);
        CHECK(close(ts.p_bar, ts.error_probs.mean(), 1e-15));
    }

    const RandomCodingSummary again =
        run_random_coding(CqChannel::bsc(0.1), u, 2, 2, 0.5, 1000, 5);
    CHECK(again.mean_p_bar == bsc.mean_p_bar);
    CHECK(again.mean_p_max == bsc.mean_p_max);

    CHECK_THROWS_AS(run_random_coding(CqChannel::bsc(0.1), u, 30, 2, 0.5, 10, 1), Error);
}

TEST_CASE("srm average error never beats the Helstrom floor") {
    Rng rng(57);
    for (int t = 0; t < 80; ++t) {
        std::vector<DensityOperator> pair{random_density_operator(2 + t % 2, rng),
                                          random_density_operator(2 + t % 2, rng)};
        const RealVector p = error_probabilities(pair, srm_rule(pair, 0.5));
        const double floor = helstrom_error(pair[0], pair[1]);
        CHECK(p.mean() >= floor - 1e-9);

        // pairwise floor chain through the strengthened sandwich bound
        const double g = trace_norm(pair[0].sqrt() * pair[1].sqrt());
        CHECK(floor >= 0.25 * g * g - 1e-9);
    }
}

TEST_CASE("expurgate_trial") {
    const InputDistribution u = InputDistribution::uniform(2);

    const ExpurgationSummary orth =
        expurgate_trial(CqChannel::pure2(0.0), u, 2, 2, 1.0, 50, 9);
    CHECK(orth.min_kept_bound == 0.0);
    CHECK(orth.bound_attained);
    CHECK(orth.best_srm_p_max == 0.0);

    // identical states: every overlap is 1, beta_j = M' - 1 = 2
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 0.7;
    m(1, 1) = 0.3;
    std::vector<DensityOperator> same{DensityOperator(m), DensityOperator(m)};
    const CqChannel flat(std::move(same));
    const ExpurgationSummary id = expurgate_trial(flat, u, 1, 2, 1.0, 10, 9);
    CHECK(close(id.min_kept_bound, 2.0, 1e-12));
    CHECK(close(id.paper_bound, 4.0, 1e-12));
    CHECK(id.bound_attained);
    CHECK(id.M_prime == 3);

    const ExpurgationSummary bsc = expurgate_trial(CqChannel::bsc(0.1), u, 3, 4, 2.0, 1000, 11);
    CHECK(bsc.min_kept_bound <= bsc.paper_bound);
    CHECK(bsc.bound_attained);

    const ExpurgationSummary again = expurgate_trial(CqChannel::bsc(0.1), u, 3, 4, 2.0, 1000, 11);
    CHECK(again.min_kept_bound == bsc.min_kept_bound);
    CHECK(again.best_trial == bsc.best_trial);

    CHECK_THROWS_AS(expurgate_trial(flat, u, 1, 2, 0.5, 10, 1), Error);
}
