#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqrel/decoder.hpp"
#include "cqrel/exponents.hpp"
#include "cqrel/io.hpp"
#include "cqrel/parallel.hpp"
#include "cqrel/verify.hpp"

namespace {

using cqrel::Error;
using json = nlohmann::ordered_json;

json jnum(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

int exit_code_for(const Error& e) {
    switch (e.kind) {
        case Error::Kind::io:
            return 2;
        case Error::Kind::dimension_cap:
            return 3;
        default:
            return 1;
    }
}

void emit_error(const std::string& message, int code) {
    nlohmann::json err = {{"error", message}, {"code", code}};
    std::cerr << err.dump() << "\n";
}

void write_output(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw Error(Error::Kind::io, "cannot open output file '" + out_path + "'");
    }
    out << payload;
}

json pi_to_json(const cqrel::RealVector& pi) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < pi.size(); ++i) arr.push_back(jnum(pi[i]));
    return arr;
}

cqrel::InputDistribution parse_pi(const std::string& text, int alphabet_size) {
    if (text.empty()) return cqrel::InputDistribution::uniform(alphabet_size);
    std::vector<double> entries;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            entries.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw Error(Error::Kind::invalid_argument, "cannot parse --pi entry '" + token + "'");
        }
    }
    if (static_cast<int>(entries.size()) != alphabet_size) {
        throw Error(Error::Kind::invalid_argument,
                    "--pi needs " + std::to_string(alphabet_size) + " entries");
    }
    cqrel::RealVector v(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) v[static_cast<Eigen::Index>(i)] = entries[i];
    return cqrel::InputDistribution(v);
}

void apply_config_file(const std::string& path, CLI::App& app) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Error::Kind::io, "cannot open config file '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(Error::Kind::io, std::string("cannot parse config file: ") + e.what());
    }
    cqrel::Config& cfg = cqrel::config();
    if (j.contains("eta_herm")) cfg.eta_herm = j["eta_herm"].get<double>();
    if (j.contains("eta_psd")) cfg.eta_psd = j["eta_psd"].get<double>();
    if (j.contains("eta_trace")) cfg.eta_trace = j["eta_trace"].get<double>();
    if (j.contains("support_rel")) cfg.support_rel = j["support_rel"].get<double>();
    if (j.contains("dim_cap")) cfg.dim_cap = j["dim_cap"].get<int>();
    if (j.contains("s_max_expurgation")) cfg.s_max_expurgation = j["s_max_expurgation"].get<double>();
    if (j.contains("er_s_grid_points")) cfg.er_s_grid_points = j["er_s_grid_points"].get<int>();
    if (j.contains("ex_s_grid_points")) cfg.ex_s_grid_points = j["ex_s_grid_points"].get<int>();
    if (j.contains("rc_conjecture_c")) cfg.rc_conjecture_c = j["rc_conjecture_c"].get<double>();
    if (j.contains("qp_starts")) cfg.qp_starts = j["qp_starts"].get<int>();

    // flags win over config: only fill options the user did not pass
    for (auto* sub : app.get_subcommands({})) {
        for (auto* opt : sub->get_options()) {
            const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
            if (name.empty() || !j.contains(name) || opt->count() > 0) continue;
            std::stringstream value;
            if (j[name].is_string()) {
                value << j[name].get<std::string>();
            } else {
                value << j[name].dump();
            }
            opt->add_result(value.str());
            opt->run_callback();
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reliability-function bounds for classical-quantum channels"};
    app.require_subcommand(1);

    std::string channel_source;
    std::string out_path;
    std::string config_path;
    std::size_t threads = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--channel", channel_source,
                        "channel JSON file or family spec like bsc(0.1), pure2(0.5)")
            ->required();
        sub->add_option("--out", out_path, "output file (default stdout)");
        sub->add_option("--config", config_path, "JSON config file with option defaults");
        sub->add_option("--threads", threads, "worker threads (0 = auto; CQREL_THREADS caps)");
    };

    CLI::App* cmd_capacity = app.add_subcommand("capacity", "Holevo capacity max_pi chi(pi)");
    add_common(cmd_capacity);

    CLI::App* cmd_cutoff = app.add_subcommand("cutoff", "quantum cutoff rate");
    add_common(cmd_cutoff);

    CLI::App* cmd_exponents =
        app.add_subcommand("exponents", "random-coding and expurgation exponent curves (CSV)");
    add_common(cmd_exponents);
    double rmin = 0.01, rmax = 0.5;
    int steps = 25;
    bool raw_values = false;
    cmd_exponents->add_option("--rmin", rmin, "lowest rate, bits");
    cmd_exponents->add_option("--rmax", rmax, "highest rate, bits");
    cmd_exponents->add_option("--steps", steps, "number of rate samples");
    cmd_exponents->add_flag("--raw", raw_values, "emit unclamped suprema instead of max(0, .)");

    CLI::App* cmd_zero_rate = app.add_subcommand("zero-rate", "zero-rate exponent bounds");
    add_common(cmd_zero_rate);

    CLI::App* cmd_bounds = app.add_subcommand("bounds", "finite-M error-probability bound");
    add_common(cmd_bounds);
    int bound_M = 2, bound_n = 1;
    double bound_s = 1.0;
    std::string bound_kind = "rc";
    std::string bound_pi;
    bool conjecture = false;
    cmd_bounds->add_option("--M", bound_M, "codebook size");
    cmd_bounds->add_option("--n", bound_n, "block length");
    cmd_bounds->add_option("--s", bound_s, "exponent parameter");
    cmd_bounds->add_option("--kind", bound_kind, "rc or ex")
        ->check(CLI::IsMember({"rc", "ex"}));
    cmd_bounds->add_option("--pi", bound_pi, "input distribution, comma separated");
    cmd_bounds->add_flag("--conjecture", conjecture,
                         "allow the unproved s<1 random-coding bound");

    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "random-coding ensemble with square-root decoding");
    add_common(cmd_simulate);
    int sim_n = 2, sim_M = 2, sim_trials = 1000;
    double sim_r = 0.5;
    std::uint64_t sim_seed = 1;
    std::string sim_pi;
    cmd_simulate->add_option("--n", sim_n, "block length");
    cmd_simulate->add_option("--M", sim_M, "codebook size");
    cmd_simulate->add_option("--r", sim_r, "decision-rule exponent in (0, 1]");
    cmd_simulate->add_option("--trials", sim_trials, "ensemble size");
    cmd_simulate->add_option("--seed", sim_seed, "base seed");
    cmd_simulate->add_option("--pi", sim_pi, "input distribution, comma separated");

    CLI::App* cmd_expurgate = app.add_subcommand("expurgate", "expurgated ensemble bound check");
    add_common(cmd_expurgate);
    int exp_n = 2, exp_M = 2, exp_trials = 1000;
    double exp_s = 1.0;
    std::uint64_t exp_seed = 1;
    std::string exp_pi;
    cmd_expurgate->add_option("--n", exp_n, "block length");
    cmd_expurgate->add_option("--M", exp_M, "kept codebook size");
    cmd_expurgate->add_option("--s", exp_s, "exponent parameter, >= 1");
    cmd_expurgate->add_option("--trials", exp_trials, "ensemble size");
    cmd_expurgate->add_option("--seed", exp_seed, "base seed");
    cmd_expurgate->add_option("--pi", exp_pi, "input distribution, comma separated");

    CLI::App* cmd_verify = app.add_subcommand("verify", "run the module invariant suites");
    add_common(cmd_verify);
    std::string suite = "all";
    cmd_verify->add_option("--suite", suite, "all or fast")
        ->check(CLI::IsMember({"all", "fast"}));

    CLI::App* cmd_probe = app.add_subcommand(
        "probe-concavity", "second differences of mu(pi, s) in s (exploratory)");
    add_common(cmd_probe);
    int probe_steps = 64;
    double probe_s_lo = 0.05, probe_s_hi = 1.0;
    std::uint64_t probe_seed = 1;
    cmd_probe->add_option("--s-steps", probe_steps, "grid size");
    cmd_probe->add_option("--s-lo", probe_s_lo, "lowest s");
    cmd_probe->add_option("--s-hi", probe_s_hi, "highest s");
    cmd_probe->add_option("--seed", probe_seed, "seed for the sampled distributions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) apply_config_file(config_path, app);
        cqrel::set_worker_request(threads);

        const cqrel::CqChannel channel = cqrel::resolve_channel_source(channel_source);

        if (*cmd_capacity) {
            const cqrel::CapacityResult res = cqrel::capacity(channel);
            json out = {{"chi_max", jnum(res.chi_max)},
                        {"pi_opt", pi_to_json(res.pi_opt)},
                        {"kkt_residual", jnum(res.kkt_residual)}};
            write_output(out_path, out.dump(2) + "\n");
        } else if (*cmd_cutoff) {
            const cqrel::CutoffResult res = cqrel::cutoff_rate(channel);
            json out = {{"cutoff_bits", jnum(res.bits)},
                        {"pi_opt", pi_to_json(res.pi_opt)}};
            write_output(out_path, out.dump(2) + "\n");
        } else if (*cmd_exponents) {
            if (steps < 1 || rmin < 0.0 || (steps > 1 && !(rmax > rmin))) {
                throw Error(Error::Kind::invalid_argument,
                            "need steps >= 1, rmin >= 0 and rmax > rmin");
            }
            std::vector<double> grid;
            for (int k = 0; k < steps; ++k) {
                grid.push_back(steps == 1 ? rmin
                                          : rmin + (rmax - rmin) * k / (steps - 1));
            }
            const cqrel::ExponentCurve er = cqrel::random_coding_exponent(channel, grid);
            const cqrel::ExponentCurve ex = cqrel::expurgation_exponent(channel, grid);
            std::ostringstream csv;
            csv << "R,E_r,E_ex,s_opt_r,s_opt_ex";
            for (int i = 0; i < channel.alphabet_size(); ++i) csv << ",pi_opt_" << i;
            csv << "\n";
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const cqrel::CurvePoint& pr = er.points[k];
                const cqrel::CurvePoint& px = ex.points[k];
                csv << cqrel::format_sig12(pr.rate) << ','
                    << cqrel::format_sig12(raw_values ? pr.raw : pr.value) << ','
                    << cqrel::format_sig12(raw_values ? px.raw : px.value) << ','
                    << cqrel::format_sig12(pr.s_opt) << ',' << cqrel::format_sig12(px.s_opt);
                for (Eigen::Index i = 0; i < pr.pi_opt.size(); ++i) {
                    csv << ',' << cqrel::format_sig12(pr.pi_opt[i]);
                }
                csv << "\n";
            }
            write_output(out_path, csv.str());
        } else if (*cmd_zero_rate) {
            const cqrel::ZeroRateBounds res = cqrel::zero_rate_bounds(channel);
            json out = {{"lower", jnum(res.lower)},
                        {"upper", jnum(res.upper)},
                        {"infinite", res.infinite}};
            write_output(out_path, out.dump(2) + "\n");
        } else if (*cmd_bounds) {
            const cqrel::InputDistribution pi = parse_pi(bound_pi, channel.alphabet_size());
            const cqrel::BoundKind kind = bound_kind == "rc" ? cqrel::BoundKind::random_coding
                                                             : cqrel::BoundKind::expurgation;
            const cqrel::BoundReport rep =
                cqrel::finite_M_bounds(channel, pi, bound_M, bound_n, bound_s, kind, conjecture);
            json out = {{"value", jnum(rep.value)},
                        {"display_value", jnum(rep.display_value)},
                        {"kind", bound_kind},
                        {"M", rep.M},
                        {"n", rep.n},
                        {"s", jnum(rep.s)},
                        {"pi", pi_to_json(rep.pi)},
                        {"proved_regime", rep.proved_regime}};
            write_output(out_path, out.dump(2) + "\n");
        } else if (*cmd_simulate) {
            const cqrel::InputDistribution pi = parse_pi(sim_pi, channel.alphabet_size());
            const cqrel::RandomCodingSummary res =
                cqrel::run_random_coding(channel, pi, sim_n, sim_M, sim_r, sim_trials, sim_seed);
            json out = {{"mean_p_bar", jnum(res.mean_p_bar)},
                        {"stderr_p_bar", jnum(res.stderr_p_bar)},
                        {"mean_p_max", jnum(res.mean_p_max)},
                        {"lemma_violation_fraction",
                         jnum(res.lemma_violation_fraction)},
                        {"rc_bound_s1", jnum(res.rc_bound_s1)},
                        {"bound_holds", res.bound_holds},
                        {"trials", res.trials},
                        {"M", res.M},
                        {"n", res.n},
                        {"r", jnum(res.r)},
                        {"seed", res.seed}};
            write_output(out_path, out.dump(2) + "\n");
        } else if (*cmd_expurgate) {
            const cqrel::InputDistribution pi = parse_pi(exp_pi, channel.alphabet_size());
            const cqrel::ExpurgationSummary res =
                cqrel::expurgate_trial(channel, pi, exp_n, exp_M, exp_s, exp_trials, exp_seed);
            json out = {{"min_kept_bound", jnum(res.min_kept_bound)},
                        {"paper_bound", jnum(res.paper_bound)},
                        {"bound_attained", res.bound_attained},
                        {"best_trial", res.best_trial},
                        {"trials", res.trials},
                        {"M", res.M},
                        {"M_prime", res.M_prime},
                        {"n", res.n},
                        {"s", jnum(res.s)},
                        {"seed", res.seed}};
            if (res.best_srm_p_max >= 0.0) {
                out["best_srm_p_max"] = jnum(res.best_srm_p_max);
            }
            write_output(out_path, out.dump(2) + "\n");
        } else if (*cmd_verify) {
            const cqrel::SuiteLevel level =
                suite == "fast" ? cqrel::SuiteLevel::fast : cqrel::SuiteLevel::all;
            const std::vector<cqrel::CheckResult> results =
                cqrel::run_verification(channel, level);
            std::ostringstream table;
            int failures = 0;
            for (const auto& r : results) {
                if (!r.pass) ++failures;
                table << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
                for (std::size_t pad = r.name.size(); pad < 44; ++pad) table << ' ';
                table << ' ' << r.detail << "\n";
            }
            table << (failures == 0 ? "all " + std::to_string(results.size()) + " checks passed"
                                    : std::to_string(failures) + " of " +
                                          std::to_string(results.size()) + " checks FAILED")
                  << "\n";
            write_output(out_path, table.str());
            if (failures > 0) {
                emit_error(std::to_string(failures) + " verification check(s) failed", 1);
                return 1;
            }
        } else if (*cmd_probe) {
            if (probe_steps < 3 || !(probe_s_lo > 0.0) || !(probe_s_hi > probe_s_lo)) {
                throw Error(Error::Kind::invalid_argument,
                            "need s-steps >= 3 and 0 < s-lo < s-hi");
            }
            cqrel::Rng rng(probe_seed);
            std::vector<cqrel::InputDistribution> pis;
            pis.push_back(cqrel::InputDistribution::uniform(channel.alphabet_size()));
            for (int k = 0; k < 4; ++k) {
                pis.emplace_back(rng.dirichlet(channel.alphabet_size()));
            }
            const double h = (probe_s_hi - probe_s_lo) / (probe_steps - 1);
            double min_dd = std::numeric_limits<double>::infinity();
            double max_dd = -min_dd;
            double max_dd_s = 0.0;
            for (const auto& pi : pis) {
                std::vector<double> mu(static_cast<std::size_t>(probe_steps));
                for (int k = 0; k < probe_steps; ++k) {
                    mu[static_cast<std::size_t>(k)] =
                        cqrel::mu_rc(channel, pi, probe_s_lo + h * k);
                }
                for (int k = 1; k + 1 < probe_steps; ++k) {
                    const double dd = (mu[static_cast<std::size_t>(k + 1)] -
                                       2.0 * mu[static_cast<std::size_t>(k)] +
                                       mu[static_cast<std::size_t>(k - 1)]) /
                                      (h * h);
                    min_dd = std::min(min_dd, dd);
                    if (dd > max_dd) {
                        max_dd = dd;
                        max_dd_s = probe_s_lo + h * k;
                    }
                }
            }
            json out = {{"s_lo", jnum(probe_s_lo)},
                        {"s_hi", jnum(probe_s_hi)},
                        {"s_steps", probe_steps},
                        {"distributions", static_cast<int>(pis.size())},
                        {"min_second_difference", jnum(min_dd)},
                        {"max_second_difference", jnum(max_dd)},
                        {"max_second_difference_at_s", jnum(max_dd_s)},
                        {"concave_within_1e-6", max_dd <= 1e-6},
                        {"note", "exploratory probe; concavity in s is unproven"}};
            write_output(out_path, out.dump(2) + "\n");
        }
    } catch (const Error& e) {
        const int code = exit_code_for(e);
        emit_error(e.what(), code);
        return code;
    } catch (const std::exception& e) {
        emit_error(e.what(), 1);
        return 1;
    }
    return 0;
}
