#include "cqrel/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cqrel/rng.hpp"

namespace cqrel {

namespace {

void clean_simplex_point(RealVector& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] < 0.0) x[i] = 0.0;
    }
    const double sum = x.sum();
    if (sum > 0.0) x /= sum;
}

/// Root of the directional derivative phi'(gamma) = grad(x + gamma d).d on
/// [0, gamma_max], assuming phi'(0) < 0. Secant with bisection safeguard.
double line_search_by_derivative(const SimplexObjective& obj, const RealVector& x,
                                 const RealVector& d, double gamma_max) {
    auto deriv = [&](double g) { return obj.gradient(x + g * d).dot(d); };
    double lo = 0.0;
    double d_lo = deriv(0.0);
    if (d_lo >= 0.0) return 0.0;
    double hi = gamma_max;
    double d_hi = deriv(hi);
    if (d_hi <= 0.0) return gamma_max;

    // Illinois-style regula falsi
    double side = 0.0;
    for (int it = 0; it < 64 && hi - lo > 1e-15 * std::max(1.0, gamma_max); ++it) {
        double mid = (d_hi - d_lo) != 0.0 ? (lo * d_hi - hi * d_lo) / (d_hi - d_lo)
                                          : 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        const double d_mid = deriv(mid);
        if (d_mid < 0.0) {
            lo = mid;
            d_lo = d_mid;
            if (side < 0.0) d_hi *= 0.5;
            side = -1.0;
        } else {
            hi = mid;
            d_hi = d_mid;
            if (side > 0.0) d_lo *= 0.5;
            side = 1.0;
        }
    }
    return 0.5 * (lo + hi);
}

OptimizationReport run_afw(const SimplexObjective& obj, int dim, const FwOptions& opts) {
    OptimizationReport report;
    RealVector x = opts.start ? *opts.start : RealVector::Constant(dim, 1.0 / dim);
    clean_simplex_point(x);

    if (dim == 1) {
        report.arg = RealVector::Constant(1, 1.0);
        report.optimum = obj.value(report.arg);
        report.converged = true;
        return report;
    }

    double gap = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const RealVector g = obj.gradient(x);

        Eigen::Index fw_j = 0;
        g.minCoeff(&fw_j);
        const double xg = x.dot(g);
        gap = xg - g[fw_j];
        if (gap <= opts.gap_tol) break;

        Eigen::Index away_j = -1;
        double away_val = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < dim; ++j) {
            if (x[j] > 0.0 && g[j] > away_val) {
                away_val = g[j];
                away_j = j;
            }
        }
        const double away_gap = away_val - xg;

        RealVector d;
        double gamma_max;
        bool is_away = false;
        if (away_j >= 0 && away_gap > gap && x[away_j] < 1.0) {
            is_away = true;
            d = x;
            d[away_j] -= 1.0;  // d = x - e_away
            gamma_max = x[away_j] / (1.0 - x[away_j]);
        } else {
            d = -x;
            d[fw_j] += 1.0;  // d = e_fw - x
            gamma_max = 1.0;
        }

        double gamma;
        if (obj.exact_line_search) {
            gamma = obj.exact_line_search(x, d, gamma_max);
        } else {
            gamma = line_search_by_derivative(obj, x, d, gamma_max);
        }
        if (!(gamma > 0.0)) {
            // direction is a descent direction, so a vanishing step means we
            // are at line-search resolution; stop with the current gap
            break;
        }

        x += gamma * d;
        if (is_away && gamma >= gamma_max * (1.0 - 1e-12)) {
            x[away_j] = 0.0;  // drop step
        }
        clean_simplex_point(x);
    }

    report.arg = x;
    report.optimum = obj.value(x);
    report.iterations = it;
    report.gap = gap;
    report.kkt_residual = gap;
    report.converged = gap <= opts.gap_tol;
    return report;
}

}  // namespace

RealVector project_to_simplex(const RealVector& v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0;
    double theta = 0.0;
    int rho = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        cum += u[static_cast<std::size_t>(i)];
        const double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0.0) {
            rho = static_cast<int>(i + 1);
            theta = t;
        }
    }
    (void)rho;
    RealVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = std::max(0.0, v[i] - theta);
    return out;
}

OptimizationReport minimize_convex_over_simplex(const SimplexObjective& obj, int dim,
                                                const FwOptions& opts) {
    return run_afw(obj, dim, opts);
}

OptimizationReport maximize_concave_over_simplex(const SimplexObjective& obj, int dim,
                                                 const FwOptions& opts) {
    SimplexObjective neg;
    neg.value = [&obj](const RealVector& x) {
        const double v = obj.value(x);
        if (!std::isfinite(v)) {
            throw Error(Error::Kind::numeric, "objective returned a non-finite value");
        }
        return -v;
    };
    neg.gradient = [&obj](const RealVector& x) { return RealVector(-obj.gradient(x)); };
    if (obj.exact_line_search) neg.exact_line_search = obj.exact_line_search;
    OptimizationReport report = run_afw(neg, dim, opts);
    report.optimum = -report.optimum;
    return report;
}

OptimizationReport minimize_G(const CqChannel& ch, double s, const FwOptions& opts) {
    if (!(s > 0.0)) {
        throw Error(Error::Kind::invalid_argument, "minimize_G requires s > 0");
    }
    const int a = ch.alphabet_size();
    const double p = 1.0 / (1.0 + s);

    std::vector<Matrix> powered(static_cast<std::size_t>(a));
    for (int i = 0; i < a; ++i) powered[static_cast<std::size_t>(i)] = ch.state(i).power(p);

    auto mix = [&](const RealVector& pi) {
        Matrix A = Matrix::Zero(ch.dim(), ch.dim());
        for (int i = 0; i < a; ++i) A += pi[i] * powered[static_cast<std::size_t>(i)];
        return A;
    };
    auto trace_power = [&](const Matrix& A) {
        const SpectralDecomposition sd = spectral_decompose_symmetrized(A);
        double total = 0.0;
        for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
            const double lambda = std::max(0.0, sd.eigenvalues[i]);
            if (lambda > 0.0) total += std::pow(lambda, 1.0 + s);
        }
        return total;
    };

    SimplexObjective obj;
    obj.value = [=](const RealVector& pi) { return trace_power(mix(pi)); };
    obj.gradient = [=](const RealVector& pi) {
        const Matrix As = matrix_power(mix(pi), s);
        RealVector g(pi.size());
        for (int j = 0; j < a; ++j) {
            g[j] = (1.0 + s) * std::real((powered[static_cast<std::size_t>(j)] * As).trace());
        }
        return g;
    };

    FwOptions fw = opts;
    if (fw.gap_tol <= 0.0) fw.gap_tol = config().fw_gap_tol;
    OptimizationReport report = run_afw(obj, a, fw);

    // support polish: force out stray atoms whose gradient sits strictly
    // above the optimal level, then re-run; keeps the equality part of the
    // certificate tight
    for (int round = 0; round < 4; ++round) {
        const Matrix As = matrix_power(mix(report.arg), s);
        const double level = trace_power(mix(report.arg));
        bool dropped = false;
        RealVector x = report.arg;
        for (int j = 0; j < a; ++j) {
            const double gj = std::real((powered[static_cast<std::size_t>(j)] * As).trace());
            if (x[j] > 0.0 && x[j] < 1e-6 && gj - level > 0.5 * config().fw_gap_tol) {
                x[j] = 0.0;
                dropped = true;
            }
        }
        if (!dropped) break;
        clean_simplex_point(x);
        FwOptions polish = fw;
        polish.start = x;
        report = run_afw(obj, a, polish);
    }

    // Certificate residual: gradient shortfall below the common level plus
    // on-support deviation from it.
    const Matrix As = matrix_power(mix(report.arg), s);
    const double level = report.optimum;
    double shortfall = 0.0;
    double deviation = 0.0;
    for (int j = 0; j < a; ++j) {
        const double gj = std::real((powered[static_cast<std::size_t>(j)] * As).trace());
        shortfall = std::max(shortfall, level - gj);
        if (report.arg[j] > 1e-9) deviation = std::max(deviation, std::abs(gj - level));
    }
    report.kkt_residual = std::max(0.0, shortfall) + deviation;
    return report;
}

OptimizationReport minimize_quadratic_form(const RealMatrix& F, bool convex_hint, int starts,
                                           std::uint64_t seed) {
    const Eigen::Index n = F.rows();
    if (F.cols() != n) {
        throw Error(Error::Kind::invalid_argument, "quadratic form matrix must be square");
    }
    if ((F - F.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, F.cwiseAbs().maxCoeff())) {
        throw Error(Error::Kind::invalid_argument, "quadratic form matrix must be symmetric");
    }
    const RealMatrix Fs = 0.5 * (F + F.transpose());

    SimplexObjective obj;
    obj.value = [&Fs](const RealVector& x) { return x.dot(Fs * x); };
    obj.gradient = [&Fs](const RealVector& x) { return RealVector(2.0 * Fs * x); };
    obj.exact_line_search = [&Fs](const RealVector& x, const RealVector& d, double gmax) {
        const double curv = d.dot(Fs * d);
        const double slope = 2.0 * x.dot(Fs * d);
        if (curv <= 0.0) return slope < 0.0 ? gmax : 0.0;
        return std::clamp(-slope / (2.0 * curv), 0.0, gmax);
    };

    FwOptions fw;
    fw.gap_tol = config().fw_gap_tol_quadratic;

    if (convex_hint || n == 1) {
        return run_afw(obj, static_cast<int>(n), fw);
    }

    // possibly indefinite: multi-start projected gradient, then a
    // conditional-gradient polish for the stationarity certificate
    if (starts <= 0) starts = config().qp_starts;
    Rng rng(seed);
    std::vector<RealVector> start_points;
    for (Eigen::Index j = 0; j < n && static_cast<int>(start_points.size()) < starts; ++j) {
        RealVector v = RealVector::Zero(n);
        v[j] = 1.0;
        start_points.push_back(std::move(v));
    }
    if (static_cast<int>(start_points.size()) < starts) {
        start_points.push_back(RealVector::Constant(n, 1.0 / static_cast<double>(n)));
    }
    while (static_cast<int>(start_points.size()) < starts) {
        start_points.push_back(rng.dirichlet(static_cast<int>(n)));
    }

    OptimizationReport best;
    best.optimum = std::numeric_limits<double>::infinity();
    int total_iterations = 0;
    std::vector<double> start_values;
    start_values.reserve(start_points.size());
    for (std::size_t k = 0; k < start_points.size(); ++k) {
        RealVector x = start_points[k];
        double step = 1.0;
        double fx = obj.value(x);
        for (int it = 0; it < 2000; ++it) {
            const RealVector g = obj.gradient(x);
            RealVector x_new = project_to_simplex(x - step * g);
            double f_new = obj.value(x_new);
            int backtracks = 0;
            while (f_new > fx - 1e-12 && backtracks < 40) {
                step *= 0.5;
                x_new = project_to_simplex(x - step * g);
                f_new = obj.value(x_new);
                ++backtracks;
            }
            total_iterations++;
            if ((x - x_new).lpNorm<Eigen::Infinity>() < 1e-14) break;
            x = x_new;
            fx = f_new;
            if (backtracks == 0) step *= 1.5;
        }
        FwOptions polish = fw;
        polish.start = x;
        polish.max_iterations = 2000;
        OptimizationReport local = run_afw(obj, static_cast<int>(n), polish);
        total_iterations += local.iterations;
        start_values.push_back(local.optimum);
        if (local.optimum < best.optimum) {
            best = local;
        }
    }
    best.starts_used = static_cast<int>(start_points.size());
    best.iterations = total_iterations;
    best.start_values = std::move(start_values);
    return best;
}

}  // namespace cqrel
