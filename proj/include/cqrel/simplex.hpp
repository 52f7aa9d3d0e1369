#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cqrel/channel.hpp"
#include "cqrel/linalg.hpp"

namespace cqrel {

struct OptimizationReport {
    double optimum = 0.0;
    RealVector arg;             ///< optimizing distribution
    double kkt_residual = 0.0;  ///< certificate residual (see each solver)
    int iterations = 0;
    int starts_used = 1;
    bool converged = false;
    double gap = 0.0;                  ///< final conditional-gradient gap
    std::vector<double> start_values;  ///< per-start optima (multi-start runs only)
};

/// Callbacks for a smooth objective on the closed probability simplex.
struct SimplexObjective {
    std::function<double(const RealVector&)> value;
    std::function<RealVector(const RealVector&)> gradient;
    /// Optional exact line search: minimizing gamma in [0, gamma_max] for
    /// value(x + gamma d). When absent the solver root-finds the directional
    /// derivative.
    std::function<double(const RealVector& x, const RealVector& d, double gamma_max)>
        exact_line_search;
};

struct FwOptions {
    double gap_tol = 1e-8;
    int max_iterations = 10000;
    std::optional<RealVector> start;  ///< default: uniform
};

/// Conditional-gradient minimization with away steps; away steps may drop a
/// coordinate to exactly zero, which keeps the support clean enough for the
/// optimality certificates. gap = x.g - min_j g_j bounds the suboptimality
/// for convex objectives.
OptimizationReport minimize_convex_over_simplex(const SimplexObjective& obj, int dim,
                                                const FwOptions& opts = {});

/// Concave maximization through the same engine; report.optimum is the
/// maximum and gap = max_j g_j - x.g.
OptimizationReport maximize_concave_over_simplex(const SimplexObjective& obj, int dim,
                                                 const FwOptions& opts = {});

/// min over pi of Tr(sum_i pi_i S_i^{1/(1+s)})^{1+s}. The report's optimum is
/// the minimal trace value; kkt_residual combines the worst gradient
/// shortfall max_j max(0, Tr A^{1+s} - Tr S_j^p A^s) with the on-support
/// equality deviation.
OptimizationReport minimize_G(const CqChannel& ch, double s, const FwOptions& opts = {});

/// min over pi of pi^T F pi for symmetric F. With convex_hint the matrix is
/// trusted to be PSD and a single conditional-gradient run is used;
/// otherwise multi-start projected gradient (vertices, uniform, Dirichlet(1)
/// draws) with a conditional-gradient polish per start.
OptimizationReport minimize_quadratic_form(const RealMatrix& F, bool convex_hint,
                                           int starts = 0, std::uint64_t seed = 0x51D5EED5ULL);

/// Euclidean projection onto the probability simplex.
RealVector project_to_simplex(const RealVector& v);

}  // namespace cqrel
