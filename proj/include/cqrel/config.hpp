#pragma once

#include <stdexcept>
#include <string>

namespace cqrel {

/// Numerical tolerances and size limits shared across the library.
///
/// The global instance is meant to be adjusted once at startup (CLI flags,
/// config file) and treated as read-only afterwards; all computations are
/// pure functions of their inputs plus this configuration.
struct Config {
    // construction tolerances
    double eta_herm = 1e-9;   ///< max |A(i,j) - conj(A(j,i))| accepted before symmetrization
    double eta_psd = 1e-9;    ///< most negative eigenvalue accepted (clipped to 0)
    double eta_trace = 1e-9;  ///< max |Tr - 1| accepted before renormalization

    // support threshold: tau = dim * support_rel * lambda_max
    double support_rel = 1e-12;

    // size guards
    int dim_cap = 8192;

    // exponent search parameters
    double s_max_expurgation = 1e4;  ///< ceiling for the s-search in expurgation bounds
    int er_s_grid_points = 512;      ///< s-grid density for the random-coding curve
    int ex_s_grid_points = 96;       ///< s-grid density for the expurgation curve
    double rc_conjecture_c = 2.0;    ///< prefactor used by the unproved s<1 random-coding bound

    // simplex optimizer parameters
    double fw_gap_tol = 1e-8;            ///< conditional-gradient gap tolerance (general objectives)
    double fw_gap_tol_quadratic = 1e-10; ///< gap tolerance for convex quadratic forms
    int fw_max_iterations = 10000;
    int qp_starts = 20;  ///< multi-start count for possibly nonconvex quadratic forms
};

Config& config();

struct Error : std::runtime_error {
    enum class Kind {
        invalid_argument,  ///< caller violated a documented precondition
        construction,      ///< value failed a type invariant (not PSD, bad trace, ...)
        dimension_cap,     ///< requested dimension exceeds config().dim_cap
        io,                ///< file missing or malformed
        numeric,           ///< a numerical routine failed to converge
    };

    Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

}  // namespace cqrel
