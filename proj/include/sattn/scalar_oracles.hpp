#pragma once

#include <optional>

namespace sattn {

/// Outcome of a hitting-time verification: the measured time, the lemma's
/// bound, and the margin (bound - hitting time, >= 0 on every passing check).
struct ScalarOdeResult {
    std::optional<double> hitting_time;
    double bound = 0.0;
    double margin = 0.0;
};

/// Adaptive-integration controls shared by the scalar oracles.
struct OdeControl {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step_growth = 8.0;  // geometric growth cap near the slow phase
    double horizon_factor = 4.0;   // integrate to at most horizon_factor * bound
};

/// Collapse comparison ODE
///   du/dt = u (1-u) e^{beta (u-1)},  u(0) = u0 in (0, 1],
/// integrated (in log(1-u)) until 1 - u <= e^{-c beta}.  The verified bound is
///   e^{beta (1-u0)} / u0 + beta^2 c e / (beta - 1),  beta > 1.
/// Hitting time is absent (with the bound still reported) if the horizon cap
/// is reached first.
ScalarOdeResult collapse_hitting_time(double u0, double beta, double c,
                                      const OdeControl& ctl = {});

/// Clustering timescale ODE
///   du/dt = -c log(beta) sin(u) + c(beta),  u(0) = u0,
/// with optional worst-case forcing c(beta) = K e^{-kappa beta} log(beta).
struct ClusteringTimes {
    std::optional<double> t_beta;  // first time u <= sqrt(log beta / beta)
    std::optional<double> T_beta;  // first time u <= 1 / sqrt(beta log beta)
    /// Conventional first-order expansion with leading constant 2/c:
    ///   2/c + 2 log(tan(u0/2)) / (c log beta) - log log beta / (c log beta).
    /// Kept for reference; it does not track the flow (see asym_exact).
    double asym_displayed = 0.0;
    /// Expansion obtained by exact integration of the separable ODE
    /// (v = log tan(u/2) falls linearly at rate c log beta):
    ///   1/(2c) + (log(tan(u0/2)) + log 2) / (c log beta) - log log beta / (2 c log beta).
    /// The quantitative suites test against this one.
    double asym_exact = 0.0;
    double gap_bound = 0.0;  // 2 log log beta / (c log beta), bounds T - t
};

ClusteringTimes clustering_timescale(double u0, double beta, double c, double forcing_K = 0.0,
                                     double forcing_kappa = 1.0, const OdeControl& ctl = {});

}  // namespace sattn
