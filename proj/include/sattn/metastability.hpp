#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sattn/geometry.hpp"
#include "sattn/trajectory.hpp"

namespace sattn {

/// Witness that a configuration is (beta, eps)-separated: the discovered cap
/// family, the particle -> cap assignment, and the derived constants
///
///   alpha = worst inter-cap inner product over the 2*eps safety caps,
///   gamma = 1 - alpha - 8 eps - log(2 n^2 / eps) / beta  ( > 0 ).
///
/// Convention: a single cap has no inter-cap pair, so alpha = -1 there.
struct SeparationCertificate {
    CapFamily caps;
    std::vector<std::size_t> assignment;  // particle index -> cap index
    double alpha = -1.0;
    double gamma = 0.0;
    double beta = 0.0;
    double eps = 0.0;

    std::size_t k() const { return caps.k(); }
    std::size_t n() const { return assignment.size(); }
};

struct LambdaWindow {
    double lo = 0.0;  // lambda_* = log(1/(8 eps)) / beta
    double hi = 0.0;
    bool empty() const { return !(hi > lo); }
    double mid() const { return 0.5 * (lo + hi); }
};

/// Per-cap proof quantities at one configuration:
///   eta = min_{i in cap} <x_i, w_q>
///   rho = min pairwise <x_i, x_j> within the cap
///   var = sum_j a_{i*j} ||x_j - x_{i*}||^2 / 2 over cap members, i* the eta-argmin,
///         a the self-attention softmax row of i*.
/// Empty caps report no values.
struct CapStats {
    std::optional<double> eta;
    std::optional<double> rho;
    std::optional<double> var;
    std::size_t members = 0;
};

struct MetastabilityReport {
    LambdaWindow lambda_window;
    double lambda = 0.0;
    double T1_bound = 0.0;
    double T2_bound = 0.0;
    double stick_level = 0.0;  // 2 e^{-lambda beta}
    std::optional<double> T_escape_empirical;
    std::optional<double> T_collapse_empirical;
    double horizon = 0.0;
    bool containment_ok = true;  // no escape seen before min(horizon, T2_bound)
    bool collapse_ok = true;     // collapse seen and <= T1_bound
    bool stick_ok = true;        // stick level holds on [T_collapse, T_escape or horizon]
    bool pass = true;
};

/// Discovers caps by single-linkage clustering (geodesic threshold
/// 2 arccos(1-eps)), takes each center as the normalized cluster mean, and
/// re-verifies Definition-style separation exactly: every particle inside its
/// eps-cap, pairwise disjoint 2 eps caps, gamma > 0.  Throws std::domain_error
/// naming the violated condition otherwise.
SeparationCertificate validate_separated(const Configuration& config, double eps, double beta);

/// Admissible lambda interval (lambda_*, lambda_hi):
///   lambda_* = log(1/(8 eps)) / beta;
///   lambda_hi = min of the T2 > T1 branch
///       (beta-1) eps / (e n^2 beta^2) * e^{(1-alpha) beta} * (1 - e^{-gamma beta})
///   and the propagation branch, the self-consistent solution of
///       lambda = 1 - alpha - log(2 n^2 / (1 - e^{-lambda beta})) / beta - e^{-lambda beta}
///   reached by fixed-point iteration from lambda_*.
/// An empty window (hi <= lo) is a valid outcome, not an error.
LambdaWindow lambda_window(double beta, double eps, double alpha, std::size_t n);

/// Theorem bounds: T1 <= 2 n e^{8 eps beta} + e n lambda beta^2/(beta-1),
/// T2 >= (eps/n) e^{(1-alpha) beta}.  Requires beta > 1.
std::pair<double, double> theoretical_times(const SeparationCertificate& cert, double lambda);

/// eta_q, rho_q, Var_q per cap; membership is tested against the 2*eps caps.
std::vector<CapStats> cap_statistics(const Configuration& config, const SeparationCertificate& cert);

/// First sampled time at which any particle leaves the union of 2*eps caps.
std::optional<double> detect_escape(const Trajectory& traj, const SeparationCertificate& cert);

/// First sampled time from which
///   max_q max_{i,j in cap q} ||x_i - x_j||^2 <= 2 e^{-lambda beta}
/// holds and keeps holding until escape or the end of the trace (a dip below
/// the level that is later exceeded does not count).
std::optional<double> detect_collapse(const Trajectory& traj, const SeparationCertificate& cert,
                                      double lambda, double beta);

/// Lemma condition for propagation of smallness:
///   (1/n) delta (1-delta) e^{-delta beta} > n e^{-(1-alpha) beta}.
bool propagation_condition(double beta, double delta, double alpha, std::size_t n);

}  // namespace sattn
