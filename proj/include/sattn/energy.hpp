#pragma once

#include <optional>
#include <vector>

#include "sattn/geometry.hpp"
#include "sattn/trajectory.hpp"

namespace sattn {

/// Both conventions of the interaction energy are always computed:
///
///   raw        = (1 / (2 beta e^beta N^2)) sum_ij m_i m_j e^{beta <x_i, x_j>}
///   normalized = (1 / N^2)                 sum_ij m_i m_j e^{beta (<x_i, x_j> - 1)}
///
/// with N the total weight, so raw = normalized / (2 beta) and the normalized
/// value peaks at 1 on a cluster.
struct EnergyValue {
    double raw = 0.0;
    double normalized = 0.0;
};

using Matrix = std::vector<std::vector<double>>;

EnergyValue energy(const Configuration& config, double beta);
EnergyValue energy_angular(const AngularConfiguration& theta, double beta);

/// g(x) = (cos x - beta sin^2 x) e^{beta (cos x - 1)}; the kernel of the
/// angular Hessian.
double hessian_kernel(double x, double beta);

/// Angular gradient, component i:
///   -(1/N^2) sum_m m_m sin(theta_i - theta_m) e^{beta (cos(theta_i - theta_m) - 1)}.
/// Identical to the angular USA velocity; for unit weights it is the
/// Euclidean gradient of the raw energy.
Vec grad_angular(const AngularConfiguration& theta, double beta);

/// Angular Hessian of the raw energy:
///   (i, j) = (m_i m_j / N^2) g(theta_i - theta_j)   for i != j,
///   (i, i) = - sum of the off-diagonal row.
/// Laplacian structure: every row sums to zero.
Matrix hessian_angular(const AngularConfiguration& theta, double beta);

struct QuadraticFormValue {
    double direct = 0.0;    // v^T H v
    double pairwise = 0.0;  // -(1/2) sum_ij H_ij (v_i - v_j)^2
};

/// Evaluates the quadratic form two ways; agreement within 1e-10 is a
/// standing invariant.
QuadraticFormValue hessian_quadratic_form(const AngularConfiguration& theta, double beta,
                                          const Vec& v);

/// Row-softmax attention weights a_ij on the circle (max-subtracted, with
/// particle weights in numerator and denominator).
Matrix sa_attention_angular(const AngularConfiguration& theta, double beta);

/// Hessian of the energy in the self-attention metric, as displayed entries:
///   (i, j) = -b_ij for i != j, (i, i) = sum_{k != i} b_ik, with
///   b_ij = a_ij [cos d_ij - beta sin^2 d_ij + beta sin d_ij sum_k a_ik sin d_ik],
/// d_ij = theta_i - theta_j.  Rows sum to zero; the matrix is not symmetric
/// in general (a is row-normalized).  The Jacobian of the SA angular velocity
/// field is the negation of this matrix.
Matrix sa_metric_hessian(const AngularConfiguration& theta, double beta);

/// Cap family in angle coordinates (d = 2).
struct AngularCaps {
    std::vector<double> centers;
    double eps = 0.0;
};

struct PlSample {
    double t = 0.0;
    bool in_slow_manifold = false;  // when true the PL check is skipped
    double grad_norm2 = 0.0;
    double H = 0.0;             // <Hess grad, grad>
    double bound_strong = 0.0;  // -(kappa_strong / 2n) ||grad||^2
    double bound_weak = 0.0;    // -(kappa_weak   / 2n) ||grad||^2
    bool h_negative = false;
    bool bound_ok = false;  // H <= bound_weak (the weaker constant is the tested one)
    bool claim_ok = false;  // per-cap (e/2) gradient domination
};

struct PlReport {
    double lambda = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    double kappa_strong = 0.0;  // (1/n)(delta e^{+1/2}/2 - 4(1+beta) e^{-(1-alpha) beta})
    double kappa_weak = 0.0;    // same with e^{-1/2}; the internally consistent weaker one
    std::vector<PlSample> samples;
    std::size_t checks_total = 0;
    std::size_t checks_passed = 0;
    std::optional<double> first_failure_t;
};

/// PL instrumentation along an angular trajectory.  Samples inside the slow
/// manifold N_beta (every cap's angular spread <= e^{-lambda beta / 2}) are
/// marked and skipped.  delta defaults to the midpoint of its admissible
/// interval (8 (1+beta) e^{-(1-alpha) beta} e^{-1/2}, 1).  Throws
/// std::domain_error if lambda lies outside the admissible window.
PlReport pl_diagnostic(const AngularTrajectory& traj, double beta, const AngularCaps& caps,
                       double lambda, std::optional<double> delta = std::nullopt);

struct AccelSample {
    double t = 0.0;
    bool hypothesis_met = false;  // nearest neighbor with opposite-sign gradient, for every i
    double L = 0.0;               // max_i d2E/dtheta_i dtheta_{j_i}
    double grad_norm2 = 0.0;
    double lower_bound = 0.0;  // exp(-(1/2) int_0^t L) ||grad(0)||^2
    bool ok = false;
};

struct AccelReport {
    std::vector<AccelSample> samples;
    double integral_L = 0.0;  // trapezoid over the full window
    bool hypothesis_met_everywhere = false;
    bool all_ok = false;
};

/// Reverse-PL / acceleration check: verifies
///   ||grad E(t)||^2 >= exp(-(1/2) int_0^t L(s) ds) ||grad E(0)||^2
/// with L(t) the largest mixed second derivative over nearest
/// opposite-sign-gradient neighbor pairs.  Samples where no admissible
/// neighbor pair exists (or the separation hypothesis fails) are marked
/// "hypothesis not met", never counted as failures.
AccelReport acceleration_diagnostic(const AngularTrajectory& traj, double beta, double separation);

/// Displacement bound between two sampled times s < t:
///   ||u(t) - u(s)|| <= sqrt(E(v(s)) - E(u(s))) + delta (t - s + 1),
/// where v(s) collapses every cap of u(s) to its weighted circular mean (the
/// nearest slow-manifold point) and the energy gap is taken for the ascent
/// flow (collapsed configurations carry more energy).  Distances are
/// Euclidean in angle coordinates with per-coordinate wrap.
bool slow_motion_check(const AngularTrajectory& traj, const AngularCaps& caps, double beta,
                       double delta, double s, double t);

}  // namespace sattn
