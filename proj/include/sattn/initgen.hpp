#pragma once

#include <optional>
#include <vector>

#include "sattn/geometry.hpp"
#include "sattn/metastability.hpp"
#include "sattn/rng.hpp"

namespace sattn {

/// Gaussian mixture on R^d projected to the sphere: component centers w_i
/// (placed at sqrt(r) w_i internally), common sigma, uniform component
/// probabilities 1/r.  delta = sigma / sqrt(r) is the quantity the separation
/// condition speaks about.
struct MixtureSpec {
    std::vector<Vec> centers;  // unit vectors
    double sigma = 0.0;

    std::size_t r() const { return centers.size(); }
    double delta() const { return sigma / std::sqrt(double(r())); }
};

/// n i.i.d. draws from the mixture density, each projected to S^{d-1}.
Configuration sample_gaussian_mixture(const MixtureSpec& spec, std::size_t n, std::size_t d,
                                      const SeedSpec& seed);

/// Mixture hypothesis: 6 delta sqrt(d) / (1 + delta sqrt(d)) + delta sqrt(2 d log n) <= eps.
bool mixture_condition(const MixtureSpec& spec, std::size_t n, std::size_t d, double eps);

/// n i.i.d. uniform points on S^{d-1} (normalized isotropic Gaussians).
Configuration sample_uniform_sphere(std::size_t d, std::size_t n, const SeedSpec& seed);

/// Uniform-points hypothesis (with eps = 4 log d / d):
///   16 log^2 d / d^2 + 40 log d / d + log(n^2 d / (2 log d)) / beta < 1.
/// The d*(n) existence threshold has no formula and is not checked here.
bool uniform_condition(std::size_t d, std::size_t n, double beta);

/// k caps (equispaced on the great circle of the first two coordinates by
/// default, or at the given centers), n particles sampled uniformly within
/// the eps-caps round-robin, certificate re-validated exactly.  Throws with
/// the violated inequality named when the geometry is infeasible.
std::pair<Configuration, SeparationCertificate> gen_separated(
    std::size_t d, std::size_t n, std::size_t k, double eps, double beta, const SeedSpec& seed,
    const std::optional<std::vector<Vec>>& centers = std::nullopt);

/// Geometric ladder theta_j = c0 * 2^j, j = 1..n.
AngularConfiguration gen_well_prepared(std::size_t n, double c0);

/// Exact well-preparedness test: 0 <= theta_1 < ... < theta_n <= pi and for
/// all i in {2..n-1}, k > i:
///   cos(theta_i - theta_1) > cos(theta_k - theta_i) + c log(beta) / beta.
/// Returns false (and reports the first violating pair via `why`) otherwise.
bool validate_well_prepared(const AngularConfiguration& theta, double beta, double c,
                            std::string* why = nullptr);

/// Atomic approximation of a (beta, eps)-separated measure: per cap,
/// `atoms_per_cap` atoms uniform in the eps-cap with weights summing to 1/k.
/// The measure version of gamma uses k in place of n and must exceed 8 eps.
std::pair<Configuration, SeparationCertificate> gen_separated_measure(
    std::size_t d, std::size_t k, double eps, double beta, std::size_t atoms_per_cap,
    const SeedSpec& seed, const std::optional<std::vector<Vec>>& centers = std::nullopt);

/// Uniform sample within the cap of height eps_cap at w, via the exact cap
/// area measure: inverse-CDF in the polar angle, uniform direction in the
/// orthogonal sphere.
Vec sample_in_cap(const Vec& w, double eps_cap, CounterRng& rng);

}  // namespace sattn
