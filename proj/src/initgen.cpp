#include "sattn/initgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sattn {

namespace {

Vec gaussian_vec(std::size_t d, CounterRng& rng) {
    Vec v(d);
    for (double& x : v) x = rng.normal();
    return v;
}

// Unit vector orthogonal to w, uniform on the tangent sphere.
Vec tangent_direction(const Vec& w, CounterRng& rng) {
    const std::size_t d = w.size();
    if (d == 2) {
        // S^0: two directions.
        Vec u{-w[1], w[0]};
        if (rng.uniform01() < 0.5) scale(u, -1.0);
        return u;
    }
    for (int attempt = 0; attempt < 64; ++attempt) {
        Vec u = project_tangent(w, gaussian_vec(d, rng));
        const double nu = norm(u);
        if (nu > 1e-12) {
            scale(u, 1.0 / nu);
            return u;
        }
    }
    throw std::runtime_error("tangent_direction: degenerate draws");
}

// Inverse CDF of the polar angle t on [0, phi_max] with density sin^{d-2}(t).
double polar_angle_in_cap(std::size_t d, double phi_max, double u) {
    if (d == 2) return u * phi_max;
    if (d == 3) {
        // Uniform in height: cos t = 1 - u (1 - cos phi_max).
        return std::acos(clamp_to_unit_interval(1.0 - u * (1.0 - std::cos(phi_max))));
    }
    // Numeric inverse CDF; the grid is fine enough for any eps we use.
    constexpr int kGrid = 4096;
    const double h = phi_max / kGrid;
    double cum = 0.0, prev = 0.0;
    std::vector<double> cdf(kGrid + 1, 0.0);
    for (int i = 1; i <= kGrid; ++i) {
        const double t = i * h;
        const double f = std::pow(std::sin(t), double(d) - 2.0);
        cum += 0.5 * (prev + f) * h;
        prev = f;
        cdf[i] = cum;
    }
    const double target = u * cum;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    const auto hi = std::max<std::ptrdiff_t>(1, it - cdf.begin());
    const double c0 = cdf[hi - 1], c1 = cdf[hi];
    const double frac = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.0;
    return (double(hi - 1) + frac) * h;
}

std::vector<Vec> default_circle_centers(std::size_t d, std::size_t k) {
    std::vector<Vec> centers;
    centers.reserve(k);
    for (std::size_t q = 0; q < k; ++q) {
        Vec w(d, 0.0);
        const double a = kTwoPi * double(q) / double(k);
        w[0] = std::cos(a);
        w[1] = std::sin(a);
        centers.push_back(std::move(w));
    }
    return centers;
}

void check_cap_feasibility(const std::vector<Vec>& centers, double eps, double beta, std::size_t n_for_gamma) {
    CapFamily caps(centers, eps);
    double alpha = -1.0;
    if (caps.k() >= 2) {
        try {
            alpha = cap_alpha(caps);
        } catch (const std::domain_error&) {
            throw std::domain_error(
                "gen_separated: infeasible geometry, 2*eps caps overlap "
                "(center separation <= 2 arccos(1 - 2 eps))");
        }
    }
    const double n2 = double(n_for_gamma) * double(n_for_gamma);
    const double gamma = 1.0 - alpha - 8.0 * eps - std::log(2.0 * n2 / eps) / beta;
    if (!(gamma > 0.0))
        throw std::domain_error("gen_separated: infeasible parameters, gamma = 1 - alpha - 8 eps - "
                                "log(2 n^2/eps)/beta <= 0 (gamma = " +
                                std::to_string(gamma) + ")");
}

}  // namespace

Vec sample_in_cap(const Vec& w, double eps_cap, CounterRng& rng) {
    const double phi = cap_half_angle(eps_cap);
    const double t = polar_angle_in_cap(w.size(), phi, rng.uniform01());
    const Vec u = tangent_direction(w, rng);
    Vec x(w.size());
    const double ct = std::cos(t), st = std::sin(t);
    for (std::size_t i = 0; i < w.size(); ++i) x[i] = ct * w[i] + st * u[i];
    normalize(x);
    return x;
}

Configuration sample_gaussian_mixture(const MixtureSpec& spec, std::size_t n, std::size_t d,
                                      const SeedSpec& seed) {
    if (spec.r() == 0) throw std::invalid_argument("sample_gaussian_mixture: r >= 1 required");
    if (!(spec.sigma >= 0.0)) throw std::invalid_argument("sample_gaussian_mixture: sigma >= 0");
    if (d < 2) throw std::invalid_argument("sample_gaussian_mixture: d >= 2 required");
    for (const Vec& w : spec.centers)
        if (w.size() != d || !is_unit(w))
            throw std::invalid_argument("sample_gaussian_mixture: centers must be unit vectors in R^d");
    CounterRng rng = seed.rng();
    const double root_r = std::sqrt(double(spec.r()));
    Configuration c;
    c.dim = d;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t comp = rng.below(spec.r());
        Vec x(d);
        for (std::size_t j = 0; j < d; ++j)
            x[j] = root_r * spec.centers[comp][j] + spec.sigma * rng.normal();
        normalize(x);
        c.points.push_back(std::move(x));
    }
    c.weights.assign(n, 1.0);
    c.validate();
    return c;
}

bool mixture_condition(const MixtureSpec& spec, std::size_t n, std::size_t d, double eps) {
    const double delta = spec.delta();
    const double rd = std::sqrt(double(d));
    if (!(delta * rd < 1.0))
        throw std::domain_error("mixture_condition: delta sqrt(d) < 1 required");
    const double lhs = 6.0 * delta * rd / (1.0 + delta * rd) +
                       delta * std::sqrt(2.0 * double(d) * std::log(double(n)));
    return lhs <= eps;
}

Configuration sample_uniform_sphere(std::size_t d, std::size_t n, const SeedSpec& seed) {
    if (d < 2) throw std::invalid_argument("sample_uniform_sphere: d >= 2 required");
    CounterRng rng = seed.rng();
    Configuration c;
    c.dim = d;
    for (std::size_t i = 0; i < n; ++i) {
        Vec x = gaussian_vec(d, rng);
        normalize(x);
        c.points.push_back(std::move(x));
    }
    c.weights.assign(n, 1.0);
    return c;
}

bool uniform_condition(std::size_t d, std::size_t n, double beta) {
    if (d < 381) throw std::domain_error("uniform_condition: d >= 381 required");
    const double ld = std::log(double(d));
    const double lhs = 16.0 * ld * ld / (double(d) * double(d)) + 40.0 * ld / double(d) +
                       std::log(double(n) * double(n) * double(d) / (2.0 * ld)) / beta;
    return lhs < 1.0;
}

std::pair<Configuration, SeparationCertificate> gen_separated(
    std::size_t d, std::size_t n, std::size_t k, double eps, double beta, const SeedSpec& seed,
    const std::optional<std::vector<Vec>>& centers_opt) {
    if (k == 0 || n == 0) throw std::invalid_argument("gen_separated: n, k >= 1 required");
    if (k > n) throw std::invalid_argument("gen_separated: k <= n required");
    const std::vector<Vec> centers = centers_opt.value_or(default_circle_centers(d, k));
    if (centers.size() != k) throw std::invalid_argument("gen_separated: wrong number of centers");
    check_cap_feasibility(centers, eps, beta, n);

    CounterRng rng = seed.rng();
    Configuration c;
    c.dim = d;
    for (std::size_t i = 0; i < n; ++i) c.points.push_back(sample_in_cap(centers[i % k], eps, rng));
    c.weights.assign(n, 1.0);

    SeparationCertificate cert = validate_separated(c, eps, beta);
    return {std::move(c), std::move(cert)};
}

AngularConfiguration gen_well_prepared(std::size_t n, double c0) {
    if (n < 2) throw std::invalid_argument("gen_well_prepared: n >= 2 required");
    if (!(c0 > 0.0)) throw std::invalid_argument("gen_well_prepared: c0 > 0 required");
    if (!(c0 * std::pow(2.0, double(n)) <= 3.14159265358979323846))
        throw std::invalid_argument("gen_well_prepared: c0 * 2^n must not exceed pi");
    std::vector<double> a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = c0 * std::pow(2.0, double(j + 1));
    return AngularConfiguration::from_angles(std::move(a));
}

bool validate_well_prepared(const AngularConfiguration& theta, double beta, double c,
                            std::string* why) {
    const std::size_t n = theta.size();
    const auto& a = theta.angles;
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (n < 2) return fail("n >= 2 required");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(a[i] < a[i + 1]))
            return fail("ordering violated at index " + std::to_string(i + 1));
    if (!(a[0] >= 0.0 && a[n - 1] <= 3.14159265358979323846))
        return fail("angles must lie in [0, pi]");
    const double margin = c * std::log(beta) / beta;
    for (std::size_t i = 1; i + 1 < n; ++i)       // i in {2..n-1}, 1-based
        for (std::size_t kk = i + 1; kk < n; ++kk)  // k > i
            if (!(std::cos(a[i] - a[0]) > std::cos(a[kk] - a[i]) + margin))
                return fail("gap condition fails at (i, k) = (" + std::to_string(i + 1) + ", " +
                            std::to_string(kk + 1) + ")");
    return true;
}

std::pair<Configuration, SeparationCertificate> gen_separated_measure(
    std::size_t d, std::size_t k, double eps, double beta, std::size_t atoms_per_cap,
    const SeedSpec& seed, const std::optional<std::vector<Vec>>& centers_opt) {
    if (k == 0 || atoms_per_cap == 0)
        throw std::invalid_argument("gen_separated_measure: k, atoms_per_cap >= 1 required");
    const std::vector<Vec> centers = centers_opt.value_or(default_circle_centers(d, k));
    if (centers.size() != k)
        throw std::invalid_argument("gen_separated_measure: wrong number of centers");

    // Measure version: gamma uses k in place of n and must exceed 8 eps.
    CapFamily caps(centers, eps);
    const double alpha = (k >= 2) ? cap_alpha(caps) : -1.0;
    const double gamma =
        1.0 - alpha - 8.0 * eps - std::log(2.0 * double(k) * double(k) / eps) / beta;
    if (!(gamma > 8.0 * eps))
        throw std::domain_error("gen_separated_measure: gamma <= 8 eps (gamma = " +
                                std::to_string(gamma) + ")");

    CounterRng rng = seed.rng();
    Configuration c;
    c.dim = d;
    const double w_atom = 1.0 / (double(k) * double(atoms_per_cap));
    std::vector<std::size_t> assignment;
    for (std::size_t q = 0; q < k; ++q)
        for (std::size_t a = 0; a < atoms_per_cap; ++a) {
            c.points.push_back(sample_in_cap(centers[q], eps, rng));
            c.weights.push_back(w_atom);
            assignment.push_back(q);
        }
    c.validate();

    SeparationCertificate cert;
    cert.caps = std::move(caps);
    cert.assignment = std::move(assignment);
    cert.alpha = alpha;
    cert.gamma = gamma;
    cert.beta = beta;
    cert.eps = eps;
    return {std::move(c), std::move(cert)};
}

}  // namespace sattn
