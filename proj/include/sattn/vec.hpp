#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sattn {

// Dense double vectors are the working currency for points on S^{d-1};
// dimensions stay small enough (d <= 1e4, n <= a few hundred) that plain
// std::vector beats any expression-template machinery here.
using Vec = std::vector<double>;

// Centralized tolerances. Mutable on purpose: callers may tighten or relax
// them for a whole run, the defaults are what the test suites pin.
namespace tol {
inline double unit_norm = 1e-12;         // post-projection unit-norm drift
inline double oracle_agreement = 1e-6;   // closed form vs brute-force oracles
}  // namespace tol

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double dist2(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dist2: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(const Vec& a, const Vec& b) { return std::sqrt(dist2(a, b)); }

/// y += s * x
inline void axpy(double s, const Vec& x, Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

inline void scale(Vec& x, double s) {
    for (double& v : x) v *= s;
}

/// Normalizes x to unit length in place. Throws if the norm is zero or
/// non-finite (renormalizing such a vector would silently corrupt the state).
inline void normalize(Vec& x) {
    const double n = norm(x);
    if (!(n > 1e-300) || !std::isfinite(n))
        throw std::domain_error("normalize: vector norm is zero or non-finite");
    for (double& v : x) v /= n;
}

inline Vec normalized(Vec x) {
    normalize(x);
    return x;
}

inline bool is_unit(const Vec& x, double eps = tol::unit_norm) {
    return std::abs(norm(x) - 1.0) <= eps;
}

inline bool all_finite(const Vec& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

inline double clamp_to_unit_interval(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

/// Angle between two unit vectors, safe against rounding at the ends.
inline double unit_angle(const Vec& a, const Vec& b) {
    return std::acos(clamp_to_unit_interval(dot(a, b)));
}

// --- circle helpers (d = 2 angular work) ---

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Reduce an angle to [0, 2*pi).
inline double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

/// Signed circle difference a - b wrapped to (-pi, pi].
inline double circle_diff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d <= -3.14159265358979323846) d += kTwoPi;
    if (d > 3.14159265358979323846) d -= kTwoPi;
    return d;
}

/// Geodesic distance on the circle.
inline double circle_dist(double a, double b) { return std::abs(circle_diff(a, b)); }

}  // namespace sattn
