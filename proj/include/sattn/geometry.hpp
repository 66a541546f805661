#pragma once

#include <vector>

#include "sattn/vec.hpp"

namespace sattn {

/// n particles on S^{d-1} with positive multiplicities (default 1).
struct Configuration {
    std::size_t dim = 0;
    std::vector<Vec> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }

    /// Enforces the type invariants: n >= 1, positive weights, unit points.
    void validate() const;

    static Configuration from_points(std::vector<Vec> pts);
};

/// d = 2 configurations written as angles on the torus, reduced mod 2*pi.
struct AngularConfiguration {
    std::vector<double> angles;
    std::vector<double> weights;

    std::size_t size() const { return angles.size(); }
    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }

    static AngularConfiguration from_angles(std::vector<double> a);
};

/// k cap centers w_q on S^{d-1} plus the common height eps.
/// S_q(eps) = { x : <x, w_q> >= 1 - eps }.  Construction enforces
/// eps in (0, 1/16).
struct CapFamily {
    std::vector<Vec> centers;
    double eps = 0.0;

    CapFamily() = default;
    CapFamily(std::vector<Vec> c, double e);

    std::size_t k() const { return centers.size(); }
};

/// Tangential projection P_x(y) = y - <x,y> x.  Result is orthogonal to x.
Vec project_tangent(const Vec& x, const Vec& y);

/// true iff <x, w> >= 1 - eps, i.e. x lies in the cap of height eps at w.
bool cap_membership(const Vec& x, const Vec& w, double eps);

/// Half-angle of a cap of height e: arccos(1 - e).
inline double cap_half_angle(double e) { return std::acos(clamp_to_unit_interval(1.0 - e)); }

/// Worst-case inner product between points of distinct 2*eps caps:
///
///   alpha = max over pairs (i != j) of max { <x,y> : x in S_i(2 eps), y in S_j(2 eps) }.
///
/// For two disjoint caps whose centers subtend the angle theta, the maximum
/// is attained by the nearest boundary points, which lie in the plane of the
/// two centers, so alpha_ij = cos(theta_ij - 2*phi) with phi = arccos(1-2eps).
/// Requires k >= 2 and pairwise disjoint 2*eps caps (theta_ij > 2*phi);
/// otherwise throws std::domain_error("caps not separated").
double cap_alpha(const CapFamily& caps);

/// d = 2 only: angles via atan2, reduced to [0, 2*pi).
AngularConfiguration to_angles(const Configuration& config);

/// Inverse of to_angles (round trip within 1e-12).
Configuration from_angles(const AngularConfiguration& theta);

}  // namespace sattn
