#include "sattn/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sattn {

void Configuration::validate() const {
    if (points.empty()) throw std::invalid_argument("Configuration: n >= 1 required");
    if (weights.size() != points.size())
        throw std::invalid_argument("Configuration: weights/points size mismatch");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim)
            throw std::invalid_argument("Configuration: point " + std::to_string(i) +
                                        " has wrong dimension");
        if (!(weights[i] > 0.0))
            throw std::invalid_argument("Configuration: weight " + std::to_string(i) +
                                        " must be positive");
        if (!is_unit(points[i]))
            throw std::invalid_argument("Configuration: point " + std::to_string(i) +
                                        " is not unit norm");
    }
}

Configuration Configuration::from_points(std::vector<Vec> pts) {
    Configuration c;
    if (pts.empty()) throw std::invalid_argument("Configuration: n >= 1 required");
    c.dim = pts.front().size();
    c.points = std::move(pts);
    c.weights.assign(c.points.size(), 1.0);
    c.validate();
    return c;
}

AngularConfiguration AngularConfiguration::from_angles(std::vector<double> a) {
    AngularConfiguration t;
    for (double& v : a) v = wrap_angle(v);
    t.angles = std::move(a);
    t.weights.assign(t.angles.size(), 1.0);
    return t;
}

CapFamily::CapFamily(std::vector<Vec> c, double e) : centers(std::move(c)), eps(e) {
    if (centers.empty()) throw std::invalid_argument("CapFamily: k >= 1 required");
    if (!(eps > 0.0 && eps < 1.0 / 16.0))
        throw std::invalid_argument("CapFamily: eps must lie in (0, 1/16)");
    for (const Vec& w : centers)
        if (!is_unit(w)) throw std::invalid_argument("CapFamily: center is not unit norm");
}

Vec project_tangent(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("project_tangent: dimension mismatch");
    const double s = dot(x, y);
    Vec r = y;
    axpy(-s, x, r);
    return r;
}

bool cap_membership(const Vec& x, const Vec& w, double eps) {
    if (!(eps > 0.0 && eps < 2.0)) throw std::invalid_argument("cap_membership: eps in (0,2)");
    return dot(x, w) >= 1.0 - eps;
}

double cap_alpha(const CapFamily& caps) {
    if (caps.k() < 2) throw std::invalid_argument("cap_alpha: k >= 2 required");
    const double phi = cap_half_angle(2.0 * caps.eps);
    double alpha = -1.0;
    for (std::size_t i = 0; i < caps.k(); ++i) {
        for (std::size_t j = i + 1; j < caps.k(); ++j) {
            const double theta = unit_angle(caps.centers[i], caps.centers[j]);
            if (!(theta > 2.0 * phi)) throw std::domain_error("caps not separated");
            alpha = std::max(alpha, std::cos(theta - 2.0 * phi));
        }
    }
    return alpha;
}

AngularConfiguration to_angles(const Configuration& config) {
    if (config.dim != 2) throw std::invalid_argument("to_angles: unsupported dimension (d = 2 only)");
    AngularConfiguration t;
    t.angles.reserve(config.size());
    for (const Vec& p : config.points) t.angles.push_back(wrap_angle(std::atan2(p[1], p[0])));
    t.weights = config.weights;
    return t;
}

Configuration from_angles(const AngularConfiguration& theta) {
    Configuration c;
    c.dim = 2;
    c.points.reserve(theta.size());
    for (double a : theta.angles) c.points.push_back(Vec{std::cos(a), std::sin(a)});
    c.weights = theta.weights.empty() ? std::vector<double>(theta.size(), 1.0) : theta.weights;
    c.validate();
    return c;
}

}  // namespace sattn
