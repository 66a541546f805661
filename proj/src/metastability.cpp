#include "sattn/metastability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sattn {

namespace {

// Single-linkage clusters under a geodesic distance threshold.
std::vector<std::size_t> single_linkage(const std::vector<Vec>& pts, double threshold) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (unit_angle(pts[i], pts[j]) <= threshold) {
                const std::size_t a = find(i), b = find(j);
                if (a != b) parent[a] = b;
            }
    // Compact labels in order of first appearance.
    std::vector<std::size_t> label(n, SIZE_MAX), out(n);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (label[r] == SIZE_MAX) label[r] = next++;
        out[i] = label[r];
    }
    return out;
}

// Self-attention softmax row of particle i (max-subtracted).
std::vector<double> sa_row(const Configuration& c, double beta, std::size_t i) {
    const std::size_t n = c.size();
    std::vector<double> e(n);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = beta * dot(c.points[i], c.points[j]);
        m = std::max(m, e[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = c.weights[j] * std::exp(e[j] - m);
        z += e[j];
    }
    for (double& v : e) v /= z;
    return e;
}

}  // namespace

SeparationCertificate validate_separated(const Configuration& config, double eps, double beta) {
    config.validate();
    if (!(eps > 0.0 && eps < 1.0 / 16.0))
        throw std::domain_error("validate_separated: eps outside (0, 1/16)");
    if (!(beta > 1.0)) throw std::domain_error("validate_separated: beta > 1 required");

    const std::size_t n = config.size();
    const auto labels = single_linkage(config.points, 2.0 * cap_half_angle(eps));
    const std::size_t k = 1 + *std::max_element(labels.begin(), labels.end());

    // Cap centers: normalized weighted cluster means.
    std::vector<Vec> centers(k, Vec(config.dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) axpy(config.weights[i], config.points[i], centers[labels[i]]);
    for (Vec& w : centers) normalize(w);

    SeparationCertificate cert;
    cert.caps = CapFamily(centers, eps);
    cert.assignment = labels;
    cert.beta = beta;
    cert.eps = eps;

    // Def 1.2 item 1: every particle inside its eps-cap.
    for (std::size_t i = 0; i < n; ++i)
        if (!cap_membership(config.points[i], centers[labels[i]], eps))
            throw std::domain_error("validate_separated: particle " + std::to_string(i) +
                                    " outside its eps-cap");

    // Item 2: alpha from the 2*eps safety caps (throws "caps not separated"
    // when they overlap), then gamma > 0.
    cert.alpha = (k >= 2) ? cap_alpha(cert.caps) : -1.0;
    cert.gamma = 1.0 - cert.alpha - 8.0 * eps -
                 std::log(2.0 * double(n) * double(n) / eps) / beta;
    if (!(cert.gamma > 0.0))
        throw std::domain_error("validate_separated: gamma <= 0 (gamma = " +
                                std::to_string(cert.gamma) + ")");
    return cert;
}

LambdaWindow lambda_window(double beta, double eps, double alpha, std::size_t n) {
    if (!(beta > 1.0) || !(eps > 0.0 && eps < 1.0 / 16.0))
        throw std::domain_error("lambda_window: invalid beta or eps");
    LambdaWindow w;
    w.lo = std::log(1.0 / (8.0 * eps)) / beta;

    const double n2 = double(n) * double(n);
    const double gamma = 1.0 - alpha - 8.0 * eps - std::log(2.0 * n2 / eps) / beta;

    // Branch ensuring T2 > T1, evaluated in the log domain; values far above
    // the propagation branch are capped, they never bind.
    double branch1 = 0.0;
    if (gamma > 0.0) {
        const double log_b1 = std::log((beta - 1.0) * eps / (std::exp(1.0) * n2 * beta * beta)) +
                              (1.0 - alpha) * beta + std::log1p(-std::exp(-gamma * beta));
        branch1 = std::exp(std::min(log_b1, 50.0));
    }

    // Propagation branch: fixed point of F starting from lambda_*.  F is
    // increasing in lambda, so the iteration climbs to the supremum of the
    // admissible set when it exists.
    auto F = [&](double lam) {
        const double q = std::exp(-lam * beta);
        if (!(q < 1.0)) return -std::numeric_limits<double>::infinity();
        return 1.0 - alpha - std::log(2.0 * n2 / (1.0 - q)) / beta - q;
    };
    double lam = w.lo;
    double branch2 = F(lam);
    if (branch2 > lam) {
        for (int it = 0; it < 200; ++it) {
            const double next = F(lam);
            if (std::abs(next - lam) < 1e-14) break;
            lam = next;
        }
        branch2 = lam;
    }
    w.hi = std::min(branch1, branch2);
    return w;
}

std::pair<double, double> theoretical_times(const SeparationCertificate& cert, double lambda) {
    const double beta = cert.beta;
    if (!(beta > 1.0)) throw std::domain_error("theoretical_times: beta > 1 required");
    const double n = double(cert.n());
    const double T1 = 2.0 * n * std::exp(8.0 * cert.eps * beta) +
                      std::exp(1.0) * n * lambda * beta * beta / (beta - 1.0);
    const double T2 = (cert.eps / n) * std::exp((1.0 - cert.alpha) * beta);
    return {T1, T2};
}

std::vector<CapStats> cap_statistics(const Configuration& config, const SeparationCertificate& cert) {
    const std::size_t k = cert.k();
    const double two_eps = 2.0 * cert.eps;
    std::vector<CapStats> stats(k);
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < config.size(); ++i)
        for (std::size_t q = 0; q < k; ++q)
            if (cap_membership(config.points[i], cert.caps.centers[q], two_eps)) {
                members[q].push_back(i);
                break;
            }

    for (std::size_t q = 0; q < k; ++q) {
        stats[q].members = members[q].size();
        if (members[q].empty()) continue;
        double eta = 2.0;
        std::size_t argmin = members[q].front();
        for (std::size_t i : members[q]) {
            const double h = dot(config.points[i], cert.caps.centers[q]);
            if (h < eta) {
                eta = h;
                argmin = i;
            }
        }
        stats[q].eta = eta;

        double rho = 1.0;
        for (std::size_t a = 0; a < members[q].size(); ++a)
            for (std::size_t b = a + 1; b < members[q].size(); ++b)
                rho = std::min(rho, dot(config.points[members[q][a]], config.points[members[q][b]]));
        stats[q].rho = rho;

        const auto a_row = sa_row(config, cert.beta, argmin);
        double var = 0.0;
        for (std::size_t j : members[q])
            var += a_row[j] * dist2(config.points[j], config.points[argmin]) / 2.0;
        stats[q].var = var;
    }
    return stats;
}

namespace {

bool in_union_of_safety_caps(const Configuration& c, const SeparationCertificate& cert) {
    const double two_eps = 2.0 * cert.eps;
    for (const Vec& p : c.points) {
        bool inside = false;
        for (const Vec& w : cert.caps.centers)
            if (cap_membership(p, w, two_eps)) {
                inside = true;
                break;
            }
        if (!inside) return false;
    }
    return true;
}

double max_within_cap_sqdist(const Configuration& c, const SeparationCertificate& cert) {
    const double two_eps = 2.0 * cert.eps;
    double worst = 0.0;
    for (const Vec& w : cert.caps.centers) {
        std::vector<const Vec*> m;
        for (const Vec& p : c.points)
            if (cap_membership(p, w, two_eps)) m.push_back(&p);
        for (std::size_t a = 0; a < m.size(); ++a)
            for (std::size_t b = a + 1; b < m.size(); ++b)
                worst = std::max(worst, dist2(*m[a], *m[b]));
    }
    return worst;
}

}  // namespace

std::optional<double> detect_escape(const Trajectory& traj, const SeparationCertificate& cert) {
    for (const TraceRecord& r : traj.records)
        if (!in_union_of_safety_caps(r.config, cert)) return r.t;
    return std::nullopt;
}

std::optional<double> detect_collapse(const Trajectory& traj, const SeparationCertificate& cert,
                                      double lambda, double beta) {
    const LambdaWindow win = lambda_window(beta, cert.eps, cert.alpha, cert.n());
    if (win.empty() || lambda <= win.lo || lambda >= win.hi)
        throw std::domain_error("detect_collapse: lambda outside the admissible window");
    const double level = 2.0 * std::exp(-lambda * beta);
    // The condition must hold from the reported sample onward, up to escape
    // (or the end of the trace); scan backwards from that boundary.
    std::size_t end = traj.size();
    for (std::size_t i = 0; i < traj.size(); ++i)
        if (!in_union_of_safety_caps(traj.records[i].config, cert)) {
            end = i;
            break;
        }
    std::optional<double> hit;
    for (std::size_t i = end; i-- > 0;) {
        if (max_within_cap_sqdist(traj.records[i].config, cert) <= level)
            hit = traj.records[i].t;
        else
            break;
    }
    return hit;
}

bool propagation_condition(double beta, double delta, double alpha, std::size_t n) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("propagation_condition: delta in (0,1)");
    if (!(alpha > -1.0 && alpha < 1.0)) throw std::invalid_argument("propagation_condition: alpha in (-1,1)");
    const double lhs = delta * (1.0 - delta) * std::exp(-delta * beta) / double(n);
    const double rhs = double(n) * std::exp(-(1.0 - alpha) * beta);
    return lhs > rhs;
}

}  // namespace sattn
