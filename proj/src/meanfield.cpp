#include "sattn/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sattn {

void AtomicMeasure::validate() const {
    if (atoms.empty()) throw std::invalid_argument("AtomicMeasure: at least one atom");
    if (masses.size() != atoms.size())
        throw std::invalid_argument("AtomicMeasure: masses/atoms size mismatch");
    double total = 0.0;
    for (double m : masses) {
        if (!(m > 0.0)) throw std::invalid_argument("AtomicMeasure: masses must be positive");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("AtomicMeasure: total mass must be 1 within 1e-12");
    for (const Vec& a : atoms)
        if (!is_unit(a)) throw std::invalid_argument("AtomicMeasure: atom not unit norm");
}

AtomicMeasure AtomicMeasure::from_configuration(const Configuration& c) {
    AtomicMeasure mu;
    mu.atoms = c.points;
    mu.masses = c.weights;
    double total = 0.0;
    for (double m : mu.masses) total += m;
    for (double& m : mu.masses) m /= total;
    mu.validate();
    return mu;
}

Configuration AtomicMeasure::to_configuration() const {
    Configuration c;
    c.dim = atoms.front().size();
    c.points = atoms;
    c.weights = masses;
    return c;
}

Vec meanfield_velocity(const AtomicMeasure& mu, const Vec& x, double beta) {
    const std::size_t n = mu.size();
    std::vector<double> e(n);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = beta * dot(x, mu.atoms[j]);
        m = std::max(m, e[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = mu.masses[j] * std::exp(e[j] - m);
        z += e[j];
    }
    Vec avg(x.size(), 0.0);
    for (std::size_t j = 0; j < n; ++j) axpy(e[j] / z, mu.atoms[j], avg);
    return project_tangent(x, avg);
}

namespace {

std::vector<MfCapRecord> cap_records(const AtomicMeasure& mu, const SeparationCertificate& cert) {
    const std::size_t k = cert.k();
    std::vector<MfCapRecord> recs(k);
    const double two_eps = 2.0 * cert.eps;
    for (std::size_t q = 0; q < k; ++q) {
        double eta = 2.0;
        std::size_t base = SIZE_MAX;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            if (cert.assignment[j] != q) continue;
            const double h = dot(mu.atoms[j], cert.caps.centers[q]);
            if (h < eta) {
                eta = h;
                base = j;
            }
            if (!cap_membership(mu.atoms[j], cert.caps.centers[q], two_eps))
                recs[q].support_ok = false;
        }
        if (base == SIZE_MAX) continue;  // empty cap
        recs[q].eta = eta;
        double var = 0.0;
        for (std::size_t j = 0; j < mu.size(); ++j)
            if (cert.assignment[j] == q) var += mu.masses[j] * dist2(mu.atoms[j], mu.atoms[base]);
        recs[q].var = 0.5 * var;
    }
    return recs;
}

}  // namespace

MfTrajectory integrate_meanfield(const AtomicMeasure& mu0, double beta, const IntegratorSpec& spec,
                                 const SeparationCertificate& cert) {
    mu0.validate();
    spec.validate();
    if (cert.assignment.size() != mu0.size())
        throw std::invalid_argument("integrate_meanfield: certificate does not match the measure");

    AtomicMeasure mu = mu0;
    MfTrajectory traj;
    auto record = [&](double t) { traj.records.push_back({t, mu, cap_records(mu, cert)}); };

    record(0.0);
    const auto steps = static_cast<std::size_t>(std::floor(spec.t_max / spec.dt + 1e-12));
    std::vector<Vec> vel(mu.size());
    for (std::size_t s = 1; s <= steps; ++s) {
        // Velocities from the frozen measure, then transport (projection step
        // plus renormalization); masses never change.
        for (std::size_t j = 0; j < mu.size(); ++j)
            vel[j] = meanfield_velocity(mu, mu.atoms[j], beta);
        for (std::size_t j = 0; j < mu.size(); ++j) {
            axpy(spec.dt, vel[j], mu.atoms[j]);
            normalize(mu.atoms[j]);
            if (!all_finite(mu.atoms[j]))
                throw numeric_error("integrate_meanfield: non-finite state", s);
        }
        if (s % spec.cadence == 0 || s == steps) record(double(s) * spec.dt);
    }
    return traj;
}

MfBounds mf_bounds(const SeparationCertificate& cert_mf) {
    if (!(cert_mf.gamma > 8.0 * cert_mf.eps))
        throw std::domain_error("mf_bounds: invalid measure certificate (gamma <= 8 eps)");
    MfBounds b;
    b.log_pivot = std::log(cert_mf.eps / double(cert_mf.k())) +
                  cert_mf.beta * (1.0 - cert_mf.alpha - 8.0 * cert_mf.eps);
    b.pivot = b.log_pivot < 709.0 ? std::exp(b.log_pivot) : std::numeric_limits<double>::infinity();
    return b;
}

EscapeClaimReport escape_claim_check(const MfTrajectory& traj, const SeparationCertificate& cert_mf,
                                     double c) {
    if (!(c > 8.0 * cert_mf.eps))
        throw std::invalid_argument("escape_claim_check: c > 8 eps required");
    const double beta = cert_mf.beta;
    const double level = 2.0 * std::exp(-c * beta);
    const double log_bound = std::log(4.0 * cert_mf.eps / double(cert_mf.k())) +
                             (c - 8.0 * cert_mf.eps) * beta;
    const double bound =
        log_bound < 709.0 ? std::exp(log_bound) : std::numeric_limits<double>::infinity();

    EscapeClaimReport rep;
    rep.caps.resize(cert_mf.k());
    for (std::size_t q = 0; q < cert_mf.k(); ++q) {
        rep.caps[q].bound = bound;
        for (const MfTraceRecord& r : traj.records) {
            const MfCapRecord& cr = r.caps[q];
            if (cr.eta * cr.var * std::exp(-(1.0 - cr.eta) * beta) <= level) {
                rep.caps[q].T_star = r.t;
                break;
            }
        }
        rep.caps[q].ok = rep.caps[q].T_star.has_value() && *rep.caps[q].T_star < bound;
        if (!rep.caps[q].ok) rep.all_ok = false;
    }
    return rep;
}

}  // namespace sattn
