#pragma once

#include <optional>
#include <vector>

#include "sattn/dynamics.hpp"
#include "sattn/geometry.hpp"
#include "sattn/metastability.hpp"

namespace sattn {

/// Probability measure as weighted atoms: masses positive, summing to 1.
struct AtomicMeasure {
    std::vector<Vec> atoms;
    std::vector<double> masses;

    std::size_t size() const { return atoms.size(); }
    void validate() const;

    static AtomicMeasure from_configuration(const Configuration& c);
    Configuration to_configuration() const;
};

/// v[mu](x) = sum_j m_j e^{beta <x, x_j>} P_x(x_j) / sum_k m_k e^{beta <x, x_k>},
/// max-subtracted softmax.
Vec meanfield_velocity(const AtomicMeasure& mu, const Vec& x, double beta);

/// Per-cap observables of the transported measure, tracked against the atoms'
/// initial cap assignment (the pushforward of nu_q).
struct MfCapRecord {
    double eta = 1.0;      // min over cap atoms of <x, w_q>
    double var = 0.0;      // (1/2) integral ||x - x_q||^2 dnu_q, base = eta-argmin atom
    bool support_ok = true;  // all cap atoms inside S_q(2 eps)
};

struct MfTraceRecord {
    double t = 0.0;
    AtomicMeasure mu;
    std::vector<MfCapRecord> caps;
};

struct MfTrajectory {
    std::vector<MfTraceRecord> records;
    bool empty() const { return records.empty(); }
};

/// Transports every atom along v[mu(t)] with projection stepping; masses are
/// constant.  Per-cap records follow the certificate's atom assignment.
MfTrajectory integrate_meanfield(const AtomicMeasure& mu0, double beta, const IntegratorSpec& spec,
                                 const SeparationCertificate& cert);

/// Mean-field theorem bounds: T1 < pivot < T2 with
/// pivot = (eps/k) e^{beta (1 - alpha - 8 eps)}.  Reported in the log domain
/// as well, since the pivot overflows quickly in beta.
struct MfBounds {
    double log_pivot = 0.0;
    double pivot = 0.0;  // +inf if not representable
};

MfBounds mf_bounds(const SeparationCertificate& cert_mf);

/// Empirical check of the cap-collapse claim: the first time
///   eta_q V_q e^{-(1 - eta_q) beta} <= 2 e^{-c beta}
/// must occur before (4 eps / k) e^{(c - 8 eps) beta}.  Requires c > 8 eps.
struct EscapeClaimReport {
    struct PerCap {
        std::optional<double> T_star;
        double bound = 0.0;
        bool ok = false;  // T_star observed and below the bound (or bound beyond horizon)
    };
    std::vector<PerCap> caps;
    bool all_ok = true;
};

EscapeClaimReport escape_claim_check(const MfTrajectory& traj, const SeparationCertificate& cert_mf,
                                     double c);

}  // namespace sattn
