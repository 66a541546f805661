#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sattn/energy.hpp"
#include "sattn/geometry.hpp"
#include "sattn/meanfield.hpp"
#include "sattn/metastability.hpp"
#include "sattn/renorm.hpp"
#include "sattn/trajectory.hpp"

namespace sattn::io {

/// %.17g: round-trips doubles exactly and keeps CSV bodies byte-stable.
std::string fmt_double(double v);

/// FNV-1a over a string, hex-encoded; used for config hashes.
std::string fnv1a_hex(const std::string& s);

/// Writes via a temporary file plus atomic rename, so refused or aborted runs
/// never leave partial outputs behind.
void atomic_write(const std::filesystem::path& path, const std::string& body);

std::string read_file(const std::filesystem::path& path);

// --- structured documents (JSON) ---

std::string configuration_to_json(const Configuration& c);
Configuration configuration_from_json(const std::string& text);

std::string caps_to_json(const CapFamily& caps);
CapFamily caps_from_json(const std::string& text);

std::string certificate_to_json(const SeparationCertificate& cert);

// --- CSV bodies ---

/// Header: t,energy,energy_normalized,grad_norm,min_pair_dist plus, when a
/// certificate is supplied, eta_q/rho_q/var_q columns per cap.
std::string trajectory_csv(const Trajectory& traj, const SeparationCertificate* cert = nullptr);

/// Rows {t, H, bound, pass}; slow-manifold samples are skipped.
std::string pl_csv(const PlReport& rep);

std::string pl_summary_json(const PlReport& rep);

/// Columns s,energy_normalized,n_active,min_admissible_gap.
std::string staircase_csv(const StaircaseProfile& prof);

std::string merge_events_json(const StaircaseProfile& prof);

/// Columns t then eta_q,V_q,support_ok per cap.
std::string meanfield_csv(const MfTrajectory& traj);

}  // namespace sattn::io
