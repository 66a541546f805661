#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sattn/geometry.hpp"

namespace sattn {

/// Merge threshold of the modified dynamics: 1 / sqrt(beta log beta).
/// Requires beta > 1.
double merge_threshold(double beta);

/// Clock rate of the rescaled flow:
///   tau_dot = log(beta) e^{beta (1 - cos D*)},
/// D* the smallest pairwise angular distance strictly exceeding the merge
/// threshold (the closest admissible pair; the integration substitutes this
/// pair's interaction strength, so plateaus pass in O(1) rescaled time).
/// `terminal` is set when no admissible pair remains.
struct TauRate {
    bool terminal = false;
    double log_rate = 0.0;
    double rate = 0.0;  // +inf when the log value is not representable
};

TauRate tau_rate(const AngularConfiguration& theta, double beta);

struct MergeEvent {
    double time = 0.0;                  // rescaled clock
    std::vector<std::size_t> indices;   // original particle ids fused here
    double weight = 0.0;                // resulting weight
    double position = 0.0;              // angle at merge
    bool multi_merge = false;           // greedy fallback beyond the card = 2 case
};

struct StaircaseProfile {
    std::vector<double> s;                   // rescaled time samples
    std::vector<double> energy_normalized;   // weighted normalized energy
    std::vector<std::size_t> n_active;
    std::vector<double> min_admissible_gap;  // 0 when terminal
    std::vector<std::vector<double>> angles; // visited configurations, one row per sample
    std::vector<double> jump_times;
    std::vector<double> plateau_levels;
    std::vector<MergeEvent> merge_events;
};

struct RenormSpec {
    double ds = 0.005;
    double s_max = 400.0;
    std::size_t cadence = 4;        // steps between samples
    double event_tol = 1e-10;       // bisection tolerance on the merge time
};

/// Integrates the rescaled modified dynamics
///   dtheta_i/ds = tau_dot(theta) (1/N^2) sum_j w_j e^{beta (cos(theta_j - theta_i) - 1)}
///                 sin(theta_j - theta_i)
/// directly in the rescaled clock (the exponent pair is combined in the log
/// domain, so tau itself is never formed).  Pairs crossing the merge
/// threshold are replaced by one particle at the weight-weighted circular
/// mean; events are located by bisection between the bracketing steps.  When
/// more than two particles fall inside the threshold simultaneously, pairs
/// are merged greedily by smallest distance and flagged multi_merge.  Runs
/// until one weighted particle remains or s_max.
std::pair<StaircaseProfile, AngularConfiguration> integrate_modified(
    const AngularConfiguration& theta0, double beta, const RenormSpec& spec = {});

/// Limit plateau ladder: phi_inf(n, i) = 1/n + (2/n^2) sum_{k=1}^{i} k,
/// 0 <= i <= n-1 (telescopes to 1 at i = n-1).
double phi_infinity(std::size_t n, std::size_t i);

struct StaircaseLevels {
    std::vector<double> jump_times;
    std::vector<double> plateau_levels;
    std::vector<bool> low_confidence;  // segment had fewer than 3 samples
};

/// Segments the energy curve at merge events; each plateau level is the
/// median of the segment's samples with a boundary fraction excluded.
StaircaseLevels extract_staircase(const StaircaseProfile& profile, double boundary_fraction = 0.1);

}  // namespace sattn
