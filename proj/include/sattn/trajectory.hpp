#pragma once

#include <vector>

#include "sattn/geometry.hpp"

namespace sattn {

/// One observation along an integrated flow. Snapshots are kept (desk-scale
/// runs are small); derived observables ride along so CSV export and the
/// detectors do not have to recompute them.
struct TraceRecord {
    double t = 0.0;
    Configuration config;
    double energy_raw = 0.0;
    double energy_normalized = 0.0;
    double grad_norm = 0.0;
    double min_pair_dist = 0.0;
};

/// Time-ordered trace; record times are strictly increasing.
struct Trajectory {
    std::vector<TraceRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

struct AngularTraceRecord {
    double t = 0.0;
    std::vector<double> angles;
};

/// d = 2 trace in angle coordinates; particle weights are constant along the
/// flow and stored once.
struct AngularTrajectory {
    std::vector<double> weights;
    std::vector<AngularTraceRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

}  // namespace sattn
