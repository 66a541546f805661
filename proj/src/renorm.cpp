#include "sattn/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sattn/energy.hpp"

namespace sattn {

double merge_threshold(double beta) {
    if (!(beta > 1.0)) throw std::domain_error("merge_threshold: beta > 1 required");
    return 1.0 / std::sqrt(beta * std::log(beta));
}

TauRate tau_rate(const AngularConfiguration& theta, double beta) {
    const double thr = merge_threshold(beta);
    TauRate r;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < theta.size(); ++i)
        for (std::size_t j = i + 1; j < theta.size(); ++j) {
            const double d = circle_dist(theta.angles[i], theta.angles[j]);
            if (d > thr) dmin = std::min(dmin, d);
        }
    if (!std::isfinite(dmin)) {
        r.terminal = true;
        return r;
    }
    r.log_rate = std::log(std::log(beta)) + beta * (1.0 - std::cos(dmin));
    r.rate = r.log_rate < 709.0 ? std::exp(r.log_rate) : std::numeric_limits<double>::infinity();
    return r;
}

double phi_infinity(std::size_t n, std::size_t i) {
    if (n == 0 || i > n - 1) throw std::domain_error("phi_infinity: require 0 <= i <= n-1");
    const double nn = double(n);
    return 1.0 / nn + double(i) * double(i + 1) / (nn * nn);
}

namespace {

struct State {
    std::vector<double> angles;
    std::vector<double> weights;
    std::vector<std::vector<std::size_t>> origins;  // original ids per active particle
    double total_weight = 0.0;
};

double min_gap(const State& st) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < st.angles.size(); ++i)
        for (std::size_t j = i + 1; j < st.angles.size(); ++j)
            g = std::min(g, circle_dist(st.angles[i], st.angles[j]));
    return g;
}

double min_admissible(const State& st, double thr) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < st.angles.size(); ++i)
        for (std::size_t j = i + 1; j < st.angles.size(); ++j) {
            const double d = circle_dist(st.angles[i], st.angles[j]);
            if (d > thr) g = std::min(g, d);
        }
    return g;
}

// Rescaled velocity: the tau_dot exponent and the pair interactions combine
// in the log domain, so every factor evaluated here stays exp of a bounded
// exponent near the active pair.  The exponent is clamped above: a trial step
// can momentarily push a pair below the threshold, which reassigns the clock
// to a wider pair and would otherwise overflow; the event location rolls such
// steps back, the clamp only keeps the probe arithmetic finite.
std::vector<double> rescaled_velocity(const State& st, double beta, double thr) {
    const std::size_t n = st.angles.size();
    const double dstar = min_admissible(st, thr);
    std::vector<double> v(n, 0.0);
    if (!std::isfinite(dstar)) return v;  // terminal cluster
    const double log_lb = std::log(std::log(beta));
    const double cos_star = std::cos(dstar);
    const double N2 = st.total_weight * st.total_weight;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = st.angles[j] - st.angles[i];
            const double expo = std::min(beta * (std::cos(d) - cos_star), 30.0);
            acc += st.weights[j] * std::exp(expo) * std::sin(d);
        }
        v[i] = std::exp(log_lb) * acc / N2;
    }
    return v;
}

// A step is regular when it stays finite and moves no particle further than
// a small angular budget; threshold crossings inside a step violate this
// long before anything overflows.
bool regular_step(const State& before, const State& after) {
    for (std::size_t i = 0; i < after.angles.size(); ++i) {
        if (!std::isfinite(after.angles[i])) return false;
        if (std::abs(after.angles[i] - before.angles[i]) > 0.05) return false;
    }
    return true;
}

void rk4_step(State& st, double beta, double thr, double h) {
    const std::size_t n = st.angles.size();
    const auto k1 = rescaled_velocity(st, beta, thr);
    State tmp = st;
    auto advance = [&](const std::vector<double>& k, double hh) {
        for (std::size_t i = 0; i < n; ++i) tmp.angles[i] = st.angles[i] + hh * k[i];
    };
    advance(k1, h / 2.0);
    const auto k2 = rescaled_velocity(tmp, beta, thr);
    advance(k2, h / 2.0);
    const auto k3 = rescaled_velocity(tmp, beta, thr);
    advance(k3, h);
    const auto k4 = rescaled_velocity(tmp, beta, thr);
    for (std::size_t i = 0; i < n; ++i)
        st.angles[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double weighted_circular_mean(double a1, double w1, double a2, double w2) {
    const double x = w1 * std::cos(a1) + w2 * std::cos(a2);
    const double y = w1 * std::sin(a1) + w2 * std::sin(a2);
    return wrap_angle(std::atan2(y, x));
}

// Fuses every pair at or below the threshold, closest first; returns the
// recorded events (time filled by the caller).  With more than two particles
// inside the threshold at once, all resulting events carry the multi_merge
// flag (greedy fallback beyond the card = 2 hypothesis).
std::vector<MergeEvent> merge_all_within(State& st, double thr) {
    std::vector<bool> involved(st.angles.size(), false);
    for (std::size_t i = 0; i < st.angles.size(); ++i)
        for (std::size_t j = i + 1; j < st.angles.size(); ++j)
            if (circle_dist(st.angles[i], st.angles[j]) <= thr * (1.0 + 1e-6))
                involved[i] = involved[j] = true;
    std::size_t card = 0;
    for (bool b : involved) card += b;
    const bool multi = card > 2;

    std::vector<MergeEvent> events;
    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < st.angles.size(); ++i)
            for (std::size_t j = i + 1; j < st.angles.size(); ++j) {
                const double d = circle_dist(st.angles[i], st.angles[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        if (!(best <= thr * (1.0 + 1e-6)) || st.angles.size() < 2) break;
        MergeEvent ev;
        ev.position = weighted_circular_mean(st.angles[bi], st.weights[bi], st.angles[bj],
                                             st.weights[bj]);
        ev.weight = st.weights[bi] + st.weights[bj];
        ev.indices = st.origins[bi];
        ev.indices.insert(ev.indices.end(), st.origins[bj].begin(), st.origins[bj].end());
        std::sort(ev.indices.begin(), ev.indices.end());
        ev.multi_merge = multi;

        st.angles[bi] = ev.position;
        st.weights[bi] = ev.weight;
        st.origins[bi] = ev.indices;
        st.angles.erase(st.angles.begin() + bj);
        st.weights.erase(st.weights.begin() + bj);
        st.origins.erase(st.origins.begin() + bj);
        events.push_back(std::move(ev));
    }
    return events;
}

double weighted_energy(const State& st, double beta) {
    AngularConfiguration th;
    th.angles = st.angles;
    th.weights = st.weights;
    return energy_angular(th, beta).normalized;
}

}  // namespace

std::pair<StaircaseProfile, AngularConfiguration> integrate_modified(
    const AngularConfiguration& theta0, double beta, const RenormSpec& spec) {
    if (theta0.size() < 2) throw std::invalid_argument("integrate_modified: n >= 2 required");
    const double thr = merge_threshold(beta);

    State st;
    st.angles = theta0.angles;
    st.weights = theta0.weights.empty() ? std::vector<double>(theta0.size(), 1.0) : theta0.weights;
    st.origins.resize(theta0.size());
    for (std::size_t i = 0; i < theta0.size(); ++i) st.origins[i] = {i};
    st.total_weight = 0.0;
    for (double w : st.weights) st.total_weight += w;

    StaircaseProfile prof;
    double s = 0.0;

    auto sample = [&]() {
        prof.s.push_back(s);
        prof.energy_normalized.push_back(weighted_energy(st, beta));
        prof.n_active.push_back(st.angles.size());
        const double g = min_admissible(st, thr);
        prof.min_admissible_gap.push_back(std::isfinite(g) ? g : 0.0);
        prof.angles.push_back(st.angles);
    };

    auto fuse_here = [&]() {
        for (MergeEvent& ev : merge_all_within(st, thr)) {
            ev.time = s;
            prof.jump_times.push_back(s);
            prof.merge_events.push_back(std::move(ev));
        }
    };

    // Initial data may already sit inside the threshold.
    if (min_gap(st) <= thr) {
        sample();
        fuse_here();
    }
    sample();

    std::size_t step = 0;
    while (st.angles.size() > 1 && s < spec.s_max) {
        const State before = st;
        rk4_step(st, beta, thr, spec.ds);
        ++step;

        if (min_gap(st) <= thr || !regular_step(before, st)) {
            // Locate the crossing inside [s, s + ds] by bisection from the
            // pre-step state; irregular probes count as crossed, so the
            // bracket converges onto the threshold from the safe side.
            double lo = 0.0, hi = spec.ds;
            while (hi - lo > spec.event_tol) {
                const double mid = 0.5 * (lo + hi);
                State probe = before;
                rk4_step(probe, beta, thr, mid);
                const bool crossed = !regular_step(before, probe) || min_gap(probe) <= thr;
                (crossed ? hi : lo) = mid;
            }
            st = before;
            rk4_step(st, beta, thr, hi);
            if (!regular_step(before, st)) {
                st = before;
                rk4_step(st, beta, thr, lo);
                s += lo;
            } else {
                s += hi;
            }
            sample();
            fuse_here();
            sample();
            continue;
        }
        s += spec.ds;
        if (step % spec.cadence == 0) sample();
    }
    if (prof.s.empty() || prof.s.back() != s) sample();

    AngularConfiguration final_state;
    final_state.angles = st.angles;
    final_state.weights = st.weights;
    return {std::move(prof), std::move(final_state)};
}

StaircaseLevels extract_staircase(const StaircaseProfile& profile, double boundary_fraction) {
    if (profile.s.empty()) throw std::invalid_argument("extract_staircase: empty profile");
    StaircaseLevels out;
    out.jump_times = profile.jump_times;

    // Samples are grouped by active-particle count: the segment after the
    // i-th merge has n0 - i particles, which also attributes the coincident
    // pre/post-event samples unambiguously.
    const std::size_t n0 = *std::max_element(profile.n_active.begin(), profile.n_active.end());
    const std::size_t n_end = *std::min_element(profile.n_active.begin(), profile.n_active.end());
    for (std::size_t active = n0; active >= n_end && active >= 1; --active) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < profile.s.size(); ++i)
            if (profile.n_active[i] == active) vals.push_back(profile.energy_normalized[i]);
        const bool low_conf = vals.size() < 3;
        if (!vals.empty()) {
            std::sort(vals.begin(), vals.end());
            const std::size_t cut = static_cast<std::size_t>(boundary_fraction * vals.size());
            std::vector<double> core(vals.begin() + cut, vals.end() - cut);
            if (core.empty()) core = vals;
            out.plateau_levels.push_back(core[core.size() / 2]);
        } else {
            out.plateau_levels.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        out.low_confidence.push_back(low_conf);
    }
    return out;
}

}  // namespace sattn
