#include "sattn/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sattn/metastability.hpp"

namespace sattn {

EnergyValue energy(const Configuration& config, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("energy: beta > 0 required");
    const std::size_t n = config.size();
    const double N = config.total_weight();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += config.weights[i] * config.weights[i];  // diagonal: exponent 0
        for (std::size_t j = i + 1; j < n; ++j)
            s += 2.0 * config.weights[i] * config.weights[j] *
                 std::exp(beta * (dot(config.points[i], config.points[j]) - 1.0));
    }
    EnergyValue e;
    e.normalized = s / (N * N);
    e.raw = e.normalized / (2.0 * beta);
    return e;
}

EnergyValue energy_angular(const AngularConfiguration& theta, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("energy: beta > 0 required");
    const std::size_t n = theta.size();
    const double N = theta.total_weight();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += theta.weights[i] * theta.weights[i];
        for (std::size_t j = i + 1; j < n; ++j)
            s += 2.0 * theta.weights[i] * theta.weights[j] *
                 std::exp(beta * (std::cos(theta.angles[i] - theta.angles[j]) - 1.0));
    }
    EnergyValue e;
    e.normalized = s / (N * N);
    e.raw = e.normalized / (2.0 * beta);
    return e;
}

double hessian_kernel(double x, double beta) {
    const double s = std::sin(x);
    return (std::cos(x) - beta * s * s) * std::exp(beta * (std::cos(x) - 1.0));
}

Vec grad_angular(const AngularConfiguration& theta, double beta) {
    const std::size_t n = theta.size();
    const double N = theta.total_weight();
    Vec g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            if (m == i) continue;
            const double d = theta.angles[i] - theta.angles[m];
            s += theta.weights[m] * std::sin(d) * std::exp(beta * (std::cos(d) - 1.0));
        }
        g[i] = -s / (N * N);
    }
    return g;
}

Matrix hessian_angular(const AngularConfiguration& theta, double beta) {
    const std::size_t n = theta.size();
    const double N = theta.total_weight();
    Matrix h(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double diag = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double v = theta.weights[i] * theta.weights[j] *
                             hessian_kernel(theta.angles[i] - theta.angles[j], beta) / (N * N);
            h[i][j] = v;
            diag += v;
        }
        h[i][i] = -diag;  // rows sum to zero exactly by construction
    }
    return h;
}

QuadraticFormValue hessian_quadratic_form(const AngularConfiguration& theta, double beta,
                                          const Vec& v) {
    if (v.size() != theta.size())
        throw std::invalid_argument("hessian_quadratic_form: |v| must equal n");
    const Matrix h = hessian_angular(theta, beta);
    QuadraticFormValue q;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) {
            q.direct += v[i] * h[i][j] * v[j];
            const double d = v[i] - v[j];
            q.pairwise -= 0.5 * h[i][j] * d * d;
        }
    return q;
}

Matrix sa_attention_angular(const AngularConfiguration& theta, double beta) {
    const std::size_t n = theta.size();
    Matrix a(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = beta * std::cos(theta.angles[i] - theta.angles[j]);
            m = std::max(m, a[i][j]);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = theta.weights[j] * std::exp(a[i][j] - m);
            z += a[i][j];
        }
        for (double& v : a[i]) v /= z;
    }
    return a;
}

Matrix sa_metric_hessian(const AngularConfiguration& theta, double beta) {
    const std::size_t n = theta.size();
    const Matrix a = sa_attention_angular(theta, beta);
    Matrix m(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double row_sin = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            row_sin += a[i][k] * std::sin(theta.angles[i] - theta.angles[k]);
        double diag = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = theta.angles[i] - theta.angles[j];
            const double s = std::sin(d);
            const double b = a[i][j] * (std::cos(d) - beta * s * s + beta * s * row_sin);
            m[i][j] = -b;
            diag += b;
        }
        m[i][i] = diag;
    }
    return m;
}

namespace {

// Members of each 2*eps cap with their signed angular offsets from the center.
struct CapMembers {
    std::vector<std::size_t> idx;
    std::vector<double> offset;
    double spread = 0.0;
};

std::vector<CapMembers> assign_to_caps(const std::vector<double>& angles, const AngularCaps& caps) {
    std::vector<CapMembers> out(caps.centers.size());
    const double two_eps = 2.0 * caps.eps;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        for (std::size_t q = 0; q < caps.centers.size(); ++q) {
            const double off = circle_diff(angles[i], caps.centers[q]);
            if (std::cos(off) >= 1.0 - two_eps) {
                out[q].idx.push_back(i);
                out[q].offset.push_back(off);
                break;
            }
        }
    }
    for (CapMembers& c : out) {
        if (c.idx.size() >= 2) {
            const auto [lo, hi] = std::minmax_element(c.offset.begin(), c.offset.end());
            c.spread = *hi - *lo;
        }
        // Order members left-to-right within the cap.
        std::vector<std::size_t> perm(c.idx.size());
        for (std::size_t p = 0; p < perm.size(); ++p) perm[p] = p;
        std::sort(perm.begin(), perm.end(),
                  [&](std::size_t a, std::size_t b) { return c.offset[a] < c.offset[b]; });
        std::vector<std::size_t> idx2(c.idx.size());
        std::vector<double> off2(c.idx.size());
        for (std::size_t p = 0; p < perm.size(); ++p) {
            idx2[p] = c.idx[perm[p]];
            off2[p] = c.offset[perm[p]];
        }
        c.idx = std::move(idx2);
        c.offset = std::move(off2);
    }
    return out;
}

double cap_alpha_angular(const AngularCaps& caps) {
    if (caps.centers.size() < 2) return -1.0;
    std::vector<Vec> centers;
    centers.reserve(caps.centers.size());
    for (double a : caps.centers) centers.push_back(Vec{std::cos(a), std::sin(a)});
    return cap_alpha(CapFamily(centers, caps.eps));
}

}  // namespace

PlReport pl_diagnostic(const AngularTrajectory& traj, double beta, const AngularCaps& caps,
                       double lambda, std::optional<double> delta_opt) {
    if (traj.empty()) throw std::invalid_argument("pl_diagnostic: empty trajectory");
    const std::size_t n = traj.records.front().angles.size();
    PlReport rep;
    rep.lambda = lambda;
    rep.alpha = cap_alpha_angular(caps);

    const LambdaWindow win = lambda_window(beta, caps.eps, rep.alpha, n);
    if (win.empty() || lambda <= win.lo || lambda >= win.hi)
        throw std::domain_error("pl_diagnostic: lambda outside the admissible window");

    const double far = 4.0 * (1.0 + beta) * std::exp(-(1.0 - rep.alpha) * beta);
    const double delta_lo = 2.0 * far * std::exp(-0.5);
    rep.delta = delta_opt.value_or(0.5 * (delta_lo + 1.0));
    if (!(rep.delta > delta_lo && rep.delta < 1.0))
        throw std::domain_error("pl_diagnostic: delta outside its admissible interval");
    rep.kappa_strong = (rep.delta * std::exp(0.5) / 2.0 - far) / double(n);
    rep.kappa_weak = (rep.delta * std::exp(-0.5) / 2.0 - far) / double(n);

    const double slow_gap = std::exp(-0.5 * lambda * beta);

    for (const AngularTraceRecord& r : traj.records) {
        PlSample s;
        s.t = r.t;
        const auto members = assign_to_caps(r.angles, caps);
        double max_spread = 0.0;
        for (const CapMembers& c : members) max_spread = std::max(max_spread, c.spread);
        s.in_slow_manifold = max_spread <= slow_gap;
        if (s.in_slow_manifold) {
            rep.samples.push_back(s);
            continue;
        }

        AngularConfiguration th;
        th.angles = r.angles;
        th.weights = traj.weights.empty() ? std::vector<double>(n, 1.0) : traj.weights;
        const Vec g = grad_angular(th, beta);
        s.grad_norm2 = dot(g, g);
        s.H = hessian_quadratic_form(th, beta, g).pairwise;
        s.bound_strong = -(rep.kappa_strong / (2.0 * double(n))) * s.grad_norm2;
        s.bound_weak = -(rep.kappa_weak / (2.0 * double(n))) * s.grad_norm2;
        s.h_negative = s.H < 0.0;
        s.bound_ok = s.H <= s.bound_weak;

        // Claim: within every cap whose spread exceeds the slow-manifold gap,
        // the largest gradient component is dominated by the extremes.
        s.claim_ok = true;
        for (const CapMembers& c : members) {
            if (c.idx.size() < 2 || c.spread <= slow_gap) continue;
            double worst = 0.0;
            for (std::size_t i : c.idx) worst = std::max(worst, std::abs(g[i]));
            const double edge = std::max(std::abs(g[c.idx.front()]), std::abs(g[c.idx.back()]));
            if (worst > (std::exp(1.0) / 2.0) * edge) s.claim_ok = false;
        }

        ++rep.checks_total;
        if (s.bound_ok && s.claim_ok && s.h_negative)
            ++rep.checks_passed;
        else if (!rep.first_failure_t)
            rep.first_failure_t = s.t;
        rep.samples.push_back(s);
    }
    return rep;
}

AccelReport acceleration_diagnostic(const AngularTrajectory& traj, double beta, double separation) {
    if (traj.empty()) throw std::invalid_argument("acceleration_diagnostic: empty trajectory");
    const std::size_t n = traj.records.front().angles.size();
    AccelReport rep;
    rep.hypothesis_met_everywhere = true;
    rep.all_ok = true;

    double grad0_norm2 = 0.0;
    double integral = 0.0;
    double prev_t = 0.0, prev_L = 0.0;
    bool first = true;

    for (const AngularTraceRecord& r : traj.records) {
        AngularConfiguration th;
        th.angles = r.angles;
        th.weights = traj.weights.empty() ? std::vector<double>(n, 1.0) : traj.weights;
        const Vec g = grad_angular(th, beta);
        const double N = th.total_weight();

        AccelSample s;
        s.t = r.t;
        s.grad_norm2 = dot(g, g);
        s.hypothesis_met = n >= 2;
        s.L = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n && s.hypothesis_met; ++i) {
            std::size_t ji = n;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i) continue;
                const double d = circle_dist(r.angles[i], r.angles[k]);
                if (d < best) {
                    best = d;
                    ji = k;
                }
            }
            if (best < separation || !(g[i] * g[ji] < 0.0)) {
                s.hypothesis_met = false;
                break;
            }
            const double dd = th.weights[i] * th.weights[ji] *
                              hessian_kernel(r.angles[i] - r.angles[ji], beta) / (N * N);
            s.L = std::max(s.L, dd);
        }
        if (!s.hypothesis_met) {
            rep.hypothesis_met_everywhere = false;
            s.L = 0.0;
        }

        if (first) {
            grad0_norm2 = s.grad_norm2;
            first = false;
        } else {
            integral += 0.5 * (s.L + prev_L) * (s.t - prev_t);
        }
        prev_t = s.t;
        prev_L = s.L;

        s.lower_bound = std::exp(-0.5 * integral) * grad0_norm2;
        // Modest slack for quadrature and sampling error in the exponent.
        s.ok = !s.hypothesis_met || s.grad_norm2 >= s.lower_bound * (1.0 - 1e-9) - 1e-300;
        if (s.hypothesis_met && !s.ok) rep.all_ok = false;
        rep.samples.push_back(s);
    }
    rep.integral_L = integral;
    return rep;
}

namespace {

// Collapse every cap of the record to its weighted circular mean; particles
// outside all caps stay put.
std::vector<double> collapse_within_caps(const std::vector<double>& angles,
                                         const std::vector<double>& weights,
                                         const AngularCaps& caps) {
    std::vector<double> out = angles;
    const auto members = assign_to_caps(angles, caps);
    for (const CapMembers& c : members) {
        if (c.idx.empty()) continue;
        double sx = 0.0, sy = 0.0;
        for (std::size_t i : c.idx) {
            sx += weights[i] * std::cos(angles[i]);
            sy += weights[i] * std::sin(angles[i]);
        }
        const double mean = std::atan2(sy, sx);
        for (std::size_t i : c.idx) out[i] = wrap_angle(mean);
    }
    return out;
}

const AngularTraceRecord& record_at(const AngularTrajectory& traj, double t) {
    const AngularTraceRecord* best = &traj.records.front();
    double gap = std::numeric_limits<double>::infinity();
    for (const AngularTraceRecord& r : traj.records) {
        const double d = std::abs(r.t - t);
        if (d < gap) {
            gap = d;
            best = &r;
        }
    }
    return *best;
}

}  // namespace

bool slow_motion_check(const AngularTrajectory& traj, const AngularCaps& caps, double beta,
                       double delta, double s, double t) {
    if (traj.empty()) throw std::invalid_argument("slow_motion_check: empty trajectory");
    if (s > t) throw std::invalid_argument("slow_motion_check: s <= t required");
    const AngularTraceRecord& rs = record_at(traj, s);
    const AngularTraceRecord& rt = record_at(traj, t);
    const std::size_t n = rs.angles.size();
    const std::vector<double> w =
        traj.weights.empty() ? std::vector<double>(n, 1.0) : traj.weights;

    double disp2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = circle_diff(rt.angles[i], rs.angles[i]);
        disp2 += d * d;
    }

    AngularConfiguration u, v;
    u.angles = rs.angles;
    u.weights = w;
    v.angles = collapse_within_caps(rs.angles, w, caps);
    v.weights = w;
    // Ascent flow: the collapsed reference has the higher energy.
    const double gap = std::max(0.0, energy_angular(v, beta).raw - energy_angular(u, beta).raw);

    return std::sqrt(disp2) <= std::sqrt(gap) + delta * (rt.t - rs.t + 1.0);
}

}  // namespace sattn
