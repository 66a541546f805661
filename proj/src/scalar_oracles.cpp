#include "sattn/scalar_oracles.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace sattn {

namespace {

// Scalar Cash-Karp RK45 step: returns the 5th-order value and an embedded
// error estimate.
struct Rk45Step {
    double y5;
    double err;
};

Rk45Step rk45(const std::function<double(double)>& f, double y, double h) {
    const double k1 = f(y);
    const double k2 = f(y + h * (k1 / 5.0));
    const double k3 = f(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    const double k4 = f(y + h * (3.0 / 10.0 * k1 - 9.0 / 10.0 * k2 + 6.0 / 5.0 * k3));
    const double k5 = f(y + h * (-11.0 / 54.0 * k1 + 5.0 / 2.0 * k2 - 70.0 / 27.0 * k3 +
                                 35.0 / 27.0 * k4));
    const double k6 =
        f(y + h * (1631.0 / 55296.0 * k1 + 175.0 / 512.0 * k2 + 575.0 / 13824.0 * k3 +
                   44275.0 / 110592.0 * k4 + 253.0 / 4096.0 * k5));
    const double y5 = y + h * (37.0 / 378.0 * k1 + 250.0 / 621.0 * k3 + 125.0 / 594.0 * k4 +
                               512.0 / 1771.0 * k6);
    const double y4 = y + h * (2825.0 / 27648.0 * k1 + 18575.0 / 48384.0 * k3 +
                               13525.0 / 55296.0 * k4 + 277.0 / 14336.0 * k5 + 0.25 * k6);
    return {y5, std::abs(y5 - y4)};
}

// Integrates a strictly decreasing scalar ODE until y <= target, returning
// the hitting time (by cubic Hermite inversion inside the bracketing step) or
// nullopt past the horizon.
std::optional<double> integrate_to_target(const std::function<double(double)>& f, double y0,
                                          double target, double horizon, const OdeControl& ctl,
                                          bool* monotone_violated = nullptr) {
    if (y0 <= target) return 0.0;
    double t = 0.0, y = y0;
    double h = 1e-4;
    const int kMaxSteps = 2000000;
    for (int step = 0; step < kMaxSteps && t < horizon; ++step) {
        const Rk45Step s = rk45(f, y, h);
        const double scale = ctl.atol + ctl.rtol * std::abs(y);
        if (s.err > scale && h > 1e-14) {
            h = std::max(1e-14, 0.9 * h * std::pow(scale / s.err, 0.2));
            continue;
        }
        const double y_new = s.y5;
        if (monotone_violated && y_new > y + 1e-13) *monotone_violated = true;
        if (y_new <= target) {
            // Hermite inversion on [t, t+h]; derivatives at both ends known.
            const double f0 = f(y), f1 = f(y_new);
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 80; ++it) {
                const double s01 = 0.5 * (lo + hi);
                const double h00 = (1 + 2 * s01) * (1 - s01) * (1 - s01);
                const double h10 = s01 * (1 - s01) * (1 - s01);
                const double h01 = s01 * s01 * (3 - 2 * s01);
                const double h11 = s01 * s01 * (s01 - 1);
                const double yi = h00 * y + h10 * h * f0 + h01 * y_new + h11 * h * f1;
                (yi > target ? lo : hi) = s01;
            }
            return t + 0.5 * (lo + hi) * h;
        }
        t += h;
        y = y_new;
        const double grow = (s.err > 0.0) ? 0.9 * std::pow(scale / s.err, 0.2)
                                          : ctl.max_step_growth;
        h *= std::min(ctl.max_step_growth, std::max(0.2, grow));
    }
    return std::nullopt;
}

}  // namespace

ScalarOdeResult collapse_hitting_time(double u0, double beta, double c, const OdeControl& ctl) {
    if (!(u0 > 0.0 && u0 <= 1.0)) throw std::invalid_argument("collapse: u0 in (0,1] required");
    if (!(beta > 1.0)) throw std::invalid_argument("collapse: beta > 1 required");
    if (!(c > 0.0)) throw std::invalid_argument("collapse: c > 0 required");

    ScalarOdeResult res;
    res.bound = std::exp(beta * (1.0 - u0)) / u0 + beta * beta * c * std::exp(1.0) / (beta - 1.0);
    if (1.0 - u0 <= std::exp(-c * beta)) {
        res.hitting_time = 0.0;
        res.margin = res.bound;
        return res;
    }
    // Work in z = log(1-u): dz/dt = -(1 - e^z) e^{-beta e^z}, strictly
    // decreasing and smooth across the slow phase near u ~ u0.
    auto f = [beta](double z) {
        const double w = std::exp(z);
        return -(1.0 - w) * std::exp(-beta * w);
    };
    const double z0 = std::log1p(-u0);
    const double z_target = -c * beta;
    res.hitting_time =
        integrate_to_target(f, z0, z_target, ctl.horizon_factor * res.bound, ctl);
    if (res.hitting_time) res.margin = res.bound - *res.hitting_time;
    return res;
}

ClusteringTimes clustering_timescale(double u0, double beta, double c, double forcing_K,
                                     double forcing_kappa, const OdeControl& ctl) {
    if (!(u0 > 0.0 && u0 <= 1.0)) throw std::invalid_argument("clustering: u0 in (0,1] required");
    if (!(beta >= std::exp(1.0))) throw std::invalid_argument("clustering: beta >= e required");
    if (!(c > 0.0)) throw std::invalid_argument("clustering: c > 0 required");
    const double lb = std::log(beta);
    if (forcing_K != 0.0 && !(forcing_kappa > lb / beta))
        throw std::invalid_argument("clustering: kappa > log(beta)/beta required");

    const double cb = forcing_K * std::exp(-forcing_kappa * beta) * lb;
    auto f = [c, lb, cb](double u) { return -c * lb * std::sin(u) + cb; };

    ClusteringTimes out;
    out.gap_bound = 2.0 * std::log(lb) / (c * lb);
    const double ltan = std::log(std::tan(u0 / 2.0));
    out.asym_displayed = 2.0 / c + 2.0 * ltan / (c * lb) - std::log(lb) / (c * lb);
    out.asym_exact =
        1.0 / (2.0 * c) + (ltan + std::log(2.0)) / (c * lb) - std::log(lb) / (2.0 * c * lb);

    const double thr1 = std::sqrt(lb / beta);
    const double thr2 = 1.0 / std::sqrt(beta * lb);
    const double horizon = 10.0 / c + 10.0;

    bool violated = false;
    out.t_beta = integrate_to_target(f, u0, thr1, horizon, ctl, &violated);
    out.T_beta = integrate_to_target(f, u0, thr2, horizon, ctl, &violated);
    if (violated)
        throw std::domain_error("clustering_timescale: u not monotone, forcing too large");
    return out;
}

}  // namespace sattn
