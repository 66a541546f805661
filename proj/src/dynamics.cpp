#include "sattn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sattn/energy.hpp"

namespace sattn {

std::vector<Vec> sa_velocity(const Configuration& config, double beta) {
    const std::size_t n = config.size();
    std::vector<Vec> vel(n);
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            e[j] = beta * dot(config.points[i], config.points[j]);
            m = std::max(m, e[j]);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            e[j] = config.weights[j] * std::exp(e[j] - m);
            z += e[j];
        }
        Vec avg(config.dim, 0.0);
        for (std::size_t j = 0; j < n; ++j) axpy(e[j] / z, config.points[j], avg);
        vel[i] = project_tangent(config.points[i], avg);
    }
    return vel;
}

std::vector<Vec> usa_velocity(const Configuration& config, double beta) {
    const std::size_t n = config.size();
    const double N = config.total_weight();
    std::vector<Vec> vel(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec acc(config.dim, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double w =
                config.weights[j] * std::exp(beta * (dot(config.points[i], config.points[j]) - 1.0));
            axpy(w, config.points[j], acc);
        }
        vel[i] = project_tangent(config.points[i], acc);
        scale(vel[i], 1.0 / N);
    }
    return vel;
}

std::vector<double> angular_usa_velocity(const AngularConfiguration& theta, double beta) {
    return grad_angular(theta, beta);
}

std::vector<double> angular_sa_velocity(const AngularConfiguration& theta, double beta) {
    const std::size_t n = theta.size();
    const Matrix a = sa_attention_angular(theta, beta);
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            v[i] += a[i][j] * std::sin(theta.angles[j] - theta.angles[i]);
    return v;
}

namespace {

std::vector<Vec> velocity(const ModelKind& model, const Configuration& c) {
    return model.model == Model::SA ? sa_velocity(c, model.beta) : usa_velocity(c, model.beta);
}

double velocity_norm(const std::vector<Vec>& v) {
    double s = 0.0;
    for (const Vec& x : v) s += dot(x, x);
    return std::sqrt(s);
}

double min_pair_dist(const Configuration& c) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j)
            best = std::min(best, dist(c.points[i], c.points[j]));
    return c.size() > 1 ? best : 0.0;
}

TraceRecord make_record(double t, const Configuration& c, const ModelKind& model) {
    TraceRecord r;
    r.t = t;
    r.config = c;
    const EnergyValue e = energy(c, model.beta);
    r.energy_raw = e.raw;
    r.energy_normalized = e.normalized;
    r.grad_norm = velocity_norm(velocity(model, c));
    r.min_pair_dist = min_pair_dist(c);
    return r;
}

void check_finite(const Configuration& c, std::size_t step) {
    for (const Vec& p : c.points)
        if (!all_finite(p)) throw numeric_error("integrate: non-finite state", step);
}

void step_euler(const ModelKind& model, Configuration& c, double dt) {
    const auto v = velocity(model, c);
    for (std::size_t i = 0; i < c.size(); ++i) {
        axpy(dt, v[i], c.points[i]);
        normalize(c.points[i]);
    }
}

void step_rk4(const ModelKind& model, Configuration& c, double dt) {
    const std::size_t n = c.size();
    const auto k1 = velocity(model, c);
    auto stage = [&](const std::vector<Vec>& k, double h) {
        Configuration s = c;
        for (std::size_t i = 0; i < n; ++i) {
            axpy(h, k[i], s.points[i]);
            normalize(s.points[i]);
        }
        return s;
    };
    const auto k2 = velocity(model, stage(k1, dt / 2.0));
    const auto k3 = velocity(model, stage(k2, dt / 2.0));
    const auto k4 = velocity(model, stage(k3, dt));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < c.dim; ++d)
            c.points[i][d] += dt / 6.0 * (k1[i][d] + 2.0 * k2[i][d] + 2.0 * k3[i][d] + k4[i][d]);
        normalize(c.points[i]);
    }
}

}  // namespace

Trajectory integrate(const ModelKind& model, const Configuration& config, const IntegratorSpec& spec,
                     const Observer& observer) {
    config.validate();
    spec.validate();
    Configuration state = config;
    Trajectory traj;

    auto record = [&](double t) {
        TraceRecord r = make_record(t, state, model);
        if (observer) observer(r);
        traj.records.push_back(std::move(r));
    };

    record(0.0);
    const auto steps = static_cast<std::size_t>(std::floor(spec.t_max / spec.dt + 1e-12));
    for (std::size_t s = 1; s <= steps; ++s) {
        try {
            if (spec.scheme == Scheme::EulerProject)
                step_euler(model, state, spec.dt);
            else
                step_rk4(model, state, spec.dt);
        } catch (const std::domain_error&) {
            // Renormalization met a zero or non-finite norm: the state blew up.
            throw numeric_error("integrate: non-finite state", s);
        }
        check_finite(state, s);
        if (s % spec.cadence == 0 || s == steps) record(double(s) * spec.dt);
    }
    return traj;
}

AngularTrajectory integrate_angular(const AngularConfiguration& theta0, double beta,
                                    const IntegratorSpec& spec) {
    spec.validate();
    AngularConfiguration state = theta0;
    if (state.weights.empty()) state.weights.assign(state.size(), 1.0);
    AngularTrajectory traj;
    traj.weights = state.weights;

    auto record = [&](double t) { traj.records.push_back({t, state.angles}); };

    auto deriv = [&](const std::vector<double>& a) {
        AngularConfiguration tmp;
        tmp.angles = a;
        tmp.weights = state.weights;
        return angular_usa_velocity(tmp, beta);
    };

    record(0.0);
    const auto steps = static_cast<std::size_t>(std::floor(spec.t_max / spec.dt + 1e-12));
    for (std::size_t s = 1; s <= steps; ++s) {
        if (spec.scheme == Scheme::EulerProject) {
            const auto v = deriv(state.angles);
            for (std::size_t i = 0; i < state.size(); ++i)
                state.angles[i] = wrap_angle(state.angles[i] + spec.dt * v[i]);
        } else {
            const std::size_t n = state.size();
            const auto k1 = deriv(state.angles);
            std::vector<double> tmp(n);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = state.angles[i] + spec.dt / 2.0 * k1[i];
            const auto k2 = deriv(tmp);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = state.angles[i] + spec.dt / 2.0 * k2[i];
            const auto k3 = deriv(tmp);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = state.angles[i] + spec.dt * k3[i];
            const auto k4 = deriv(tmp);
            for (std::size_t i = 0; i < n; ++i)
                state.angles[i] = wrap_angle(state.angles[i] + spec.dt / 6.0 *
                                                                   (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        }
        for (double a : state.angles)
            if (!std::isfinite(a)) throw numeric_error("integrate_angular: non-finite state", s);
        if (s % spec.cadence == 0 || s == steps) record(double(s) * spec.dt);
    }
    return traj;
}

}  // namespace sattn
