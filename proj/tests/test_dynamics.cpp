#include <doctest.h>

#include <cmath>

#include "sattn/dynamics.hpp"
#include "sattn/energy.hpp"
#include "sattn/initgen.hpp"
#include "sattn/rng.hpp"

using namespace sattn;

namespace {
constexpr double kPi = 3.14159265358979323846;

Configuration circle_config(const std::vector<double>& angles) {
    return from_angles(AngularConfiguration::from_angles(angles));
}
}  // namespace

TEST_CASE("sa velocity: cluster and antipodal pair are stationary") {
    const Configuration cluster = circle_config({0.3, 0.3, 0.3, 0.3});
    for (const Vec& v : sa_velocity(cluster, 5.0))
        for (double x : v) CHECK(std::abs(x) < 1e-15);

    const Configuration anti = circle_config({0.0, kPi});
    for (const Vec& v : sa_velocity(anti, 2.0))
        for (double x : v) CHECK(std::abs(x) < 1e-15);
}

TEST_CASE("sa velocity matches the direct formula for an orthogonal pair") {
    const Configuration c = circle_config({0.0, kPi / 2.0});
    const auto v = sa_velocity(c, 1.0);
    // a_12 = 1/(e + 1); the projected partner is exactly e2.
    const double a12 = 1.0 / (std::exp(1.0) + 1.0);
    CHECK(v[0][0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(v[0][1] == doctest::Approx(a12).epsilon(1e-14));
    CHECK(norm(v[0]) == doctest::Approx(a12).epsilon(1e-14));
}

TEST_CASE("usa velocity: frozen pair value, singleton is stationary") {
    const Configuration single = circle_config({1.2});
    CHECK(norm(usa_velocity(single, 7.0)[0]) < 1e-15);

    const Configuration c = circle_config({0.0, kPi / 2.0});
    const auto v = usa_velocity(c, 2.0);
    CHECK(norm(v[0]) == doctest::Approx(0.5 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("angular usa velocity equals the gradient and the Cartesian field up to the factor n") {
    CHECK(angular_usa_velocity(AngularConfiguration::from_angles({0.5, 0.5, 0.5}), 3.0) ==
          std::vector<double>{0.0, 0.0, 0.0});

    const AngularConfiguration pair = AngularConfiguration::from_angles({0.0, kPi / 2.0});
    CHECK(angular_usa_velocity(pair, 1.0)[0] ==
          doctest::Approx(std::exp(-1.0) / 4.0).epsilon(1e-14));

    CounterRng rng(11, 0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(5);
        for (double& x : a) x = rng.uniform(0.0, kTwoPi);
        const AngularConfiguration th = AngularConfiguration::from_angles(a);
        const double beta = rng.uniform(0.5, 6.0);
        const auto rate = angular_usa_velocity(th, beta);
        const auto cart = usa_velocity(from_angles(th), beta);
        for (std::size_t i = 0; i < 5; ++i) {
            // Angular rate of the Cartesian flow: v . (unit tangent), with
            // tangent (-sin, cos) at angle theta_i.
            const double tang = -std::sin(a[i]) * cart[i][0] + std::cos(a[i]) * cart[i][1];
            CHECK(std::abs(tang - 5.0 * rate[i]) < 1e-10);
        }
    }
}

TEST_CASE("velocities are tangent") {
    const Configuration c = sample_uniform_sphere(3, 6, SeedSpec{12, 0});
    for (const auto& [name, vel] : {std::pair{"sa", sa_velocity(c, 4.0)},
                                    std::pair{"usa", usa_velocity(c, 4.0)}}) {
        (void)name;
        for (std::size_t i = 0; i < c.size(); ++i)
            CHECK(std::abs(dot(vel[i], c.points[i])) < 1e-12);
    }
}

TEST_CASE("permutation and rotation equivariance") {
    const Configuration c = sample_uniform_sphere(2, 5, SeedSpec{13, 0});
    const auto v = sa_velocity(c, 3.0);

    Configuration perm = c;
    std::swap(perm.points[0], perm.points[3]);
    const auto vp = sa_velocity(perm, 3.0);
    for (int d = 0; d < 2; ++d) {
        CHECK(vp[0][d] == doctest::Approx(v[3][d]).epsilon(1e-14));
        CHECK(vp[3][d] == doctest::Approx(v[0][d]).epsilon(1e-14));
    }

    const double ang = 0.77;
    auto rot = [&](const Vec& p) {
        return Vec{std::cos(ang) * p[0] - std::sin(ang) * p[1],
                   std::sin(ang) * p[0] + std::cos(ang) * p[1]};
    };
    Configuration rc = c;
    for (Vec& p : rc.points) p = rot(p);
    const auto vr = sa_velocity(rc, 3.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec expected = rot(v[i]);
        CHECK(vr[i][0] == doctest::Approx(expected[0]).epsilon(1e-12));
        CHECK(vr[i][1] == doctest::Approx(expected[1]).epsilon(1e-12));
    }
}

TEST_CASE("integrate: equilibria are preserved and t_max = 0 yields one record") {
    const Configuration cluster = circle_config({1.0, 1.0, 1.0});
    IntegratorSpec spec{Scheme::EulerProject, 0.05, 20.0, 10};
    const Trajectory traj = integrate(ModelKind(Model::USA, 3.0), cluster, spec);
    for (int d = 0; d < 2; ++d)
        CHECK(std::abs(traj.records.back().config.points[0][d] - cluster.points[0][d]) < 1e-12);

    IntegratorSpec empty{Scheme::EulerProject, 0.1, 0.0, 1};
    CHECK(integrate(ModelKind(Model::SA, 1.0), cluster, empty).size() == 1);
}

TEST_CASE("integrate: energy is nondecreasing along the exploratory setting") {
    // d = 2, n = 5, beta = 4, Euler with dt = 0.1.
    const Configuration init = sample_uniform_sphere(2, 5, SeedSpec{14, 0});
    IntegratorSpec spec{Scheme::EulerProject, 0.1, 100.0, 1};
    const Trajectory traj = integrate(ModelKind(Model::SA, 4.0), init, spec);
    for (std::size_t i = 1; i < traj.size(); ++i)
        CHECK(traj.records[i].energy_normalized >=
              traj.records[i - 1].energy_normalized - 1e-8);
    CHECK(traj.records.back().t == doctest::Approx(100.0));
}

TEST_CASE("record times are strictly increasing") {
    const Configuration init = sample_uniform_sphere(3, 4, SeedSpec{15, 0});
    IntegratorSpec spec{Scheme::Rk4Project, 0.013, 1.0, 7};
    const Trajectory traj = integrate(ModelKind(Model::USA, 2.0), init, spec);
    for (std::size_t i = 1; i < traj.size(); ++i)
        CHECK(traj.records[i].t > traj.records[i - 1].t);
}

TEST_CASE("euler converges at first order against an rk4 reference") {
    const Configuration init = sample_uniform_sphere(2, 4, SeedSpec{16, 0});
    const ModelKind model(Model::USA, 3.0);
    const double T = 1.0;
    IntegratorSpec ref{Scheme::Rk4Project, 1e-4, T, 1000000};
    const Configuration exact = integrate(model, init, ref).records.back().config;

    auto err_at = [&](double dt) {
        IntegratorSpec spec{Scheme::EulerProject, dt, T, 1000000};
        const Configuration got = integrate(model, init, spec).records.back().config;
        double e = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) e = std::max(e, dist(got.points[i], exact.points[i]));
        return e;
    };
    const double e1 = err_at(0.02), e2 = err_at(0.01);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("integrate aborts on non-finite state with the step index") {
    const Configuration c = circle_config({0.0, 1.0});
    // One step of length 1e160 overflows the squared norm during projection.
    IntegratorSpec spec{Scheme::EulerProject, 1e160, 2e160, 1};
    try {
        integrate(ModelKind(Model::SA, 2.0), c, spec);
        FAIL("expected numeric_error");
    } catch (const numeric_error& e) {
        CHECK(e.step() >= 1);
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
}

TEST_CASE("observer fires at the recording cadence") {
    const Configuration init = sample_uniform_sphere(2, 3, SeedSpec{18, 0});
    IntegratorSpec spec{Scheme::EulerProject, 0.1, 1.0, 4};
    std::vector<double> seen;
    const Trajectory traj = integrate(ModelKind(Model::USA, 2.0), init, spec,
                                      [&](const TraceRecord& r) { seen.push_back(r.t); });
    REQUIRE(seen.size() == traj.size());
    // t = 0, every 4th step, plus the final step: {0, 0.4, 0.8, 1.0}.
    CHECK(seen.size() == 4);
    CHECK(seen.front() == 0.0);
    CHECK(seen.back() == doctest::Approx(1.0));
}

TEST_CASE("integration is deterministic") {
    const Configuration init = sample_uniform_sphere(3, 5, SeedSpec{17, 0});
    IntegratorSpec spec{Scheme::EulerProject, 0.01, 5.0, 10};
    const Trajectory a = integrate(ModelKind(Model::SA, 3.0), init, spec);
    const Trajectory b = integrate(ModelKind(Model::SA, 3.0), init, spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < init.size(); ++j)
            CHECK(a.records[i].config.points[j] == b.records[i].config.points[j]);
}
