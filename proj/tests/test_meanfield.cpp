#include <doctest.h>

#include <cmath>

#include "sattn/dynamics.hpp"
#include "sattn/initgen.hpp"
#include "sattn/meanfield.hpp"

using namespace sattn;

TEST_CASE("meanfield velocity: Dirac and symmetric pairs are stationary") {
    AtomicMeasure dirac;
    dirac.atoms = {Vec{1, 0}};
    dirac.masses = {1.0};
    CHECK(norm(meanfield_velocity(dirac, Vec{1, 0}, 5.0)) < 1e-15);

    AtomicMeasure sym;
    sym.atoms = {Vec{std::cos(0.5), std::sin(0.5)}, Vec{std::cos(-0.5), std::sin(-0.5)}};
    sym.masses = {0.5, 0.5};
    CHECK(norm(meanfield_velocity(sym, Vec{1, 0}, 3.0)) < 1e-15);
}

TEST_CASE("meanfield velocity reduces to the self-attention field on uniform atoms") {
    const Configuration c = sample_uniform_sphere(3, 7, SeedSpec{41, 0});
    const AtomicMeasure mu = AtomicMeasure::from_configuration(c);
    const auto sa = sa_velocity(c, 6.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec v = meanfield_velocity(mu, c.points[i], 6.0);
        for (std::size_t d = 0; d < 3; ++d) CHECK(std::abs(v[d] - sa[i][d]) < 1e-14);
    }
}

TEST_CASE("atomic measure invariants") {
    AtomicMeasure bad;
    bad.atoms = {Vec{1, 0}, Vec{0, 1}};
    bad.masses = {0.6, 0.6};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.masses = {0.5, 0.5};
    CHECK_NOTHROW(bad.validate());
}

TEST_CASE("single-cap Dirac mixture is stationary under transport") {
    AtomicMeasure mu;
    for (int i = 0; i < 4; ++i) {
        mu.atoms.push_back(Vec{1, 0});
        mu.masses.push_back(0.25);
    }
    SeparationCertificate cert;
    cert.caps = CapFamily({Vec{1, 0}}, 0.01);
    cert.assignment.assign(4, 0);
    cert.beta = 10.0;
    cert.eps = 0.01;
    IntegratorSpec spec{Scheme::EulerProject, 0.01, 5.0, 100};
    const MfTrajectory traj = integrate_meanfield(mu, 10.0, spec, cert);
    for (const Vec& a : traj.records.back().mu.atoms) {
        CHECK(std::abs(a[0] - 1.0) < 1e-12);
        CHECK(std::abs(a[1]) < 1e-12);
    }
    // Masses never change.
    CHECK(traj.records.back().mu.masses == mu.masses);
}

TEST_CASE("atoms-as-particles measure shadows the SA trajectory") {
    const Configuration init = sample_uniform_sphere(2, 6, SeedSpec{42, 0});
    IntegratorSpec spec{Scheme::EulerProject, 1e-3, 5.0, 50};
    const Trajectory sa = integrate(ModelKind(Model::SA, 4.0), init, spec);

    SeparationCertificate cert;
    cert.caps = CapFamily({init.points[0]}, 0.01);
    cert.assignment.assign(6, 0);
    cert.beta = 4.0;
    cert.eps = 0.01;
    const MfTrajectory mf = integrate_meanfield(AtomicMeasure::from_configuration(init), 4.0, spec, cert);

    REQUIRE(sa.size() == mf.records.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i)
        for (std::size_t j = 0; j < 6; ++j)
            sup = std::max(sup, dist(sa.records[i].config.points[j], mf.records[i].mu.atoms[j]));
    CHECK(sup < 1e-10);
}

TEST_CASE("mf bounds: pivot in the log domain and certificate gating") {
    SeparationCertificate cert;
    cert.caps = CapFamily({Vec{1, 0}, Vec{0, 1}}, 0.01);
    cert.assignment = {0, 1};
    cert.alpha = 0.39;
    cert.beta = 100.0;
    cert.eps = 0.01;
    cert.gamma = 1.0 - 0.39 - 0.08 - std::log(800.0) / 100.0;
    const MfBounds b = mf_bounds(cert);
    CHECK(b.log_pivot == doctest::Approx(std::log(0.005) + 53.0).epsilon(1e-12));
    CHECK(b.pivot == doctest::Approx(std::exp(b.log_pivot)).epsilon(1e-12));

    // Pivot grows monotonically in beta for fixed geometry.
    double prev = 0.0;
    for (double beta : {20.0, 40.0, 80.0}) {
        cert.beta = beta;
        cert.gamma = 1.0 - 0.39 - 0.08 - std::log(800.0) / beta;
        const double lp = mf_bounds(cert).log_pivot;
        CHECK(lp > prev);
        prev = lp;
    }

    cert.gamma = 0.05;  // <= 8 eps = 0.08
    CHECK_THROWS_AS(mf_bounds(cert), std::domain_error);
}

TEST_CASE("escape claim: collapsed caps hit T* immediately, bound monotone in c") {
    auto [config, cert] = gen_separated_measure(2, 2, 0.01, 60.0, 1, SeedSpec{43, 2},
                                                std::vector<Vec>{Vec{1, 0}, Vec{-1, 0}});
    // Single atoms per cap: V_q = 0 from the start.
    IntegratorSpec spec{Scheme::EulerProject, 0.01, 0.5, 10};
    const MfTrajectory traj =
        integrate_meanfield(AtomicMeasure::from_configuration(config), 60.0, spec, cert);
    const EscapeClaimReport rep = escape_claim_check(traj, cert, cert.gamma / 2.0);
    CHECK(rep.all_ok);
    for (const auto& cap : rep.caps) {
        REQUIRE(cap.T_star.has_value());
        CHECK(*cap.T_star == 0.0);
    }

    const EscapeClaimReport lo = escape_claim_check(traj, cert, 0.2);
    const EscapeClaimReport hi = escape_claim_check(traj, cert, 0.4);
    CHECK(hi.caps[0].bound > lo.caps[0].bound);
    CHECK_THROWS_AS(escape_claim_check(traj, cert, 0.05), std::invalid_argument);
}

TEST_CASE("eta decay inequality holds discretely along a short two-cap run") {
    const double beta = 30.0, eps = 0.01;
    auto [config, cert] = gen_separated_measure(2, 2, eps, beta, 20, SeedSpec{44, 2},
                                                std::vector<Vec>{Vec{1, 0}, Vec{-1, 0}});
    IntegratorSpec spec{Scheme::EulerProject, 1e-3, 5.0, 100};
    const MfTrajectory traj =
        integrate_meanfield(AtomicMeasure::from_configuration(config), beta, spec, cert);
    const double rate =
        double(cert.k()) * std::exp(-(1.0 - cert.alpha - 8.0 * eps) * beta);
    for (std::size_t i = 1; i < traj.records.size(); ++i) {
        const double dt = traj.records[i].t - traj.records[i - 1].t;
        for (std::size_t q = 0; q < cert.k(); ++q) {
            const double deta = traj.records[i].caps[q].eta - traj.records[i - 1].caps[q].eta;
            CHECK(deta / dt >= -rate - 1e-9);
        }
    }
}
