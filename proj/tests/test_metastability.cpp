#include <doctest.h>

#include <cmath>

#include "sattn/dynamics.hpp"
#include "sattn/initgen.hpp"
#include "sattn/metastability.hpp"

using namespace sattn;

namespace {
constexpr double kPi = 3.14159265358979323846;

Configuration circle_config(const std::vector<double>& angles) {
    return from_angles(AngularConfiguration::from_angles(angles));
}
}  // namespace

TEST_CASE("validate_separated: two caps at 0 and pi/2, beta = 100 accepted, beta = 5 refused") {
    // Tight clusters at the nominal centers, so the discovered cluster means
    // coincide with {0, pi/2} and alpha takes its closed-form value 0.390.
    const double half = 3.14159265358979323846 / 2.0;
    const Configuration config =
        circle_config({0.0, 1e-6, -1e-6, half, half + 1e-6});
    const SeparationCertificate cert = validate_separated(config, 0.01, 100.0);
    CHECK(cert.k() == 2);
    CHECK(cert.alpha == doctest::Approx(0.390).epsilon(2e-3));
    // gamma = 1 - alpha - 8 eps - log(2 n^2 / eps) / beta
    const double expected_gamma = 1.0 - cert.alpha - 0.08 - std::log(5000.0) / 100.0;
    CHECK(cert.gamma == doctest::Approx(expected_gamma).epsilon(1e-12));
    CHECK(cert.gamma == doctest::Approx(0.445).epsilon(2e-2));

    CHECK_THROWS_AS(validate_separated(config, 0.01, 5.0), std::domain_error);

    // Sampled caps move the discovered centers slightly; the certificate must
    // still validate with gamma in the same range.
    auto [sampled, sampled_cert] =
        gen_separated(2, 5, 2, 0.01, 100.0, SeedSpec{42, 1},
                      std::vector<Vec>{Vec{1, 0}, Vec{0, 1}});
    (void)sampled;
    CHECK(sampled_cert.gamma > 0.3);
    CHECK(sampled_cert.gamma < 0.6);
}

TEST_CASE("validate_separated: single tight cluster uses the alpha = -1 convention") {
    const Configuration c = circle_config({1.0, 1.001, 0.999, 1.0005});
    const double eps = 0.01, beta = 50.0;
    const SeparationCertificate cert = validate_separated(c, eps, beta);
    CHECK(cert.k() == 1);
    CHECK(cert.alpha == -1.0);
    CHECK(cert.gamma ==
          doctest::Approx(2.0 - 8.0 * eps - std::log(2.0 * 16.0 / eps) / beta).epsilon(1e-12));
}

TEST_CASE("validate_separated refuses out-of-range parameters") {
    const Configuration c = circle_config({0.0, kPi});
    CHECK_THROWS_AS(validate_separated(c, 0.2, 10.0), std::domain_error);
    CHECK_THROWS_AS(validate_separated(c, 0.01, 0.5), std::domain_error);
}

TEST_CASE("lambda window: frozen lower endpoint and ordering") {
    const LambdaWindow w = lambda_window(100.0, 0.01, 0.39, 5);
    CHECK(w.lo == doctest::Approx(std::log(12.5) / 100.0).epsilon(1e-12));
    CHECK(w.lo == doctest::Approx(0.02526).epsilon(1e-3));
    CHECK(w.hi > w.lo);
    CHECK_FALSE(w.empty());

    // The propagation branch stays above lambda_* across an accepted grid.
    for (double beta : {8.0, 12.0, 20.0, 50.0, 100.0})
        for (double eps : {0.005, 0.01, 0.03}) {
            for (double alpha : {-0.9, -0.5, 0.0, 0.39}) {
                const double gamma =
                    1.0 - alpha - 8.0 * eps - std::log(2.0 * 25.0 / eps) / beta;
                if (gamma <= 0.0) continue;
                const LambdaWindow ww = lambda_window(beta, eps, alpha, 5);
                CHECK(ww.hi > ww.lo);
            }
        }
}

TEST_CASE("theoretical times: frozen example and limits") {
    SeparationCertificate cert;
    cert.beta = 20.0;
    cert.eps = 0.01;
    cert.alpha = 0.1;
    cert.assignment.assign(3, 0);
    const auto [t1, t2] = theoretical_times(cert, 0.4);
    CHECK(t1 == doctest::Approx(98.4).epsilon(1e-2));
    CHECK(t2 == doctest::Approx(2.19e5).epsilon(1e-2));

    // lambda -> 0 leaves only the cap-collapse term.
    const auto [t1z, t2z] = theoretical_times(cert, 0.0);
    CHECK(t1z == doctest::Approx(6.0 * std::exp(1.6)).epsilon(1e-12));
    CHECK(t2z == t2);

    // T2/T1 blows up in beta for fixed geometry.
    double prev_ratio = 0.0;
    for (double beta : {10.0, 15.0, 20.0, 30.0}) {
        cert.beta = beta;
        const auto [a, b] = theoretical_times(cert, 0.4);
        CHECK(b / a > prev_ratio);
        prev_ratio = b / a;
    }

    cert.beta = 0.9;
    CHECK_THROWS_AS(theoretical_times(cert, 0.4), std::domain_error);
}

TEST_CASE("T1 bound sits below T2 bound for lambda inside the window") {
    auto [config, cert] = gen_separated(2, 5, 2, 0.01, 12.0, SeedSpec{5, 1},
                                        std::vector<Vec>{Vec{1, 0}, Vec{-1, 0}});
    (void)config;
    const LambdaWindow w = lambda_window(cert.beta, cert.eps, cert.alpha, cert.n());
    REQUIRE_FALSE(w.empty());
    for (double frac : {0.1, 0.5, 0.9}) {
        const double lambda = w.lo + frac * (w.hi - w.lo);
        const auto [t1, t2] = theoretical_times(cert, lambda);
        CHECK(t1 < t2);
    }
}

TEST_CASE("cap statistics") {
    SUBCASE("all members at the center") {
        const Configuration c = circle_config({0.0, 0.0, 0.0});
        const SeparationCertificate cert = validate_separated(c, 0.01, 30.0);
        const auto stats = cap_statistics(c, cert);
        REQUIRE(stats.size() == 1);
        CHECK(*stats[0].eta == doctest::Approx(1.0));
        CHECK(*stats[0].rho == doctest::Approx(1.0));
        CHECK(*stats[0].var == doctest::Approx(0.0));
    }
    SUBCASE("rho at the cap boundary, and the distance identity") {
        const double eps = 0.01;
        const double b = std::acos(1.0 - eps);
        const Configuration c = circle_config({b, kTwoPi - b});  // +-arccos(1-eps) around 0
        SeparationCertificate cert;
        cert.caps = CapFamily({Vec{1, 0}}, eps);
        cert.assignment = {0, 0};
        cert.beta = 30.0;
        cert.eps = eps;
        const auto stats = cap_statistics(c, cert);
        CHECK(*stats[0].rho == doctest::Approx(std::cos(2.0 * b)).epsilon(1e-12));
        // 1 - rho = (1/2) max pairwise squared distance
        CHECK(1.0 - *stats[0].rho ==
              doctest::Approx(0.5 * dist2(c.points[0], c.points[1])).epsilon(1e-12));
    }
}

namespace {

Trajectory synthetic_trajectory(const std::vector<std::pair<double, std::vector<double>>>& frames) {
    Trajectory t;
    for (const auto& [time, angles] : frames) {
        TraceRecord r;
        r.t = time;
        r.config = circle_config(angles);
        t.records.push_back(std::move(r));
    }
    return t;
}

}  // namespace

TEST_CASE("escape detector") {
    const Configuration c = circle_config({0.0, 0.01, kPi, kPi + 0.01});
    const SeparationCertificate cert = validate_separated(c, 0.005, 40.0);

    SUBCASE("static configuration never escapes") {
        Trajectory traj;
        for (int i = 0; i < 5; ++i) {
            TraceRecord r;
            r.t = i;
            r.config = c;
            traj.records.push_back(r);
        }
        CHECK_FALSE(detect_escape(traj, cert).has_value());
    }
    SUBCASE("teleported particle is caught at the first sample past the event") {
        Trajectory traj = synthetic_trajectory({{0.0, {0.0, 0.01, kPi, kPi + 0.01}},
                                                {5.0, {0.0, 0.01, kPi, kPi + 0.01}},
                                                {7.5, {1.5, 0.01, kPi, kPi + 0.01}},
                                                {10.0, {1.5, 0.01, kPi, kPi + 0.01}}});
        const auto t = detect_escape(traj, cert);
        REQUIRE(t.has_value());
        CHECK(*t == doctest::Approx(7.5));
    }
}

TEST_CASE("collapse detector keeps the sustained-condition semantics") {
    const double beta = 40.0, lambda = 0.4;
    const Configuration c0 = circle_config({0.0, 0.01, kPi, kPi + 0.01});
    const SeparationCertificate cert = validate_separated(c0, 0.005, beta);
    // Level 2 e^{-16}: gaps of 1e-4 rad are collapsed, 0.01 rad are not.
    const std::vector<double> wide{0.0, 0.01, kPi, kPi + 0.01};
    const std::vector<double> tight{0.0, 1e-4, kPi, kPi + 1e-4};

    SUBCASE("already collapsed reports the first sample") {
        const Trajectory traj = synthetic_trajectory({{0.0, tight}, {1.0, tight}, {2.0, tight}});
        const auto t = detect_collapse(traj, cert, lambda, beta);
        REQUIRE(t.has_value());
        CHECK(*t == doctest::Approx(0.0));
    }
    SUBCASE("a dip below the level does not count") {
        const Trajectory traj = synthetic_trajectory(
            {{0.0, wide}, {1.0, tight}, {2.0, wide}, {3.0, tight}, {4.0, tight}});
        const auto t = detect_collapse(traj, cert, lambda, beta);
        REQUIRE(t.has_value());
        CHECK(*t == doctest::Approx(3.0));
    }
    SUBCASE("never sustained reports absent") {
        const Trajectory traj = synthetic_trajectory({{0.0, wide}, {1.0, tight}, {2.0, wide}});
        CHECK_FALSE(detect_collapse(traj, cert, lambda, beta).has_value());
    }
}

TEST_CASE("observed escape respects the theorem lower bound") {
    // Slightly asymmetric antipodal pair at small beta: the unstable
    // equilibrium drifts and a particle leaves its safety cap within a
    // feasible horizon (around t ~ 9.6e3), far above the T2 bound (~17).
    const double beta = 4.0, eps = 0.03;
    const Configuration c = circle_config({0.02, kPi});
    const SeparationCertificate cert = validate_separated(c, eps, beta);
    CHECK(cert.gamma > 0.0);
    const double T2 = (eps / 2.0) * std::exp((1.0 - cert.alpha) * beta);
    IntegratorSpec spec{Scheme::EulerProject, 0.0025, 12000.0, 400};
    const Trajectory traj = integrate(ModelKind(Model::USA, beta), c, spec);
    const auto esc = detect_escape(traj, cert);
    REQUIRE(esc.has_value());
    CHECK(*esc >= T2);
    CHECK(*esc == doctest::Approx(9556.0).epsilon(0.02));
}

TEST_CASE("propagation condition") {
    // delta = e^{-lambda beta} with the accepted certificate parameters.
    CHECK(propagation_condition(100.0, std::exp(-3.0), 0.39, 5));
    // alpha -> 1: the right side dominates for any delta.
    CHECK_FALSE(propagation_condition(100.0, 0.5, 0.999999, 5));
    // delta at either end of (0, 1): the left side vanishes.
    CHECK_FALSE(propagation_condition(100.0, 1e-30, 0.39, 5));
    CHECK_FALSE(propagation_condition(100.0, 1.0 - 1e-14, 0.39, 5));
}

TEST_CASE("exploratory run reproduces the two-cluster metastable plateau") {
    // d = 2, n = 5, beta = 4, Euler dt = 0.1 from uniform initial data: a
    // (2,3) split forms within t ~ 50 and the normalized energy then sits at
    // the two-cluster level (2^2 + 3^2)/25 = 0.52 for hundreds of time units
    // (the global maximum 1 is only approached on far longer horizons).
    const Configuration init = sample_uniform_sphere(2, 5, SeedSpec{1, 20});
    IntegratorSpec spec{Scheme::EulerProject, 0.1, 400.0, 10};
    const Trajectory traj = integrate(ModelKind(Model::SA, 4.0), init, spec);

    auto clusters_at = [&](double t) {
        const TraceRecord* r = &traj.records.front();
        for (const auto& rec : traj.records)
            if (rec.t <= t) r = &rec;
        std::vector<int> lab(5, -1);
        int k = 0;
        for (int i = 0; i < 5; ++i) {
            if (lab[i] >= 0) continue;
            lab[i] = k;
            for (int j = i + 1; j < 5; ++j)
                if (unit_angle(r->config.points[i], r->config.points[j]) < 0.3) lab[j] = lab[i];
            ++k;
        }
        return k;
    };
    CHECK(clusters_at(50.0) == 2);
    CHECK(clusters_at(400.0) == 2);

    double e50 = 0.0, e400 = 0.0;
    for (const TraceRecord& r : traj.records) {
        if (r.t <= 50.0) e50 = r.energy_normalized;
        e400 = r.energy_normalized;
    }
    CHECK(e50 == doctest::Approx(0.52).epsilon(5e-3));
    CHECK(std::abs(e400 - e50) < 1e-3);  // still trapped at the plateau
}

TEST_CASE("within-cap proof inequalities hold discretely along a short run") {
    const double beta = 10.0, eps = 0.01;
    auto [config, cert] = gen_separated(2, 4, 2, eps, beta, SeedSpec{9, 1},
                                        std::vector<Vec>{Vec{1, 0}, Vec{-1, 0}});
    IntegratorSpec spec{Scheme::EulerProject, 1e-3, 20.0, 50};
    const Trajectory traj = integrate(ModelKind(Model::SA, beta), config, spec);
    const double far = std::exp(-(1.0 - cert.alpha) * beta);
    const double n = double(cert.n());

    // eta_q(t) >= 1 - eps - n t e^{-(1-alpha) beta} before escape.
    for (const TraceRecord& r : traj.records) {
        const auto stats = cap_statistics(r.config, cert);
        for (const CapStats& s : stats) {
            if (!s.eta) continue;
            CHECK(*s.eta >= 1.0 - eps - n * r.t * far - 1e-12);
        }
    }

    // Discrete rho_q derivative against the differential inequality, with
    // finite-difference slack.
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const auto prev = cap_statistics(traj.records[i - 1].config, cert);
        const auto cur = cap_statistics(traj.records[i].config, cert);
        const double dt = traj.records[i].t - traj.records[i - 1].t;
        for (std::size_t q = 0; q < prev.size(); ++q) {
            if (!prev[q].rho || !cur[q].rho) continue;
            const double rho = *prev[q].rho;
            const double rhs =
                (2.0 / n) * rho * (1.0 - rho) * std::exp(beta * (rho - 1.0)) - 2.0 * n * far;
            const double lhs = (*cur[q].rho - rho) / dt;
            CHECK(lhs >= rhs - 0.05 * std::abs(rhs) - 1e-6);
        }
    }
}
