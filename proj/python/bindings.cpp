#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sattn/dynamics.hpp"
#include "sattn/energy.hpp"
#include "sattn/geometry.hpp"
#include "sattn/initgen.hpp"
#include "sattn/meanfield.hpp"
#include "sattn/metastability.hpp"
#include "sattn/renorm.hpp"
#include "sattn/scalar_oracles.hpp"

namespace py = pybind11;
using namespace sattn;

namespace {

Configuration make_configuration(const std::vector<Vec>& points,
                                 const std::optional<std::vector<double>>& weights) {
    Configuration c;
    c.dim = points.empty() ? 0 : points.front().size();
    c.points = points;
    c.weights = weights.value_or(std::vector<double>(points.size(), 1.0));
    c.validate();
    return c;
}

AngularConfiguration make_angular(const std::vector<double>& angles,
                                  const std::optional<std::vector<double>>& weights) {
    AngularConfiguration t = AngularConfiguration::from_angles(angles);
    if (weights) t.weights = *weights;
    return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "self-attention particle dynamics on the sphere";

    py::class_<Configuration>(m, "Configuration")
        .def(py::init(&make_configuration), py::arg("points"), py::arg("weights") = std::nullopt)
        .def_readonly("dim", &Configuration::dim)
        .def_readonly("points", &Configuration::points)
        .def_readonly("weights", &Configuration::weights)
        .def("__len__", &Configuration::size);

    py::class_<AngularConfiguration>(m, "AngularConfiguration")
        .def(py::init(&make_angular), py::arg("angles"), py::arg("weights") = std::nullopt)
        .def_readonly("angles", &AngularConfiguration::angles)
        .def_readonly("weights", &AngularConfiguration::weights)
        .def("__len__", &AngularConfiguration::size);

    py::class_<CapFamily>(m, "CapFamily")
        .def(py::init<std::vector<Vec>, double>(), py::arg("centers"), py::arg("eps"))
        .def_readonly("centers", &CapFamily::centers)
        .def_readonly("eps", &CapFamily::eps);

    m.def("project_tangent", &project_tangent, py::arg("x"), py::arg("y"));
    m.def("cap_membership", &cap_membership, py::arg("x"), py::arg("w"), py::arg("eps"));
    m.def("cap_alpha", &cap_alpha, py::arg("caps"));
    m.def("to_angles", &to_angles, py::arg("config"));
    m.def("from_angles", &from_angles, py::arg("theta"));

    py::class_<EnergyValue>(m, "EnergyValue")
        .def_readonly("raw", &EnergyValue::raw)
        .def_readonly("normalized", &EnergyValue::normalized);
    m.def("energy", py::overload_cast<const Configuration&, double>(&energy), py::arg("config"),
          py::arg("beta"));
    m.def("energy_angular", &energy_angular, py::arg("theta"), py::arg("beta"));
    m.def("grad_angular", &grad_angular, py::arg("theta"), py::arg("beta"));
    m.def("hessian_angular", &hessian_angular, py::arg("theta"), py::arg("beta"));
    m.def("sa_metric_hessian", &sa_metric_hessian, py::arg("theta"), py::arg("beta"));
    m.def(
        "hessian_quadratic_form",
        [](const AngularConfiguration& th, double beta, const Vec& v) {
            const QuadraticFormValue q = hessian_quadratic_form(th, beta, v);
            return py::make_tuple(q.direct, q.pairwise);
        },
        py::arg("theta"), py::arg("beta"), py::arg("v"));

    m.def("sa_velocity", &sa_velocity, py::arg("config"), py::arg("beta"));
    m.def("usa_velocity", &usa_velocity, py::arg("config"), py::arg("beta"));
    m.def("angular_usa_velocity", &angular_usa_velocity, py::arg("theta"), py::arg("beta"));

    py::class_<TraceRecord>(m, "TraceRecord")
        .def_readonly("t", &TraceRecord::t)
        .def_readonly("config", &TraceRecord::config)
        .def_readonly("energy_raw", &TraceRecord::energy_raw)
        .def_readonly("energy_normalized", &TraceRecord::energy_normalized)
        .def_readonly("grad_norm", &TraceRecord::grad_norm)
        .def_readonly("min_pair_dist", &TraceRecord::min_pair_dist);
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("records", &Trajectory::records)
        .def("__len__", &Trajectory::size);

    m.def(
        "integrate",
        [](const std::string& model, double beta, const Configuration& config,
           const std::string& scheme, double dt, double t_max, std::size_t cadence) {
            ModelKind mk(model == "sa" ? Model::SA : Model::USA, beta);
            IntegratorSpec spec{scheme == "rk4-project" ? Scheme::Rk4Project : Scheme::EulerProject,
                                dt, t_max, cadence};
            return integrate(mk, config, spec);
        },
        py::arg("model"), py::arg("beta"), py::arg("config"), py::arg("scheme") = "euler-project",
        py::arg("dt") = 0.01, py::arg("t_max") = 1.0, py::arg("cadence") = 1);

    py::class_<SeparationCertificate>(m, "SeparationCertificate")
        .def_readonly("caps", &SeparationCertificate::caps)
        .def_readonly("assignment", &SeparationCertificate::assignment)
        .def_readonly("alpha", &SeparationCertificate::alpha)
        .def_readonly("gamma", &SeparationCertificate::gamma)
        .def_readonly("beta", &SeparationCertificate::beta)
        .def_readonly("eps", &SeparationCertificate::eps);
    m.def("validate_separated", &validate_separated, py::arg("config"), py::arg("eps"),
          py::arg("beta"));
    m.def(
        "lambda_window",
        [](double beta, double eps, double alpha, std::size_t n) {
            const LambdaWindow w = lambda_window(beta, eps, alpha, n);
            return py::make_tuple(w.lo, w.hi);
        },
        py::arg("beta"), py::arg("eps"), py::arg("alpha"), py::arg("n"));
    m.def("theoretical_times", &theoretical_times, py::arg("cert"), py::arg("lambda_"));
    m.def("detect_escape", &detect_escape, py::arg("trajectory"), py::arg("cert"));
    m.def("detect_collapse", &detect_collapse, py::arg("trajectory"), py::arg("cert"),
          py::arg("lambda_"), py::arg("beta"));
    m.def("propagation_condition", &propagation_condition, py::arg("beta"), py::arg("delta"),
          py::arg("alpha"), py::arg("n"));

    m.def(
        "sample_uniform_sphere",
        [](std::size_t d, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
            return sample_uniform_sphere(d, n, SeedSpec{seed, stream});
        },
        py::arg("d"), py::arg("n"), py::arg("seed") = 0, py::arg("stream") = 0);
    m.def(
        "sample_gaussian_mixture",
        [](const std::vector<Vec>& centers, double sigma, std::size_t n, std::size_t d,
           std::uint64_t seed) {
            return sample_gaussian_mixture(MixtureSpec{centers, sigma}, n, d, SeedSpec{seed, 0});
        },
        py::arg("centers"), py::arg("sigma"), py::arg("n"), py::arg("d"), py::arg("seed") = 0);
    m.def(
        "mixture_condition",
        [](const std::vector<Vec>& centers, double sigma, std::size_t n, std::size_t d, double eps) {
            return mixture_condition(MixtureSpec{centers, sigma}, n, d, eps);
        },
        py::arg("centers"), py::arg("sigma"), py::arg("n"), py::arg("d"), py::arg("eps"));
    m.def("uniform_condition", &uniform_condition, py::arg("d"), py::arg("n"), py::arg("beta"));
    m.def(
        "gen_separated",
        [](std::size_t d, std::size_t n, std::size_t k, double eps, double beta,
           std::uint64_t seed) { return gen_separated(d, n, k, eps, beta, SeedSpec{seed, 1}); },
        py::arg("d"), py::arg("n"), py::arg("k"), py::arg("eps"), py::arg("beta"),
        py::arg("seed") = 0);
    m.def("gen_well_prepared", &gen_well_prepared, py::arg("n"), py::arg("c0"));
    m.def(
        "validate_well_prepared",
        [](const AngularConfiguration& theta, double beta, double c) {
            std::string why;
            const bool ok = validate_well_prepared(theta, beta, c, &why);
            return py::make_tuple(ok, why);
        },
        py::arg("theta"), py::arg("beta"), py::arg("c"));

    py::class_<ScalarOdeResult>(m, "ScalarOdeResult")
        .def_readonly("hitting_time", &ScalarOdeResult::hitting_time)
        .def_readonly("bound", &ScalarOdeResult::bound)
        .def_readonly("margin", &ScalarOdeResult::margin);
    m.def(
        "collapse_hitting_time",
        [](double u0, double beta, double c) { return collapse_hitting_time(u0, beta, c); },
        py::arg("u0"), py::arg("beta"), py::arg("c"));
    py::class_<ClusteringTimes>(m, "ClusteringTimes")
        .def_readonly("t_beta", &ClusteringTimes::t_beta)
        .def_readonly("T_beta", &ClusteringTimes::T_beta)
        .def_readonly("asym_displayed", &ClusteringTimes::asym_displayed)
        .def_readonly("asym_exact", &ClusteringTimes::asym_exact)
        .def_readonly("gap_bound", &ClusteringTimes::gap_bound);
    m.def(
        "clustering_timescale",
        [](double u0, double beta, double c, double K, double kappa) {
            return clustering_timescale(u0, beta, c, K, kappa);
        },
        py::arg("u0"), py::arg("beta"), py::arg("c"), py::arg("K") = 0.0, py::arg("kappa") = 1.0);

    m.def("merge_threshold", &merge_threshold, py::arg("beta"));
    m.def("phi_infinity", &phi_infinity, py::arg("n"), py::arg("i"));
    py::class_<MergeEvent>(m, "MergeEvent")
        .def_readonly("time", &MergeEvent::time)
        .def_readonly("indices", &MergeEvent::indices)
        .def_readonly("weight", &MergeEvent::weight)
        .def_readonly("position", &MergeEvent::position)
        .def_readonly("multi_merge", &MergeEvent::multi_merge);
    py::class_<StaircaseProfile>(m, "StaircaseProfile")
        .def_readonly("s", &StaircaseProfile::s)
        .def_readonly("energy_normalized", &StaircaseProfile::energy_normalized)
        .def_readonly("n_active", &StaircaseProfile::n_active)
        .def_readonly("min_admissible_gap", &StaircaseProfile::min_admissible_gap)
        .def_readonly("jump_times", &StaircaseProfile::jump_times)
        .def_readonly("merge_events", &StaircaseProfile::merge_events);
    m.def(
        "integrate_modified",
        [](const AngularConfiguration& theta0, double beta, double ds, double s_max) {
            RenormSpec spec;
            spec.ds = ds;
            spec.s_max = s_max;
            return integrate_modified(theta0, beta, spec);
        },
        py::arg("theta0"), py::arg("beta"), py::arg("ds") = 0.005, py::arg("s_max") = 400.0);
    m.def(
        "extract_staircase",
        [](const StaircaseProfile& p, double boundary_fraction) {
            const StaircaseLevels lv = extract_staircase(p, boundary_fraction);
            return py::make_tuple(lv.jump_times, lv.plateau_levels, lv.low_confidence);
        },
        py::arg("profile"), py::arg("boundary_fraction") = 0.1);

    py::class_<AtomicMeasure>(m, "AtomicMeasure")
        .def_static("from_configuration", &AtomicMeasure::from_configuration)
        .def_readonly("atoms", &AtomicMeasure::atoms)
        .def_readonly("masses", &AtomicMeasure::masses);
    m.def("meanfield_velocity", &meanfield_velocity, py::arg("mu"), py::arg("x"), py::arg("beta"));
}
