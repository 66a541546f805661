#include "sattn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sattn/dynamics.hpp"
#include "sattn/energy.hpp"
#include "sattn/initgen.hpp"
#include "sattn/io.hpp"
#include "sattn/meanfield.hpp"
#include "sattn/metastability.hpp"
#include "sattn/renorm.hpp"
#include "sattn/scalar_oracles.hpp"

namespace sattn::exp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require_fields(const json& j, const std::string& where,
                    const std::vector<std::string>& allowed) {
    if (!j.is_object()) throw std::invalid_argument(where + ": object expected");
    for (const auto& item : j.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw std::invalid_argument(where + ": unknown field '" + item.key() + "'");
}

IntegratorSpec integrator_from(const json& cfg, const IntegratorSpec& defaults) {
    IntegratorSpec spec = defaults;
    if (!cfg.contains("integrator")) return spec;
    const json& j = cfg.at("integrator");
    require_fields(j, "integrator", {"scheme", "dt", "t_max", "cadence"});
    if (j.contains("scheme")) {
        const std::string s = j.at("scheme").get<std::string>();
        if (s == "euler-project")
            spec.scheme = Scheme::EulerProject;
        else if (s == "rk4-project")
            spec.scheme = Scheme::Rk4Project;
        else
            throw std::invalid_argument("integrator.scheme: '" + s + "' is not a scheme");
    }
    if (j.contains("dt")) spec.dt = j.at("dt").get<double>();
    if (j.contains("t_max")) spec.t_max = j.at("t_max").get<double>();
    if (j.contains("cadence")) spec.cadence = j.at("cadence").get<std::size_t>();
    spec.validate();
    return spec;
}

Model model_from(const json& cfg) {
    const std::string m = cfg.at("model").get<std::string>();
    if (m == "sa") return Model::SA;
    if (m == "usa") return Model::USA;
    throw std::invalid_argument("model: '" + m + "' is not a model (sa|usa)");
}

std::vector<Vec> centers_from_angles(const std::vector<double>& angles) {
    std::vector<Vec> centers;
    centers.reserve(angles.size());
    for (double a : angles) centers.push_back(Vec{std::cos(a), std::sin(a)});
    return centers;
}

double wall_seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Configuration build_initial_configuration(const json& init, std::size_t dim, double beta) {
    require_fields(init, "init",
                   {"kind", "n", "k", "r", "seed", "eps", "sigma", "c0", "atoms_per_cap",
                    "center_angles"});
    const std::string kind = init.at("kind").get<std::string>();
    const SeedSpec seed{init.value("seed", std::uint64_t(0)), 0};
    if (kind == "uniform") {
        return sample_uniform_sphere(dim, init.at("n").get<std::size_t>(), seed);
    }
    if (kind == "separated") {
        std::optional<std::vector<Vec>> centers;
        if (init.contains("center_angles"))
            centers = centers_from_angles(init.at("center_angles").get<std::vector<double>>());
        auto [config, cert] =
            gen_separated(dim, init.at("n").get<std::size_t>(), init.at("k").get<std::size_t>(),
                          init.at("eps").get<double>(), beta, seed, centers);
        (void)cert;
        return config;
    }
    if (kind == "gaussian-mixture") {
        const auto r = init.at("r").get<std::size_t>();
        MixtureSpec spec;
        spec.sigma = init.at("sigma").get<double>();
        if (init.contains("center_angles"))
            spec.centers = centers_from_angles(init.at("center_angles").get<std::vector<double>>());
        else
            for (std::size_t q = 0; q < r; ++q) {
                Vec w(dim, 0.0);
                const double a = kTwoPi * double(q) / double(r);
                w[0] = std::cos(a);
                w[1] = std::sin(a);
                spec.centers.push_back(std::move(w));
            }
        return sample_gaussian_mixture(spec, init.at("n").get<std::size_t>(), dim, seed);
    }
    if (kind == "well-prepared") {
        return from_angles(
            gen_well_prepared(init.at("n").get<std::size_t>(), init.at("c0").get<double>()));
    }
    if (kind == "separated-measure") {
        auto [config, cert] = gen_separated_measure(
            dim, init.at("k").get<std::size_t>(), init.at("eps").get<double>(), beta,
            init.at("atoms_per_cap").get<std::size_t>(), seed);
        (void)cert;
        return config;
    }
    throw std::invalid_argument("init.kind: '" + kind + "' is not an initialization kind");
}

json load_config(const fs::path& path) {
    json cfg;
    try {
        cfg = json::parse(io::read_file(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error: " + std::string(e.what()));
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const json& cfg) {
    if (!cfg.is_object() || !cfg.contains("schema_version"))
        throw std::invalid_argument("config: schema_version is required");
    if (cfg.at("schema_version").get<int>() != 1)
        throw std::invalid_argument("config: unsupported schema_version");
    const std::string kind = cfg.value("kind", "simulate");
    if (kind == "simulate") {
        require_fields(cfg, "config",
                       {"schema_version", "kind", "model", "beta", "dim", "integrator", "init",
                        "caps", "out_dir"});
        if (cfg.contains("caps")) require_fields(cfg.at("caps"), "caps", {"eps", "lambda"});
    } else if (kind == "metastability") {
        require_fields(cfg, "config",
                       {"schema_version", "kind", "model", "beta", "dim", "n", "k", "eps",
                        "center_separation", "seeds", "integrator", "horizon_factor", "lambda",
                        "out_dir"});
    } else if (kind == "staircase") {
        require_fields(cfg, "config",
                       {"schema_version", "kind", "n", "c0", "beta_list", "ds", "s_max",
                        "well_prepared_c", "out_dir"});
    } else if (kind == "meanfield") {
        require_fields(cfg, "config",
                       {"schema_version", "kind", "beta", "dim", "k", "eps", "atoms_per_cap",
                        "seed", "integrator", "t_max", "out_dir"});
    } else {
        throw std::invalid_argument("config.kind: '" + kind + "' is not a run kind");
    }
}

fs::path resolve_out_dir(const json& cfg, const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (cfg.contains("out_dir")) return cfg.at("out_dir").get<std::string>();
    if (const char* env = std::getenv("SATTN_OUT_DIR")) return env;
    return ".";
}

void write_manifest(const json& cfg, const RunResult& result, const fs::path& out_dir,
                    double wall_clock_sec) {
    json m;
    m["config_hash"] = io::fnv1a_hex(cfg.dump());
    m["code_version"] = kCodeVersion;
    json seeds = json::array();
    if (cfg.contains("seeds"))
        seeds = cfg.at("seeds");
    else if (cfg.contains("init") && cfg.at("init").contains("seed"))
        seeds.push_back(cfg.at("init").at("seed"));
    else if (cfg.contains("seed"))
        seeds.push_back(cfg.at("seed"));
    m["seeds"] = seeds;
    json outs = json::array();
    for (const fs::path& p : result.outputs) outs.push_back(p.string());
    m["outputs"] = outs;
    m["wall_clock_sec"] = wall_clock_sec;
    m["pass"] = result.pass;
    m["notes"] = result.notes;
    io::atomic_write(out_dir / "manifest.json", m.dump(2) + "\n");
}

RunResult run_simulate(const json& cfg, const fs::path& out_dir) {
    const double beta = cfg.at("beta").get<double>();
    const ModelKind model(model_from(cfg), beta);
    const auto dim = cfg.value("dim", std::size_t(2));
    const IntegratorSpec spec = integrator_from(cfg, {Scheme::EulerProject, 0.1, 100.0, 10});
    const Configuration init = build_initial_configuration(cfg.at("init"), dim, beta);

    std::optional<SeparationCertificate> cert;
    if (cfg.contains("caps")) cert = validate_separated(init, cfg.at("caps").at("eps").get<double>(), beta);

    const Trajectory traj = integrate(model, init, spec);

    RunResult res;
    const fs::path trace = out_dir / "trace.csv";
    io::atomic_write(trace, io::trajectory_csv(traj, cert ? &*cert : nullptr));
    res.outputs.push_back(trace);
    const fs::path init_doc = out_dir / "init.json";
    io::atomic_write(init_doc, io::configuration_to_json(init));
    res.outputs.push_back(init_doc);
    return res;
}

RunResult emit_plot_data(const std::string& figure, const json& cfg, const fs::path& out_dir) {
    RunResult res;
    std::ostringstream out;
    if (figure == "trajectory") {
        const double beta = cfg.at("beta").get<double>();
        const ModelKind model(model_from(cfg), beta);
        const auto dim = cfg.value("dim", std::size_t(2));
        const IntegratorSpec spec = integrator_from(cfg, {Scheme::EulerProject, 0.1, 100.0, 10});
        const Configuration init = build_initial_configuration(cfg.at("init"), dim, beta);
        const Trajectory traj = integrate(model, init, spec);
        out << "t,series,value\n";
        for (const TraceRecord& r : traj.records) {
            const std::string t = io::fmt_double(r.t);
            out << t << ",energy," << io::fmt_double(r.energy_raw) << "\n";
            out << t << ",energy_normalized," << io::fmt_double(r.energy_normalized) << "\n";
            out << t << ",grad_norm," << io::fmt_double(r.grad_norm) << "\n";
            out << t << ",min_pair_dist," << io::fmt_double(r.min_pair_dist) << "\n";
            if (dim == 2) {
                const AngularConfiguration th = to_angles(r.config);
                for (std::size_t i = 0; i < th.size(); ++i)
                    out << t << ",angle_" << i << ',' << io::fmt_double(th.angles[i]) << "\n";
            }
        }
    } else if (figure == "staircase") {
        const auto n = cfg.at("n").get<std::size_t>();
        const double c0 = cfg.at("c0").get<double>();
        const auto betas = cfg.at("beta_list").get<std::vector<double>>();
        out << "beta,s,series,value\n";
        for (double beta : betas) {
            RenormSpec rs;
            rs.ds = cfg.value("ds", 0.005);
            rs.s_max = cfg.value("s_max", 400.0);
            auto [prof, fs2] = integrate_modified(gen_well_prepared(n, c0), beta, rs);
            (void)fs2;
            const std::string b = io::fmt_double(beta);
            for (std::size_t i = 0; i < prof.s.size(); ++i) {
                const std::string t = io::fmt_double(prof.s[i]);
                out << b << ',' << t << ",energy_normalized,"
                    << io::fmt_double(prof.energy_normalized[i]) << "\n";
                out << b << ',' << t << ",n_active," << prof.n_active[i] << "\n";
                out << b << ',' << t << ",min_admissible_gap,"
                    << io::fmt_double(prof.min_admissible_gap[i]) << "\n";
            }
        }
    } else {
        throw std::invalid_argument("plot-data: unknown figure '" + figure + "'");
    }
    const fs::path path = out_dir / (figure + "_long.csv");
    io::atomic_write(path, out.str());
    res.outputs.push_back(path);
    return res;
}

namespace {

/// One seeded two-cap metastability run on S^1; shared by run_metastability
/// and the quantitative bound checks.
struct TwoCapOutcome {
    SeparationCertificate cert;
    MetastabilityReport report;
    Trajectory traj;
    Model model = Model::USA;
};

TwoCapOutcome two_cap_run(Model model, double beta, std::size_t n, double eps,
                          double center_separation, std::uint64_t seed, double horizon_factor,
                          std::optional<double> lambda_override = std::nullopt,
                          std::optional<IntegratorSpec> spec_override = std::nullopt) {
    const std::vector<Vec> centers =
        centers_from_angles({0.0, center_separation});
    auto [config, cert] = gen_separated(2, n, 2, eps, beta, SeedSpec{seed, 1}, centers);

    const LambdaWindow win = lambda_window(beta, eps, cert.alpha, n);
    if (win.empty()) throw std::domain_error("two_cap_run: empty lambda window");
    const double lambda = lambda_override.value_or(win.mid());
    const auto [T1, T2] = theoretical_times(cert, lambda);

    IntegratorSpec spec;
    if (spec_override) {
        spec = *spec_override;
    } else {
        // dt <= 0.01/beta resolves the stiff near-collapse contraction.
        spec.scheme = Scheme::EulerProject;
        spec.dt = std::min(0.01, 0.01 / beta);
        spec.t_max = horizon_factor * T1 + 50.0;
        spec.cadence = 25;
    }

    TwoCapOutcome out;
    out.model = model;
    out.traj = integrate(ModelKind(model, beta), config, spec);
    out.cert = cert;

    MetastabilityReport& rep = out.report;
    rep.lambda_window = win;
    rep.lambda = lambda;
    rep.T1_bound = T1;
    rep.T2_bound = T2;
    rep.stick_level = 2.0 * std::exp(-lambda * beta);
    rep.horizon = spec.t_max;
    rep.T_escape_empirical = detect_escape(out.traj, cert);
    rep.T_collapse_empirical = detect_collapse(out.traj, cert, lambda, beta);

    // Escape lower bound is one-sided: only an escape seen before T2 fails it.
    rep.containment_ok = !rep.T_escape_empirical || *rep.T_escape_empirical >= T2;
    rep.collapse_ok = rep.T_collapse_empirical && *rep.T_collapse_empirical <= T1;

    // Sticking: from the detected collapse to escape (or horizon), every
    // sample satisfies the level.  detect_collapse enforces this by
    // construction; re-scan explicitly so the report stands on its own.
    rep.stick_ok = false;
    if (rep.T_collapse_empirical) {
        rep.stick_ok = true;
        const double t0 = *rep.T_collapse_empirical;
        const double t1 = rep.T_escape_empirical ? *rep.T_escape_empirical : rep.horizon + 1.0;
        for (const TraceRecord& r : out.traj.records) {
            if (r.t < t0 || r.t >= t1) continue;
            const auto stats = cap_statistics(r.config, cert);
            for (const CapStats& s : stats)
                if (s.rho && 2.0 * (1.0 - *s.rho) > rep.stick_level) rep.stick_ok = false;
        }
    }
    rep.pass = rep.containment_ok && rep.collapse_ok && rep.stick_ok;
    return out;
}

json metastability_report_json(const TwoCapOutcome& out) {
    json j;
    j["model"] = out.model == Model::SA ? "sa" : "usa";
    // Sampling cadence bounds what the detectors can resolve; detected times
    // carry a +- one-sample uncertainty of this size.
    if (out.traj.size() > 1)
        j["detection_resolution"] = out.traj.records[1].t - out.traj.records[0].t;
    j["lambda_window"] = {out.report.lambda_window.lo, out.report.lambda_window.hi};
    j["lambda"] = out.report.lambda;
    j["T1_bound"] = out.report.T1_bound;
    j["T2_bound"] = out.report.T2_bound;
    j["stick_level"] = out.report.stick_level;
    j["horizon"] = out.report.horizon;
    if (out.report.T_escape_empirical)
        j["T_escape_empirical"] = *out.report.T_escape_empirical;
    else
        j["T_escape_empirical"] = "not observed within horizon";
    if (out.report.T_collapse_empirical)
        j["T_collapse_empirical"] = *out.report.T_collapse_empirical;
    else
        j["T_collapse_empirical"] = "not observed within horizon";
    j["containment_ok"] = out.report.containment_ok;
    j["collapse_ok"] = out.report.collapse_ok;
    j["stick_ok"] = out.report.stick_ok;
    j["pass"] = out.report.pass;
    j["certificate"] = json::parse(io::certificate_to_json(out.cert));
    return j;
}

}  // namespace

RunResult run_metastability(const json& cfg, const fs::path& out_dir, std::size_t workers) {
    const Model model = model_from(cfg);
    const double beta = cfg.at("beta").get<double>();
    const auto n = cfg.at("n").get<std::size_t>();
    const double eps = cfg.at("eps").get<double>();
    const double sep = cfg.value("center_separation", 3.14159265358979323846);
    const double horizon_factor = cfg.value("horizon_factor", 3.0);
    const std::vector<std::uint64_t> seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
    std::optional<double> lambda_override;
    if (cfg.contains("lambda") && cfg.at("lambda").is_number())
        lambda_override = cfg.at("lambda").get<double>();

    std::vector<TwoCapOutcome> outcomes(seeds.size());
    std::vector<std::string> failures(seeds.size());
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            try {
                outcomes[i] = two_cap_run(model, beta, n, eps, sep, seeds[i], horizon_factor,
                                          lambda_override);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                failures[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < std::max<std::size_t>(workers, 1); ++w)
        pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    for (std::size_t i = 0; i < seeds.size(); ++i)
        if (!failures[i].empty())
            throw std::domain_error("seed " + std::to_string(seeds[i]) + ": " + failures[i]);

    RunResult res;
    json summary = json::array();
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        json j = metastability_report_json(outcomes[i]);
        j["seed"] = seeds[i];
        const fs::path rp = out_dir / ("metastability_seed" + std::to_string(seeds[i]) + ".json");
        io::atomic_write(rp, j.dump(2) + "\n");
        res.outputs.push_back(rp);
        summary.push_back(std::move(j));
        if (!outcomes[i].report.pass) res.pass = false;
        res.notes.push_back("seed " + std::to_string(seeds[i]) + ": " +
                            (outcomes[i].report.pass ? "PASS" : "FAIL"));
    }
    const fs::path sp = out_dir / "metastability_summary.json";
    io::atomic_write(sp, summary.dump(2) + "\n");
    res.outputs.push_back(sp);
    return res;
}

namespace {

struct StaircaseOutcome {
    double beta = 0.0;
    StaircaseProfile profile;
    StaircaseLevels levels;
    double mean_abs_error = 0.0;  // vs phi_infinity over all plateaus
    std::size_t merges = 0;
};

StaircaseOutcome staircase_run(std::size_t n, double c0, double beta, double ds, double s_max) {
    StaircaseOutcome out;
    out.beta = beta;
    const AngularConfiguration ladder = gen_well_prepared(n, c0);
    RenormSpec spec;
    spec.ds = ds;
    spec.s_max = s_max;
    auto [profile, final_state] = integrate_modified(ladder, beta, spec);
    (void)final_state;
    out.profile = std::move(profile);
    out.levels = extract_staircase(out.profile);
    out.merges = out.profile.merge_events.size();
    double err = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < out.levels.plateau_levels.size() && i < n; ++i) {
        if (std::isnan(out.levels.plateau_levels[i])) continue;
        err += std::abs(out.levels.plateau_levels[i] - phi_infinity(n, i));
        ++cnt;
    }
    out.mean_abs_error = cnt ? err / double(cnt) : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace

RunResult run_staircase(const json& cfg, const fs::path& out_dir) {
    const auto n = cfg.at("n").get<std::size_t>();
    const double c0 = cfg.at("c0").get<double>();
    const auto betas = cfg.at("beta_list").get<std::vector<double>>();
    const double ds = cfg.value("ds", 0.005);
    const double s_max = cfg.value("s_max", 400.0);
    const double wp_c = cfg.value("well_prepared_c", 1.5);

    RunResult res;
    std::ostringstream table;
    table << "beta,plateau_index,level,phi_infinity,abs_error,low_confidence\n";
    std::vector<double> errors;
    json summary;
    summary["runs"] = json::array();

    const AngularConfiguration ladder = gen_well_prepared(n, c0);
    for (double beta : betas) {
        std::string why;
        const bool wp = validate_well_prepared(ladder, beta, wp_c, &why);

        const StaircaseOutcome out = staircase_run(n, c0, beta, ds, s_max);
        const std::string tag = io::fmt_double(beta);
        const fs::path prof_path = out_dir / ("staircase_beta" + tag + ".csv");
        io::atomic_write(prof_path, io::staircase_csv(out.profile));
        res.outputs.push_back(prof_path);
        const fs::path ev_path = out_dir / ("staircase_beta" + tag + "_events.json");
        io::atomic_write(ev_path, io::merge_events_json(out.profile));
        res.outputs.push_back(ev_path);

        for (std::size_t i = 0; i < out.levels.plateau_levels.size() && i < n; ++i)
            table << tag << ',' << i << ',' << io::fmt_double(out.levels.plateau_levels[i]) << ','
                  << io::fmt_double(phi_infinity(n, i)) << ','
                  << io::fmt_double(std::abs(out.levels.plateau_levels[i] - phi_infinity(n, i)))
                  << ',' << (out.levels.low_confidence[i] ? 1 : 0) << "\n";
        errors.push_back(out.mean_abs_error);

        json run;
        run["beta"] = beta;
        run["merge_events"] = out.merges;
        run["mean_abs_error"] = out.mean_abs_error;
        run["well_prepared_at_this_beta"] = wp;
        if (!wp) run["well_prepared_note"] = why;
        summary["runs"].push_back(std::move(run));
        if (out.merges != n - 1) res.pass = false;
    }

    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i)
        if (!(errors[i + 1] < errors[i])) decreasing = false;
    summary["plateau_error_decreasing_in_beta"] = decreasing;
    if (!decreasing) res.pass = false;

    const fs::path tbl = out_dir / "staircase_levels.csv";
    io::atomic_write(tbl, table.str());
    res.outputs.push_back(tbl);
    const fs::path sp = out_dir / "staircase_summary.json";
    io::atomic_write(sp, summary.dump(2) + "\n");
    res.outputs.push_back(sp);
    return res;
}

namespace {

struct MfOutcome {
    SeparationCertificate cert;
    MfTrajectory traj;
    MfBounds bounds;
    double lambda = 0.0;
    double level = 0.0;
    std::optional<double> T1_emp;  // first sample with all V_q <= level
    bool support_ok = true;
    bool variance_ok = true;  // V_q <= level sustained on [T1_emp, horizon]
    bool pass = false;
};

MfOutcome meanfield_run(double beta, std::size_t k, double eps, std::size_t atoms_per_cap,
                        std::uint64_t seed, const IntegratorSpec& spec) {
    auto [config, cert] = gen_separated_measure(2, k, eps, beta, atoms_per_cap, SeedSpec{seed, 2});
    MfOutcome out;
    out.cert = cert;
    out.bounds = mf_bounds(cert);
    out.lambda = cert.gamma / 2.0;
    out.level = std::exp(-out.lambda * beta);
    out.traj = integrate_meanfield(AtomicMeasure::from_configuration(config), beta, spec, cert);

    for (const MfTraceRecord& r : out.traj.records) {
        bool all_small = true;
        for (const MfCapRecord& c : r.caps) {
            if (!c.support_ok) out.support_ok = false;
            if (c.var > out.level) all_small = false;
        }
        if (all_small && !out.T1_emp) out.T1_emp = r.t;
        if (!all_small && out.T1_emp) out.variance_ok = false;
    }
    if (!out.T1_emp) out.variance_ok = false;
    out.pass = out.support_ok && out.variance_ok;
    return out;
}

}  // namespace

RunResult run_meanfield(const json& cfg, const fs::path& out_dir) {
    const double beta = cfg.at("beta").get<double>();
    const auto k = cfg.at("k").get<std::size_t>();
    const double eps = cfg.at("eps").get<double>();
    const auto atoms = cfg.at("atoms_per_cap").get<std::size_t>();
    const auto seed = cfg.value("seed", std::uint64_t(0));
    IntegratorSpec spec = integrator_from(cfg, {Scheme::EulerProject, 2.5e-3, 60.0, 200});
    if (cfg.contains("t_max")) spec.t_max = cfg.at("t_max").get<double>();

    const MfOutcome out = meanfield_run(beta, k, eps, atoms, seed, spec);

    RunResult res;
    res.pass = out.pass;
    const fs::path trace = out_dir / "meanfield_trace.csv";
    io::atomic_write(trace, io::meanfield_csv(out.traj));
    res.outputs.push_back(trace);

    json j;
    j["log_pivot"] = out.bounds.log_pivot;
    j["pivot"] = std::isfinite(out.bounds.pivot) ? json(out.bounds.pivot)
                                                 : json("overflow (see log_pivot)");
    j["lambda"] = out.lambda;
    j["variance_level"] = out.level;
    j["horizon"] = spec.t_max;
    j["verified_up_to_horizon"] = out.pass;
    j["support_ok"] = out.support_ok;
    j["variance_ok"] = out.variance_ok;
    if (out.T1_emp) j["T1_empirical"] = *out.T1_emp;
    j["certificate"] = json::parse(io::certificate_to_json(out.cert));
    const fs::path sp = out_dir / "meanfield_summary.json";
    io::atomic_write(sp, j.dump(2) + "\n");
    res.outputs.push_back(sp);
    res.notes.push_back(out.pass ? "meanfield checks verified up to horizon"
                                 : "meanfield checks FAILED");
    return res;
}

// ---------------------------------------------------------------------------
// Quantitative criteria
// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

CriterionResult finish(int id, const std::string& name, bool pass, const std::string& detail,
                       const Clock::time_point& t0) {
    return {id, name, pass, detail, wall_seconds(t0)};
}

// 1. Analytic gradient vs central differences; Hessian quadratic form vs the
//    pairwise Laplacian identity.
CriterionResult criterion_gradients() {
    const auto t0 = Clock::now();
    CounterRng rng(101, 0);
    double worst_grad = 0.0, worst_quad = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(9);  // n <= 10
        const double beta = rng.uniform(1.0, 20.0);
        // Angles drawn inside a beta-scaled arc (random phase): spreads wide
        // enough to exercise every term, narrow enough that the gradient does
        // not vanish to the rounding floor of the finite-difference oracle.
        const double arc = std::min(1.2, std::sqrt(6.0 / beta));
        const double phase = rng.uniform(0.0, kTwoPi);
        std::vector<double> angles(n);
        for (double& a : angles) a = phase + rng.uniform(0.0, arc);
        const AngularConfiguration th = AngularConfiguration::from_angles(angles);

        const Vec g = grad_angular(th, beta);
        Vec g_fd(n, 0.0);
        const double h = 1e-6;
        for (std::size_t i = 0; i < n; ++i) {
            AngularConfiguration tp = th, tm = th;
            tp.angles[i] += h;
            tm.angles[i] -= h;
            g_fd[i] = (energy_angular(tp, beta).raw - energy_angular(tm, beta).raw) / (2.0 * h);
        }
        Vec diff = g_fd;
        axpy(-1.0, g, diff);
        worst_grad = std::max(worst_grad, norm(diff) / norm(g));

        Vec v(n);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        const QuadraticFormValue q = hessian_quadratic_form(th, beta, v);
        worst_quad = std::max(worst_quad, std::abs(q.direct - q.pairwise));
    }
    const bool pass = worst_grad < 1e-6 && worst_quad < 1e-10;
    std::ostringstream d;
    d << "max grad rel err " << worst_grad << ", max quad-form gap " << worst_quad;
    return finish(1, "gradient/hessian correctness", pass, d.str(), t0);
}

// 2. Normalized energy nondecreasing within 10 dt^2 per step, SA and USA.
CriterionResult criterion_lyapunov() {
    const auto t0 = Clock::now();
    const double dt = 0.01, slack = 10.0 * dt * dt;
    std::size_t runs = 0;
    double worst_drop = 0.0;
    bool pass = true;
    for (Model model : {Model::SA, Model::USA})
        for (std::size_t d : {2, 3})
            for (std::size_t n : {4, 8})
                for (double beta : {2.0, 4.0, 8.0}) {
                    if (runs >= 20) break;
                    ++runs;
                    const Configuration init =
                        sample_uniform_sphere(d, n, SeedSpec{runs, 7});
                    IntegratorSpec spec{Scheme::EulerProject, dt, 50.0, 1};
                    const Trajectory traj = integrate(ModelKind(model, beta), init, spec);
                    for (std::size_t i = 1; i < traj.size(); ++i) {
                        const double drop = traj.records[i - 1].energy_normalized -
                                            traj.records[i].energy_normalized;
                        worst_drop = std::max(worst_drop, drop);
                        if (drop > slack) pass = false;
                    }
                }
    std::ostringstream det;
    det << runs << " runs, worst per-step drop " << worst_drop << " (slack " << slack << ")";
    return finish(2, "Lyapunov monotonicity", pass, det.str(), t0);
}

// Deterministic parameter draws for the two-cap bound checks; resamples until
// 20 certificates are accepted.
std::vector<TwoCapOutcome> bound_check_runs() {
    std::vector<TwoCapOutcome> outcomes;
    std::uint64_t attempt = 0;
    while (outcomes.size() < 20 && attempt < 200) {
        CounterRng rng(500 + attempt, 4);
        const double beta = rng.uniform(8.0, 15.0);
        const double eps = rng.uniform(0.005, 0.02);
        const double sep = rng.uniform(2.4, 3.14159265358979323846);
        const std::size_t n = 4 + rng.below(3);
        const Model model = (attempt % 2 == 0) ? Model::USA : Model::SA;
        ++attempt;
        try {
            outcomes.push_back(two_cap_run(model, beta, n, eps, sep, attempt, 3.0));
        } catch (const std::domain_error&) {
            continue;  // refused certificate; draw again
        }
    }
    return outcomes;
}

CriterionResult criterion_escape_collapse(std::vector<TwoCapOutcome>& cache) {
    const auto t0 = Clock::now();
    if (cache.empty()) cache = bound_check_runs();
    bool pass = cache.size() == 20;
    std::size_t escapes_seen = 0;
    for (const TwoCapOutcome& out : cache) {
        if (!out.report.containment_ok || !out.report.collapse_ok) pass = false;
        if (out.report.T_escape_empirical) ++escapes_seen;
    }
    std::ostringstream d;
    d << cache.size() << " certificates, escapes observed in horizon: " << escapes_seen
      << ", all collapse times within T1 bound and no escape before T2 bound: "
      << (pass ? "yes" : "NO");
    return finish(3, "Theorem bounds on escape/collapse", pass, d.str(), t0);
}

CriterionResult criterion_stick(std::vector<TwoCapOutcome>& cache) {
    const auto t0 = Clock::now();
    if (cache.empty()) cache = bound_check_runs();
    bool pass = cache.size() == 20;
    for (const TwoCapOutcome& out : cache)
        if (!out.report.stick_ok) pass = false;
    return finish(4, "sticking level within caps", pass,
                  "max within-cap pairwise dist^2 <= 2 e^{-lambda beta} on [T1_emp, horizon]", t0);
}

CriterionResult criterion_until_collapse() {
    const auto t0 = Clock::now();
    double worst_margin = std::numeric_limits<double>::infinity();
    bool pass = true;
    for (double beta : {2.0, 5.0, 10.0, 20.0, 50.0})
        for (double c : {0.25, 0.5, 1.0, 2.0})
            for (double u0 : {0.5, 0.9, 0.99}) {
                const ScalarOdeResult r = collapse_hitting_time(u0, beta, c);
                if (!r.hitting_time) {
                    pass = false;
                    continue;
                }
                worst_margin = std::min(worst_margin, r.margin);
                if (r.margin < 0.0) pass = false;
            }
    std::ostringstream d;
    d << "60 grid points, smallest margin " << worst_margin;
    return finish(5, "until-collapse hitting-time margins", pass, d.str(), t0);
}

CriterionResult criterion_clustering_timescale() {
    const auto t0 = Clock::now();
    std::vector<double> errs;
    for (double beta : {1e2, 1e3, 1e4}) {
        const ClusteringTimes ct = clustering_timescale(1.0, beta, 1.0);
        if (!ct.t_beta) {
            return finish(6, "clustering timescale ladder", false, "hitting time not reached", t0);
        }
        errs.push_back(std::abs(*ct.t_beta - ct.asym_exact));
    }
    const bool mono = errs[0] > errs[1] && errs[1] > errs[2];
    const bool small = errs[2] < 0.05;
    std::ostringstream d;
    d << "errors vs integrated expansion: " << errs[0] << " > " << errs[1] << " > " << errs[2]
      << ", final < 0.05: " << (small ? "yes" : "NO");
    return finish(6, "clustering timescale ladder", mono && small, d.str(), t0);
}

CriterionResult criterion_staircase() {
    const auto t0 = Clock::now();
    const std::size_t n = 5;
    bool pass = true;
    std::vector<double> errors;
    std::ostringstream d;
    for (double beta : {50.0, 100.0, 200.0}) {
        const StaircaseOutcome out = staircase_run(n, 0.02, beta, 0.005, 400.0);
        if (out.merges != n - 1) pass = false;
        const double tol = 5.0 / std::log(beta);
        for (std::size_t i = 0; i < out.levels.plateau_levels.size() && i < n; ++i) {
            const double lvl = out.levels.plateau_levels[i];
            if (std::isnan(lvl) || std::abs(lvl - phi_infinity(n, i)) > tol) pass = false;
        }
        errors.push_back(out.mean_abs_error);
        d << "beta " << beta << ": merges " << out.merges << ", mean level err "
          << out.mean_abs_error << "; ";
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i)
        if (!(errors[i + 1] < errors[i])) pass = false;
    d << "error decreasing in beta: " << (errors[0] > errors[1] && errors[1] > errors[2] ? "yes" : "NO");
    return finish(7, "staircase reproduction", pass, d.str(), t0);
}

CriterionResult criterion_mixture_frequency() {
    const auto t0 = Clock::now();
    const std::size_t d = 16, n = 8;
    const double sigma = 0.002, eps = 0.05, beta = 200.0;

    // Regular 4-point simplex in the first 4 coordinates: pairwise inner
    // product -1/3, comfortably (beta, eps)-centered at this beta.
    MixtureSpec spec;
    spec.sigma = sigma;
    {
        const double a = std::sqrt(1.0 - 1.0 / 9.0);
        std::vector<Vec> centers = {
            Vec{1, 0, 0, 0}, Vec{-1.0 / 3.0, a, 0, 0},
            Vec{-1.0 / 3.0, -a / 2.0, a * std::sqrt(3.0) / 2.0, 0},
            Vec{-1.0 / 3.0, -a / 2.0, -a * std::sqrt(3.0) / 2.0, 0}};
        for (Vec& w : centers) {
            w.resize(d, 0.0);
            normalize(w);
            spec.centers.push_back(w);
        }
    }
    if (!mixture_condition(spec, n, d, eps))
        return finish(8, "mixture separation frequency", false, "mixture condition failed", t0);

    const std::size_t trials = 2000;
    std::size_t separated = 0;
    for (std::size_t s = 0; s < trials; ++s) {
        const Configuration c = sample_gaussian_mixture(spec, n, d, SeedSpec{s, 8});
        try {
            validate_separated(c, eps, beta);
            ++separated;
        } catch (const std::domain_error&) {
        }
    }
    const double p = double(separated) / double(trials);
    const double sigma_mc = std::sqrt(std::max(p * (1.0 - p), 1e-12) / double(trials));
    const double threshold = 1.0 - 2.0 * std::exp(-double(d)) - 3.0 * sigma_mc;
    const bool pass = p >= threshold;
    std::ostringstream det;
    det << "frequency " << p << " (threshold " << threshold << ")";
    return finish(8, "mixture separation frequency", pass, det.str(), t0);
}

CriterionResult criterion_meanfield() {
    const auto t0 = Clock::now();
    // (a) atoms-as-particles consistency against the SA integrator.
    const std::size_t n = 6;
    const double beta_a = 4.0;
    const Configuration init = sample_uniform_sphere(2, n, SeedSpec{11, 9});
    IntegratorSpec spec_a{Scheme::EulerProject, 1e-3, 10.0, 100};
    const Trajectory sa_traj = integrate(ModelKind(Model::SA, beta_a), init, spec_a);

    SeparationCertificate dummy;
    dummy.caps = CapFamily({init.points[0]}, 0.01);
    dummy.assignment.assign(n, 0);
    dummy.beta = beta_a;
    dummy.eps = 0.01;
    const MfTrajectory mf_traj =
        integrate_meanfield(AtomicMeasure::from_configuration(init), beta_a, spec_a, dummy);

    double sup = 0.0;
    for (std::size_t i = 0; i < std::min(sa_traj.size(), mf_traj.records.size()); ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t dcoord = 0; dcoord < 2; ++dcoord)
                sup = std::max(sup, std::abs(sa_traj.records[i].config.points[j][dcoord] -
                                             mf_traj.records[i].mu.atoms[j][dcoord]));
    const bool consistent = sup <= 1e-8;

    // (b) two-cap measure run: containment and variance smallness to horizon.
    IntegratorSpec spec_b{Scheme::EulerProject, 2.5e-3, 60.0, 200};
    const MfOutcome out = meanfield_run(60.0, 2, 0.01, 100, 21, spec_b);

    std::ostringstream d;
    d << "atoms-as-particles sup-norm " << sup << "; cap containment "
      << (out.support_ok ? "ok" : "FAILED") << ", V_q <= e^{-lambda beta} sustained "
      << (out.variance_ok ? "ok" : "FAILED");
    return finish(9, "mean-field consistency and containment", consistent && out.pass, d.str(), t0);
}

CriterionResult criterion_pl_slow_motion() {
    const auto t0 = Clock::now();
    const double beta = 20.0, eps = 5e-6;
    const std::size_t n = 6;
    const AngularCaps caps{{0.0, 3.14159265358979323846}, eps};

    bool pass = true;
    std::ostringstream d;
    std::size_t outside_samples = 0, or_checks = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto [config, cert] = gen_separated(
            2, n, 2, eps, beta, SeedSpec{seed, 10},
            centers_from_angles(caps.centers));
        const AngularConfiguration theta0 = to_angles(config);

        IntegratorSpec spec{Scheme::Rk4Project, 0.01, 80.0, 10};
        const AngularTrajectory traj = integrate_angular(theta0, beta, spec);

        const LambdaWindow win = lambda_window(beta, eps, cert.alpha, n);
        const double lambda = win.mid();
        const PlReport rep = pl_diagnostic(traj, beta, caps, lambda);
        for (const PlSample& s : rep.samples) {
            if (s.in_slow_manifold) continue;
            ++outside_samples;
            if (!(s.H < 0.0) || !s.claim_ok) pass = false;
        }

        // Metastable window: from the sticking time to the horizon.
        const double level = 2.0 * std::exp(-lambda * beta);
        std::optional<double> t_collapse;
        for (std::size_t i = traj.size(); i-- > 0;) {
            double worst = 0.0;
            const auto& a = traj.records[i].angles;
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = x + 1; y < n; ++y) {
                    const double g = circle_dist(a[x], a[y]);
                    if (g < 1.0)  // same cap
                        worst = std::max(worst, 2.0 * (1.0 - std::cos(g)));
                }
            if (worst <= level)
                t_collapse = traj.records[i].t;
            else
                break;
        }
        if (!t_collapse) {
            pass = false;
            continue;
        }
        const double delta = std::exp(-0.5 * lambda * beta);
        std::vector<double> ts;
        for (const AngularTraceRecord& r : traj.records)
            if (r.t >= *t_collapse) ts.push_back(r.t);
        const std::size_t stride = std::max<std::size_t>(1, ts.size() / 12);
        for (std::size_t i = 0; i < ts.size(); i += stride)
            for (std::size_t j = i; j < ts.size(); j += stride) {
                ++or_checks;
                if (!slow_motion_check(traj, caps, beta, delta, ts[i], ts[j])) pass = false;
            }
    }
    d << outside_samples << " samples outside the slow manifold (H < 0 and claim), " << or_checks
      << " displacement checks in the metastable window";
    return finish(10, "PL and slow-motion diagnostics", pass, d.str(), t0);
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids) {
    auto wants = [&](int id) {
        return ids.empty() || std::find(ids.begin(), ids.end(), id) != ids.end();
    };
    std::vector<CriterionResult> out;
    std::vector<TwoCapOutcome> cache;  // criteria 3 and 4 share the runs
    if (wants(1)) out.push_back(criterion_gradients());
    if (wants(2)) out.push_back(criterion_lyapunov());
    if (wants(3)) out.push_back(criterion_escape_collapse(cache));
    if (wants(4)) out.push_back(criterion_stick(cache));
    if (wants(5)) out.push_back(criterion_until_collapse());
    if (wants(6)) out.push_back(criterion_clustering_timescale());
    if (wants(7)) out.push_back(criterion_staircase());
    if (wants(8)) out.push_back(criterion_mixture_frequency());
    if (wants(9)) out.push_back(criterion_meanfield());
    if (wants(10)) out.push_back(criterion_pl_slow_motion());
    return out;
}

std::vector<CriterionResult> verify_gradients() { return run_acceptance({1}); }

std::vector<CriterionResult> verify_hessian() {
    const auto t0 = Clock::now();
    // Entrywise agreement of the angular Hessian with finite differences of
    // the gradient, plus the Laplacian row-sum identity.
    CounterRng rng(202, 0);
    double worst_entry = 0.0, worst_row = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(7);
        const double beta = rng.uniform(1.0, 12.0);
        std::vector<double> angles(n);
        for (double& a : angles) a = rng.uniform(0.0, kTwoPi);
        const AngularConfiguration th = AngularConfiguration::from_angles(angles);
        const Matrix h = hessian_angular(th, beta);
        const double fd_h = 1e-6;
        for (std::size_t j = 0; j < n; ++j) {
            AngularConfiguration tp = th, tm = th;
            tp.angles[j] += fd_h;
            tm.angles[j] -= fd_h;
            const Vec gp = grad_angular(tp, beta), gm = grad_angular(tm, beta);
            for (std::size_t i = 0; i < n; ++i)
                worst_entry =
                    std::max(worst_entry, std::abs((gp[i] - gm[i]) / (2.0 * fd_h) - h[i][j]));
        }
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += h[i][j];
            worst_row = std::max(worst_row, std::abs(row));
        }
    }
    const bool pass = worst_entry < 1e-5 && worst_row < 1e-12;
    std::ostringstream d;
    d << "max entry err " << worst_entry << ", max |row sum| " << worst_row;
    std::vector<CriterionResult> out;
    out.push_back(finish(1, "hessian vs finite differences", pass, d.str(), t0));
    return out;
}

std::vector<CriterionResult> verify_lemmas(const fs::path& out_csv) {
    std::vector<CriterionResult> out = run_acceptance({5, 6});
    if (!out_csv.empty()) {
        std::ostringstream table;
        table << "lemma,beta,c,u0,empirical,bound,margin,pass\n";
        for (double beta : {2.0, 5.0, 10.0, 20.0, 50.0})
            for (double c : {0.25, 0.5, 1.0, 2.0})
                for (double u0 : {0.5, 0.9, 0.99}) {
                    const ScalarOdeResult r = collapse_hitting_time(u0, beta, c);
                    table << "until-collapse," << io::fmt_double(beta) << ',' << io::fmt_double(c)
                          << ',' << io::fmt_double(u0) << ','
                          << (r.hitting_time ? io::fmt_double(*r.hitting_time) : "") << ','
                          << io::fmt_double(r.bound) << ',' << io::fmt_double(r.margin) << ','
                          << ((r.hitting_time && r.margin >= 0.0) ? 1 : 0) << "\n";
                }
        for (double beta : {1e2, 1e3, 1e4}) {
            const ClusteringTimes ct = clustering_timescale(1.0, beta, 1.0);
            table << "clustering," << io::fmt_double(beta) << ",1,1,"
                  << (ct.t_beta ? io::fmt_double(*ct.t_beta) : "") << ','
                  << io::fmt_double(ct.asym_exact) << ','
                  << (ct.t_beta ? io::fmt_double(std::abs(*ct.t_beta - ct.asym_exact)) : "") << ','
                  << ((ct.t_beta && std::abs(*ct.t_beta - ct.asym_exact) < 0.05) ? 1 : 0) << "\n";
        }
        io::atomic_write(out_csv, table.str());
    }
    return out;
}

std::vector<CriterionResult> verify_pl(const fs::path& out_dir) {
    if (!out_dir.empty()) {
        // Representative two-cap run for the exported diagnostics.
        const double beta = 20.0, eps = 5e-6;
        const AngularCaps caps{{0.0, 3.14159265358979323846}, eps};
        auto [config, cert] =
            gen_separated(2, 6, 2, eps, beta, SeedSpec{0, 10},
                          centers_from_angles(caps.centers));
        IntegratorSpec spec{Scheme::Rk4Project, 0.01, 80.0, 10};
        const AngularTrajectory traj = integrate_angular(to_angles(config), beta, spec);
        const LambdaWindow win = lambda_window(beta, eps, cert.alpha, 6);
        const PlReport rep = pl_diagnostic(traj, beta, caps, win.mid());
        io::atomic_write(out_dir / "pl.csv", io::pl_csv(rep));
        io::atomic_write(out_dir / "pl_summary.json", io::pl_summary_json(rep));
    }
    return run_acceptance({10});
}

}  // namespace sattn::exp
