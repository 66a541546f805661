// Command-line front end: batch experiment runner, init sampling, and the
// verification suites.  Exit codes: 0 all checks pass, 1 check failure,
// 2 invalid input, 3 numeric abort.

#include <chrono>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sattn/dynamics.hpp"
#include "sattn/experiment.hpp"
#include "sattn/initgen.hpp"
#include "sattn/io.hpp"

namespace {

using nlohmann::json;
using sattn::exp::CriterionResult;

int report_criteria(const std::vector<CriterionResult>& results) {
    bool all = true;
    for (const CriterionResult& r : results) {
        std::printf("[%s] criterion %d: %s - %s (%.2fs)\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str(), r.seconds);
        all = all && r.pass;
    }
    return all ? sattn::exp::kOk : sattn::exp::kCheckFailed;
}

json config_from_or_flags(const std::string& config_path) {
    if (config_path.empty()) throw std::invalid_argument("--config is required");
    return sattn::exp::load_config(config_path);
}

int run_kind(const std::string& kind, const std::string& config_path, const std::string& out,
             std::size_t workers, std::uint64_t seed_override, bool has_seed) {
    json cfg = config_from_or_flags(config_path);
    if (cfg.value("kind", "simulate") != kind)
        throw std::invalid_argument("config.kind does not match the '" + kind + "' subcommand");
    if (has_seed) {
        if (cfg.contains("init"))
            cfg["init"]["seed"] = seed_override;
        else if (cfg.contains("seeds"))
            cfg["seeds"] = std::vector<std::uint64_t>{seed_override};
        else
            cfg["seed"] = seed_override;
    }
    const auto out_dir = sattn::exp::resolve_out_dir(cfg, out);
    const auto t0 = std::chrono::steady_clock::now();
    sattn::exp::RunResult res;
    try {
        if (kind == "simulate")
            res = sattn::exp::run_simulate(cfg, out_dir);
        else if (kind == "metastability")
            res = sattn::exp::run_metastability(cfg, out_dir, workers);
        else if (kind == "staircase")
            res = sattn::exp::run_staircase(cfg, out_dir);
        else
            res = sattn::exp::run_meanfield(cfg, out_dir);
    } catch (const sattn::numeric_error& e) {
        // Numeric aborts leave a manifest behind before the nonzero exit.
        res.pass = false;
        res.notes.push_back(std::string("numeric abort: ") + e.what());
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        sattn::exp::write_manifest(cfg, res, out_dir, secs);
        throw;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    sattn::exp::write_manifest(cfg, res, out_dir, secs);
    for (const std::string& note : res.notes) std::printf("%s\n", note.c_str());
    std::printf("%s: %s, outputs in %s\n", kind.c_str(), res.pass ? "PASS" : "FAIL",
                out_dir.string().c_str());
    return res.pass ? sattn::exp::kOk : sattn::exp::kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-attention particle dynamics on the sphere"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::size_t workers = 1;
    std::uint64_t seed = 0;
    bool has_seed = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--workers", workers, "worker threads for seed batches");
        sub->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
            has_seed = true;
        });
    };

    CLI::App* sim = app.add_subcommand("simulate", "integrate a flow and write trace CSV");
    add_common(sim);
    CLI::App* meta = app.add_subcommand("metastability", "certificate, bounds, detectors, report");
    add_common(meta);
    CLI::App* mf = app.add_subcommand("meanfield", "atomic-measure transport and cap checks");
    add_common(mf);

    CLI::App* stair = app.add_subcommand("staircase", "renormalized staircase profiles");
    add_common(stair);
    std::size_t stair_n = 5;
    double stair_c0 = 0.02;
    std::vector<double> stair_betas;
    stair->add_option("--n", stair_n, "particle count");
    stair->add_option("--c0", stair_c0, "ladder base angle");
    stair->add_option("--beta-list", stair_betas, "beta ladder")->delimiter(',');

    CLI::App* init = app.add_subcommand("sample-init", "draw an initial configuration");
    std::string init_kind = "uniform", init_out = "init.json";
    std::size_t init_n = 5, init_d = 2, init_k = 2, init_r = 2, init_atoms = 32;
    double init_eps = 0.01, init_beta = 10.0, init_sigma = 0.1, init_c0 = 0.02;
    std::uint64_t init_seed = 0;
    init->add_option("--kind", init_kind,
                     "separated|gaussian-mixture|uniform|well-prepared|separated-measure");
    init->add_option("--seed", init_seed, "sampler seed");
    init->add_option("--out", init_out, "output file");
    init->add_option("--n", init_n, "particle count");
    init->add_option("--dim", init_d, "ambient dimension");
    init->add_option("--k", init_k, "cap count");
    init->add_option("--r", init_r, "mixture component count");
    init->add_option("--eps", init_eps, "cap height");
    init->add_option("--beta", init_beta, "inverse temperature for certificates");
    init->add_option("--sigma", init_sigma, "mixture standard deviation");
    init->add_option("--c0", init_c0, "well-prepared base angle");
    init->add_option("--atoms-per-cap", init_atoms, "atoms per cap (separated-measure)");

    CLI::App* plot = app.add_subcommand("plot-data", "emit tidy long-format figure data");
    add_common(plot);
    std::string figure = "trajectory";
    plot->add_option("--figure", figure, "trajectory|staircase");

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    std::string suite;
    verify->add_option("suite,--suite", suite, "gradients|hessian|lemmas|pl|acceptance");
    std::string verify_out;
    verify->add_option("--out", verify_out, "output path (lemmas: CSV table; pl: directory)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_kind("simulate", config_path, out_dir, workers, seed, has_seed);
        if (meta->parsed())
            return run_kind("metastability", config_path, out_dir, workers, seed, has_seed);
        if (mf->parsed()) return run_kind("meanfield", config_path, out_dir, workers, seed, has_seed);

        if (stair->parsed()) {
            if (!config_path.empty())
                return run_kind("staircase", config_path, out_dir, workers, seed, has_seed);
            json cfg;
            cfg["schema_version"] = 1;
            cfg["kind"] = "staircase";
            cfg["n"] = stair_n;
            cfg["c0"] = stair_c0;
            cfg["beta_list"] = stair_betas.empty() ? std::vector<double>{50.0, 100.0, 200.0}
                                                   : stair_betas;
            const auto dir = sattn::exp::resolve_out_dir(cfg, out_dir);
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = sattn::exp::run_staircase(cfg, dir);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            sattn::exp::write_manifest(cfg, res, dir, secs);
            std::printf("staircase: %s, outputs in %s\n", res.pass ? "PASS" : "FAIL",
                        dir.string().c_str());
            return res.pass ? sattn::exp::kOk : sattn::exp::kCheckFailed;
        }

        if (init->parsed()) {
            json icfg;
            icfg["kind"] = init_kind;
            icfg["seed"] = init_seed;
            if (init_kind == "uniform") {
                icfg["n"] = init_n;
            } else if (init_kind == "separated") {
                icfg["n"] = init_n;
                icfg["k"] = init_k;
                icfg["eps"] = init_eps;
            } else if (init_kind == "gaussian-mixture") {
                icfg["n"] = init_n;
                icfg["r"] = init_r;
                icfg["sigma"] = init_sigma;
            } else if (init_kind == "well-prepared") {
                icfg["n"] = init_n;
                icfg["c0"] = init_c0;
            } else if (init_kind == "separated-measure") {
                icfg["k"] = init_k;
                icfg["eps"] = init_eps;
                icfg["atoms_per_cap"] = init_atoms;
            } else {
                throw std::invalid_argument("sample-init: unknown kind '" + init_kind + "'");
            }
            const sattn::Configuration c =
                sattn::exp::build_initial_configuration(icfg, init_d, init_beta);
            sattn::io::atomic_write(init_out, sattn::io::configuration_to_json(c));
            std::printf("sample-init: wrote %s\n", init_out.c_str());
            return sattn::exp::kOk;
        }

        if (plot->parsed()) {
            const json cfg = config_from_or_flags(config_path);
            const auto dir = sattn::exp::resolve_out_dir(cfg, out_dir);
            const auto res = sattn::exp::emit_plot_data(figure, cfg, dir);
            std::printf("plot-data: wrote %s\n", res.outputs.front().string().c_str());
            return sattn::exp::kOk;
        }

        if (verify->parsed()) {
            if (suite.empty()) throw std::invalid_argument("verify: a suite name is required");
            if (suite == "gradients") return report_criteria(sattn::exp::verify_gradients());
            if (suite == "hessian") return report_criteria(sattn::exp::verify_hessian());
            if (suite == "lemmas")
                return report_criteria(sattn::exp::verify_lemmas(
                    verify_out.empty() ? std::filesystem::path{} : std::filesystem::path(verify_out)));
            if (suite == "pl")
                return report_criteria(sattn::exp::verify_pl(
                    verify_out.empty() ? std::filesystem::path{} : std::filesystem::path(verify_out)));
            if (suite == "acceptance") return report_criteria(sattn::exp::run_acceptance());
            throw std::invalid_argument("verify: unknown suite '" + suite + "'");
        }
    } catch (const sattn::numeric_error& e) {
        std::fprintf(stderr, "numeric abort: %s\n", e.what());
        return sattn::exp::kNumericAbort;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return sattn::exp::kInvalidInput;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "refused: %s\n", e.what());
        return sattn::exp::kInvalidInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return sattn::exp::kNumericAbort;
    }
    return sattn::exp::kInvalidInput;
}
