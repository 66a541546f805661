#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sattn/geometry.hpp"

namespace sattn::exp {

inline constexpr const char* kCodeVersion = "0.1.0";

/// Exit-code contract shared by the CLI and the runners:
/// 0 = all checks pass, 1 = check failure, 2 = invalid input, 3 = numeric abort.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidInput = 2, kNumericAbort = 3 };

struct RunResult {
    bool pass = true;
    std::vector<std::filesystem::path> outputs;
    std::vector<std::string> notes;
};

/// Parses and schema-validates an experiment config document; unknown fields
/// anywhere are rejected (std::invalid_argument).
nlohmann::json load_config(const std::filesystem::path& path);
void validate_config(const nlohmann::json& cfg);

/// Default output directory: --out flag > config out_dir > $SATTN_OUT_DIR > cwd.
std::filesystem::path resolve_out_dir(const nlohmann::json& cfg, const std::string& cli_out);

/// Builds an initial configuration from an `init` document
/// ({kind, n, seed, ...}); shared by the runners and `sample-init`.
sattn::Configuration build_initial_configuration(const nlohmann::json& init, std::size_t dim,
                                                 double beta);

RunResult run_simulate(const nlohmann::json& cfg, const std::filesystem::path& out_dir);

/// Tidy long-format plot data for downstream tooling.  figure = "trajectory"
/// takes a simulate config and emits (t, series, value) rows, including
/// per-particle angles when d = 2; figure = "staircase" takes a staircase
/// config and emits (beta, s, series, value) rows.
RunResult emit_plot_data(const std::string& figure, const nlohmann::json& cfg,
                         const std::filesystem::path& out_dir);
RunResult run_metastability(const nlohmann::json& cfg, const std::filesystem::path& out_dir,
                            std::size_t workers);
RunResult run_staircase(const nlohmann::json& cfg, const std::filesystem::path& out_dir);
RunResult run_meanfield(const nlohmann::json& cfg, const std::filesystem::path& out_dir);

void write_manifest(const nlohmann::json& cfg, const RunResult& result,
                    const std::filesystem::path& out_dir, double wall_clock_sec);

// --- verification suites ---

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the numbered quantitative criteria (all of them when ids is empty)
/// at their pinned tolerances.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {});

/// Named sub-suites reachable from `verify`; lemmas also emits a CSV table
/// when out_csv is nonempty.
std::vector<CriterionResult> verify_gradients();
std::vector<CriterionResult> verify_hessian();
std::vector<CriterionResult> verify_lemmas(const std::filesystem::path& out_csv = {});
/// When out_dir is nonempty, also writes pl.csv ({t, H, bound, pass} rows)
/// and pl_summary.json for a representative two-cap run.
std::vector<CriterionResult> verify_pl(const std::filesystem::path& out_dir = {});

}  // namespace sattn::exp
