#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rotsmag/evolution.hpp"
#include "rotsmag/geometry.hpp"
#include "rotsmag/inequality_lab.hpp"
#include "rotsmag/model.hpp"

namespace rotsmag {

enum class ExperimentKind { simulate, condition_check, inequality_sweep, ap_sweep, convergence_study };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

/// Which parameter ranges a configuration must respect. Existence-mode
/// runs (simulate, condition_check, convergence_study) are strict; the
/// inequality lab accepts supercritical exponents.
enum class ValidationProfile { solver_strict, lab_permissive };
ValidationProfile profile_for(ExperimentKind k);

struct GridSpec {
    Domain domain = Domain::box2d(1.0, 1.0);
    std::array<int, 3> cells{32, 32, 1};
};

struct SimulateSpec {
    InitialData initial;
    /// "zero" or "manufactured".
    std::string forcing = "zero";
    double forcing_amplitude = 0.1;
    bool write_final_state = true;
};

struct ConditionSpec {
    int samples = 200;
    int bumps = 4;
    double div_tol = 1e-8;
};

struct InequalitySpec {
    /// "b_bound" or "hardy_1d".
    std::string estimator = "b_bound";
    std::vector<double> p_grid{3.0};
    std::vector<double> alpha_grid{0.0, 1.0};
    TestFunctionFamily family{TestFunctionFamily::Kind::near_wall_concentrating};
    /// hardy_1d: levels and starting depth.
    int levels = 5;
    double depth0 = 8.0;
};

struct ApSweepSpec {
    std::vector<double> alpha_grid{0.0, 0.5, 1.0, 1.5, 1.9, 2.0};
    int levels = 5;
    int cube_sizes = 4;
    int points = 4;
};

struct ConvergenceSpec {
    /// "spatial": stationary manufactured solution on `cells`.
    /// "temporal": terminal energy of Taylor-Green data at dt / 2^k.
    std::string kind = "spatial";
    std::vector<int> cells{32, 64, 128};
    int dt_levels = 3;
    double pseudo_dt = 1e3;
    int max_pseudo_steps = 60;
    double steady_tol = 1e-9;
};

/// Optional expansion of one configuration into a (p, α) grid of cells.
struct CampaignSpec {
    std::vector<double> p;
    std::vector<double> alpha;
};

struct RunConfig {
    ExperimentKind experiment = ExperimentKind::simulate;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    GridSpec grid;
    ModelParams model;
    SolverConfig solver;
    SimulateSpec simulate;
    ConditionSpec condition;
    InequalitySpec inequality;
    ApSweepSpec ap;
    ConvergenceSpec convergence;
    std::optional<CampaignSpec> campaign;

    /// All violations for the given profile; empty when valid.
    std::vector<std::string> violations(ValidationProfile profile) const;
    std::vector<std::string> violations() const { return violations(profile_for(experiment)); }
};

/// Parse and validate a JSON configuration. Unknown keys are rejected and
/// unset keys take the defaults above. Throws ConfigError listing every
/// violation; syntax errors report line and column.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form with every default filled in, keys sorted.
std::string canonical_json(const RunConfig& cfg);
/// FNV-1a 64 of canonical_json, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

extern const char* const artifact_version;

/// Exit codes of execute(), sweep() and the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_solver = 3, exit_numeric = 4 };

struct ExecutionResult {
    int exit_code = exit_ok;
    std::string status = "complete";
    std::string message;
    std::vector<std::filesystem::path> files;
    /// One-line summary used by campaign aggregation (a verdict or a number).
    std::string summary;
};

/// Run the configured experiment, writing CSV reports and manifest.json
/// into cfg.output_dir. Module errors are caught and mapped to exit codes;
/// the manifest then records status "partial" or "failed". Every CSV row
/// ends with the config hash.
ExecutionResult execute(const RunConfig& cfg);

struct CampaignCell {
    double p = 0.0;
    double alpha = 0.0;
    RunConfig config;
    std::filesystem::path dir;
};

struct CampaignManifest {
    RunConfig base;
    std::vector<CampaignCell> cells;
    std::string hash;
    std::string version;

    /// Cells in p-major order; each cell gets its own output directory.
    /// A configuration without a campaign block expands to one cell.
    static CampaignManifest expand(const RunConfig& base);
};

/// Execute every cell (on up to `threads` threads) and write campaign.csv
/// and campaign.json into base.output_dir. Failed cells are recorded and do
/// not stop the others. Returns exit_ok when every cell ended ok or with a
/// precondition violation, otherwise the code of the first failing cell.
int sweep(const CampaignManifest& manifest, int threads = 1);

}  // namespace rotsmag
