#include "rotsmag/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "rotsmag/errors.hpp"
#include "rotsmag/norms.hpp"
#include "rotsmag/operators.hpp"
#include "rotsmag/snapshot.hpp"

namespace rotsmag {

using json = nlohmann::json;

const char* const artifact_version = "rotsmag 1.0.0";

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::condition_check: return "condition_check";
        case ExperimentKind::inequality_sweep: return "inequality_sweep";
        case ExperimentKind::ap_sweep: return "ap_sweep";
        case ExperimentKind::convergence_study: return "convergence_study";
    }
    return "?";
}

ExperimentKind experiment_from_string(const std::string& s) {
    for (auto k : {ExperimentKind::simulate, ExperimentKind::condition_check, ExperimentKind::inequality_sweep,
                   ExperimentKind::ap_sweep, ExperimentKind::convergence_study}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown experiment '" + s + "'");
}

ValidationProfile profile_for(ExperimentKind k) {
    return k == ExperimentKind::inequality_sweep || k == ExperimentKind::ap_sweep ? ValidationProfile::lab_permissive
                                                                                  : ValidationProfile::solver_strict;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Collects schema violations while reading a JSON tree.
class Reader {
public:
    std::vector<std::string> errors;

    /// Checks that `j` is an object with only `allowed` keys.
    bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
        if (!j.is_object()) {
            errors.push_back(path + ": expected an object");
            return false;
        }
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items()) {
            if (!ok.count(k)) errors.push_back(join(path, k) + ": unknown key");
        }
        return true;
    }

    void number(const json& j, const std::string& path, const char* key, double& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_number()) {
            errors.push_back(join(path, key) + ": expected a number");
            return;
        }
        out = v.get<double>();
    }

    void optional_number(const json& j, const std::string& path, const char* key, std::optional<double>& out) {
        if (!j.contains(key) || j.at(key).is_null()) return;
        double v = 0.0;
        number(j, path, key, v);
        out = v;
    }

    template <class Int>
    void integer(const json& j, const std::string& path, const char* key, Int& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_number_integer()) {
            errors.push_back(join(path, key) + ": expected an integer");
            return;
        }
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.is_number_unsigned() || v.get<long long>() >= 0) {
                out = v.get<Int>();
            } else {
                errors.push_back(join(path, key) + ": expected a non-negative integer");
            }
        } else {
            out = v.get<Int>();
        }
    }

    void boolean(const json& j, const std::string& path, const char* key, bool& out) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_boolean()) {
            errors.push_back(join(path, key) + ": expected true or false");
            return;
        }
        out = j.at(key).get<bool>();
    }

    void string(const json& j, const std::string& path, const char* key, std::string& out) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_string()) {
            errors.push_back(join(path, key) + ": expected a string");
            return;
        }
        out = j.at(key).get<std::string>();
    }

    void numbers(const json& j, const std::string& path, const char* key, std::vector<double>& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
            errors.push_back(join(path, key) + ": expected an array of numbers");
            return;
        }
        out = v.get<std::vector<double>>();
    }

    void integers(const json& j, const std::string& path, const char* key, std::vector<int>& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_integer(); })) {
            errors.push_back(join(path, key) + ": expected an array of integers");
            return;
        }
        out = v.get<std::vector<int>>();
    }

    template <class Enum, class Parse>
    void enumeration(const json& j, const std::string& path, const char* key, Enum& out, Parse parse) {
        std::string s;
        if (!j.contains(key)) return;
        string(j, path, key, s);
        if (!j.at(key).is_string()) return;
        try {
            out = parse(s);
        } catch (const Error&) {
            errors.push_back(join(path, key) + ": unknown value '" + s + "'");
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
};

void read_domain(Reader& r, const json& j, GridSpec& g) {
    if (!r.object(j, "domain", {"kind", "extents", "periodic_x"})) return;
    Domain::Kind kind = g.domain.kind;
    r.enumeration(j, "domain", "kind", kind, [](const std::string& s) { return domain_kind_from_string(s); });
    std::vector<double> ext;
    r.numbers(j, "domain", "extents", ext);
    bool periodic_x = false;
    r.boolean(j, "domain", "periodic_x", periodic_x);
    const int dims = kind == Domain::Kind::box2d ? 2 : 3;
    if (ext.empty()) ext.assign(dims, 1.0);
    if (static_cast<int>(ext.size()) != dims) {
        r.errors.push_back("domain.extents: expected " + std::to_string(dims) + " values for " + to_string(kind));
        ext.resize(dims, 1.0);
    }
    if (periodic_x && kind != Domain::Kind::box2d) {
        r.errors.push_back("domain.periodic_x: only meaningful for box2d (channel3d is periodic in x and y)");
    }
    switch (kind) {
        case Domain::Kind::box2d: g.domain = Domain::box2d(ext[0], ext[1], periodic_x); break;
        case Domain::Kind::box3d: g.domain = Domain::box3d(ext[0], ext[1], ext[2]); break;
        case Domain::Kind::channel3d: g.domain = Domain::channel3d(ext[0], ext[1], ext[2]); break;
    }
}

void read_model(Reader& r, const json& j, ModelParams& m) {
    if (!r.object(j, "model",
                  {"alpha", "p", "C_alpha", "eps_reg", "dimensional_closure", "v_star", "theta", "mixing"})) {
        return;
    }
    r.number(j, "model", "alpha", m.alpha);
    r.number(j, "model", "p", m.p);
    r.number(j, "model", "C_alpha", m.C_alpha);
    r.number(j, "model", "eps_reg", m.eps_reg);
    r.boolean(j, "model", "dimensional_closure", m.dimensional_closure);
    r.number(j, "model", "v_star", m.v_star);
    r.number(j, "model", "theta", m.theta);
    if (j.contains("mixing")) {
        const json& mj = j.at("mixing");
        if (r.object(mj, "model.mixing", {"variant", "kappa", "A", "ell0"})) {
            r.enumeration(mj, "model.mixing", "variant", m.mixing.variant,
                          [](const std::string& s) { return mixing_variant_from_string(s); });
            r.number(mj, "model.mixing", "kappa", m.mixing.kappa);
            r.number(mj, "model.mixing", "A", m.mixing.A);
            r.number(mj, "model.mixing", "ell0", m.mixing.ell0);
        }
    }
}

void read_solver(Reader& r, const json& j, SolverConfig& s) {
    if (!r.object(j, "solver",
                  {"dt", "t_end", "scheme", "picard_tol", "picard_max", "damping", "anderson_depth", "leray_tol",
                   "linear_tol", "snapshot_every"})) {
        return;
    }
    r.number(j, "solver", "dt", s.dt);
    r.number(j, "solver", "t_end", s.t_end);
    r.enumeration(j, "solver", "scheme", s.scheme, [](const std::string& x) { return scheme_from_string(x); });
    r.number(j, "solver", "picard_tol", s.picard_tol);
    r.integer(j, "solver", "picard_max", s.picard_max);
    r.optional_number(j, "solver", "damping", s.damping);
    r.integer(j, "solver", "anderson_depth", s.anderson_depth);
    r.number(j, "solver", "leray_tol", s.leray_tol);
    r.number(j, "solver", "linear_tol", s.linear_tol);
    r.integer(j, "solver", "snapshot_every", s.snapshot_every);
}

void read_simulate(Reader& r, const json& j, SimulateSpec& s) {
    if (!r.object(j, "simulate", {"initial", "forcing", "forcing_amplitude", "write_final_state"})) return;
    if (j.contains("initial")) {
        const json& ij = j.at("initial");
        if (r.object(ij, "simulate.initial", {"kind", "amplitude", "path"})) {
            r.enumeration(ij, "simulate.initial", "kind", s.initial.kind,
                          [](const std::string& x) { return initial_kind_from_string(x); });
            r.number(ij, "simulate.initial", "amplitude", s.initial.amplitude);
            std::string path;
            r.string(ij, "simulate.initial", "path", path);
            s.initial.path = path;
        }
    }
    r.string(j, "simulate", "forcing", s.forcing);
    r.number(j, "simulate", "forcing_amplitude", s.forcing_amplitude);
    r.boolean(j, "simulate", "write_final_state", s.write_final_state);
}

void read_family(Reader& r, const json& j, TestFunctionFamily& f) {
    const std::string path = "inequality_sweep.family";
    if (!r.object(j, path,
                  {"kind", "count", "band_limit", "concentration_levels", "delta0", "level_ratio", "window_cells"})) {
        return;
    }
    r.enumeration(j, path, "kind", f.kind, [](const std::string& x) { return family_kind_from_string(x); });
    r.integer(j, path, "count", f.count);
    r.number(j, path, "band_limit", f.band_limit);
    r.integer(j, path, "concentration_levels", f.concentration_levels);
    r.number(j, path, "delta0", f.delta0);
    r.number(j, path, "level_ratio", f.level_ratio);
    r.integer(j, path, "window_cells", f.window_cells);
}

json to_json(const RunConfig& c) {
    json j;
    j["experiment"] = to_string(c.experiment);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir.generic_string();
    const Domain& d = c.grid.domain;
    std::vector<double> ext(d.extents.begin(), d.extents.begin() + d.dims());
    j["domain"] = {{"kind", to_string(d.kind)}, {"extents", ext}};
    if (d.kind == Domain::Kind::box2d) j["domain"]["periodic_x"] = !d.wall_axes[0];
    j["grid"] = {{"cells", std::vector<int>(c.grid.cells.begin(), c.grid.cells.begin() + d.dims())}};
    const ModelParams& m = c.model;
    j["model"] = {{"alpha", m.alpha},
                  {"p", m.p},
                  {"C_alpha", m.C_alpha},
                  {"eps_reg", m.eps_reg},
                  {"dimensional_closure", m.dimensional_closure},
                  {"v_star", m.v_star},
                  {"theta", m.theta},
                  {"mixing",
                   {{"variant", to_string(m.mixing.variant)},
                    {"kappa", m.mixing.kappa},
                    {"A", m.mixing.A},
                    {"ell0", m.mixing.ell0}}}};
    const SolverConfig& s = c.solver;
    j["solver"] = {{"dt", s.dt},
                   {"t_end", s.t_end},
                   {"scheme", to_string(s.scheme)},
                   {"picard_tol", s.picard_tol},
                   {"picard_max", s.picard_max},
                   {"damping", s.damping ? json(*s.damping) : json(nullptr)},
                   {"anderson_depth", s.anderson_depth},
                   {"leray_tol", s.leray_tol},
                   {"linear_tol", s.linear_tol},
                   {"snapshot_every", s.snapshot_every}};
    j["simulate"] = {{"initial",
                      {{"kind", to_string(c.simulate.initial.kind)},
                       {"amplitude", c.simulate.initial.amplitude},
                       {"path", c.simulate.initial.path.generic_string()}}},
                     {"forcing", c.simulate.forcing},
                     {"forcing_amplitude", c.simulate.forcing_amplitude},
                     {"write_final_state", c.simulate.write_final_state}};
    j["condition_check"] = {
        {"samples", c.condition.samples}, {"bumps", c.condition.bumps}, {"div_tol", c.condition.div_tol}};
    const TestFunctionFamily& f = c.inequality.family;
    j["inequality_sweep"] = {{"estimator", c.inequality.estimator},
                             {"p", c.inequality.p_grid},
                             {"alpha", c.inequality.alpha_grid},
                             {"levels", c.inequality.levels},
                             {"depth0", c.inequality.depth0},
                             {"family",
                              {{"kind", to_string(f.kind)},
                               {"count", f.count},
                               {"band_limit", f.band_limit},
                               {"concentration_levels", f.concentration_levels},
                               {"delta0", f.delta0},
                               {"level_ratio", f.level_ratio},
                               {"window_cells", f.window_cells}}}};
    j["ap_sweep"] = {{"alpha", c.ap.alpha_grid},
                     {"levels", c.ap.levels},
                     {"cube_sizes", c.ap.cube_sizes},
                     {"points", c.ap.points}};
    j["convergence_study"] = {{"kind", c.convergence.kind},
                              {"cells", c.convergence.cells},
                              {"dt_levels", c.convergence.dt_levels},
                              {"pseudo_dt", c.convergence.pseudo_dt},
                              {"max_pseudo_steps", c.convergence.max_pseudo_steps},
                              {"steady_tol", c.convergence.steady_tol}};
    if (c.campaign) j["campaign"] = {{"p", c.campaign->p}, {"alpha", c.campaign->alpha}};
    return j;
}

std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    // nlohmann reports the byte just past the offending character.
    if (col > 1) --col;
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void check_positive_grid(std::vector<std::string>& v, const std::vector<double>& grid, const std::string& path) {
    if (grid.empty()) v.push_back(path + ": must not be empty");
    for (double x : grid) {
        if (!std::isfinite(x)) v.push_back(path + ": values must be finite");
    }
}

}  // namespace

std::vector<std::string> RunConfig::violations(ValidationProfile profile) const {
    std::vector<std::string> v;
    auto guard = [&](const std::string& prefix, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            v.push_back(prefix + ": " + e.what());
        }
    };
    const Domain& dom = grid.domain;
    guard("domain", [&] { dom.validate(); });
    for (int a = 0; a < dom.dims(); ++a) {
        if (grid.cells[a] < 2) v.push_back("grid.cells: every axis needs at least 2 cells");
    }

    // Existence-mode runs must stay inside the admissible exponent range.
    const bool sweeping = campaign.has_value();
    std::vector<std::string> mv = profile == ValidationProfile::solver_strict && !sweeping
                                      ? model.solver_violations()
                                      : model.lab_violations();
    for (auto& s : mv) v.push_back("model: " + s);
    guard("solver", [&] { solver.validate(); });

    switch (experiment) {
        case ExperimentKind::simulate: {
            const auto& s = simulate;
            if (s.initial.kind == InitialData::Kind::taylor_green_2d && dom.dims() != 2) {
                v.push_back("simulate.initial.kind: taylor_green_2d needs a box2d domain");
            }
            if (s.initial.kind == InitialData::Kind::file && s.initial.path.empty()) {
                v.push_back("simulate.initial.path: required for kind 'file'");
            }
            if (s.forcing != "zero" && s.forcing != "manufactured") {
                v.push_back("simulate.forcing: expected 'zero' or 'manufactured'");
            }
            if (s.forcing == "manufactured" &&
                (dom.kind != Domain::Kind::box2d || !dom.wall_axes[0] ||
                 model.mixing.variant != MixingLength::Variant::distance)) {
                v.push_back("simulate.forcing: 'manufactured' needs a box2d domain with walls on both axes and "
                            "mixing variant 'distance'");
            }
            const double ratio = solver.dt > 0.0 ? solver.t_end / solver.dt : 0.0;
            if (solver.dt > 0.0 && std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
                v.push_back("solver.t_end: must be an integer multiple of solver.dt");
            }
            break;
        }
        case ExperimentKind::condition_check:
            if (condition.samples < 1) v.push_back("condition_check.samples: must be >= 1");
            if (condition.bumps < 1) v.push_back("condition_check.bumps: must be >= 1");
            if (!(condition.div_tol > 0.0)) v.push_back("condition_check.div_tol: must be > 0");
            break;
        case ExperimentKind::inequality_sweep: {
            const auto& q = inequality;
            if (q.estimator != "b_bound" && q.estimator != "hardy_1d") {
                v.push_back("inequality_sweep.estimator: expected 'b_bound' or 'hardy_1d'");
            }
            if (!campaign) {
                check_positive_grid(v, q.p_grid, "inequality_sweep.p");
                check_positive_grid(v, q.alpha_grid, "inequality_sweep.alpha");
                for (double p : q.p_grid) {
                    if (!(p > 1.0)) v.push_back("inequality_sweep.p: every p must exceed 1");
                }
            }
            guard("inequality_sweep.family", [&] { q.family.validate(); });
            if (q.estimator == "b_bound" && dom.dims() != 3) {
                v.push_back("inequality_sweep: the b_bound estimator needs a 3D domain");
            }
            if (q.levels < 1) v.push_back("inequality_sweep.levels: must be >= 1");
            if (!(q.depth0 > 0.0)) v.push_back("inequality_sweep.depth0: must be > 0");
            break;
        }
        case ExperimentKind::ap_sweep:
            if (!campaign) check_positive_grid(v, ap.alpha_grid, "ap_sweep.alpha");
            if (ap.levels < 1) v.push_back("ap_sweep.levels: must be >= 1");
            if (ap.cube_sizes < 1) v.push_back("ap_sweep.cube_sizes: must be >= 1");
            if (ap.points < 1) v.push_back("ap_sweep.points: must be >= 1");
            break;
        case ExperimentKind::convergence_study: {
            const auto& c = convergence;
            if (c.kind != "spatial" && c.kind != "temporal") {
                v.push_back("convergence_study.kind: expected 'spatial' or 'temporal'");
            }
            if (dom.kind != Domain::Kind::box2d || !dom.wall_axes[0]) {
                v.push_back("convergence_study: needs a box2d domain with walls on both axes");
            }
            if (c.kind == "spatial") {
                if (c.cells.size() < 2) v.push_back("convergence_study.cells: at least two resolutions");
                for (std::size_t i = 0; i < c.cells.size(); ++i) {
                    if (c.cells[i] < 4 || (i > 0 && c.cells[i] <= c.cells[i - 1])) {
                        v.push_back("convergence_study.cells: increasing values >= 4 required");
                        break;
                    }
                }
                if (model.mixing.variant != MixingLength::Variant::distance) {
                    v.push_back("convergence_study: the manufactured solution needs mixing variant 'distance'");
                }
            }
            if (c.kind == "temporal" && c.dt_levels < 3) {
                v.push_back("convergence_study.dt_levels: at least 3 levels for an observed order");
            }
            if (!(c.pseudo_dt > 0.0)) v.push_back("convergence_study.pseudo_dt: must be > 0");
            if (c.max_pseudo_steps < 1) v.push_back("convergence_study.max_pseudo_steps: must be >= 1");
            if (!(c.steady_tol > 0.0)) v.push_back("convergence_study.steady_tol: must be > 0");
            break;
        }
    }
    if (campaign) {
        check_positive_grid(v, campaign->p, "campaign.p");
        check_positive_grid(v, campaign->alpha, "campaign.alpha");
        for (double p : campaign->p) {
            if (!(p > 1.0)) v.push_back("campaign.p: every p must exceed 1");
        }
    }
    return v;
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        std::string what = e.what();
        const auto at = what.find("syntax error");
        throw ConfigError("syntax error at " + line_column(text, e.byte) + ": " +
                          (at == std::string::npos ? what : what.substr(at)));
    }
    Reader r;
    RunConfig c;
    if (!r.object(j, "config",
                  {"experiment", "seed", "output_dir", "domain", "grid", "model", "solver", "simulate",
                   "condition_check", "inequality_sweep", "ap_sweep", "convergence_study", "campaign"})) {
        throw ConfigError(r.errors);
    }
    r.enumeration(j, "", "experiment", c.experiment, [](const std::string& s) { return experiment_from_string(s); });
    r.integer(j, "", "seed", c.seed);
    std::string out = c.output_dir.generic_string();
    r.string(j, "", "output_dir", out);
    c.output_dir = out;
    if (j.contains("domain")) read_domain(r, j.at("domain"), c.grid);
    const int dims = c.grid.domain.dims();
    c.grid.cells = dims == 2 ? std::array<int, 3>{32, 32, 1} : std::array<int, 3>{16, 16, 16};
    if (j.contains("grid") && r.object(j.at("grid"), "grid", {"cells"})) {
        std::vector<int> cells;
        r.integers(j.at("grid"), "grid", "cells", cells);
        if (!cells.empty()) {
            if (static_cast<int>(cells.size()) != dims) {
                r.errors.push_back("grid.cells: expected " + std::to_string(dims) + " values");
            } else {
                for (int a = 0; a < dims; ++a) c.grid.cells[a] = cells[a];
            }
        }
    }
    if (j.contains("model")) read_model(r, j.at("model"), c.model);
    if (j.contains("solver")) read_solver(r, j.at("solver"), c.solver);
    if (j.contains("simulate")) read_simulate(r, j.at("simulate"), c.simulate);
    if (j.contains("condition_check")) {
        const json& cj = j.at("condition_check");
        if (r.object(cj, "condition_check", {"samples", "bumps", "div_tol"})) {
            r.integer(cj, "condition_check", "samples", c.condition.samples);
            r.integer(cj, "condition_check", "bumps", c.condition.bumps);
            r.number(cj, "condition_check", "div_tol", c.condition.div_tol);
        }
    }
    if (j.contains("inequality_sweep")) {
        const json& ij = j.at("inequality_sweep");
        if (r.object(ij, "inequality_sweep", {"estimator", "p", "alpha", "levels", "depth0", "family"})) {
            r.string(ij, "inequality_sweep", "estimator", c.inequality.estimator);
            r.numbers(ij, "inequality_sweep", "p", c.inequality.p_grid);
            r.numbers(ij, "inequality_sweep", "alpha", c.inequality.alpha_grid);
            r.integer(ij, "inequality_sweep", "levels", c.inequality.levels);
            r.number(ij, "inequality_sweep", "depth0", c.inequality.depth0);
            if (ij.contains("family")) read_family(r, ij.at("family"), c.inequality.family);
        }
    }
    if (j.contains("ap_sweep")) {
        const json& aj = j.at("ap_sweep");
        if (r.object(aj, "ap_sweep", {"alpha", "levels", "cube_sizes", "points"})) {
            r.numbers(aj, "ap_sweep", "alpha", c.ap.alpha_grid);
            r.integer(aj, "ap_sweep", "levels", c.ap.levels);
            r.integer(aj, "ap_sweep", "cube_sizes", c.ap.cube_sizes);
            r.integer(aj, "ap_sweep", "points", c.ap.points);
        }
    }
    if (j.contains("convergence_study")) {
        const json& cj = j.at("convergence_study");
        const std::string path = "convergence_study";
        if (r.object(cj, path, {"kind", "cells", "dt_levels", "pseudo_dt", "max_pseudo_steps", "steady_tol"})) {
            r.string(cj, path, "kind", c.convergence.kind);
            r.integers(cj, path, "cells", c.convergence.cells);
            r.integer(cj, path, "dt_levels", c.convergence.dt_levels);
            r.number(cj, path, "pseudo_dt", c.convergence.pseudo_dt);
            r.integer(cj, path, "max_pseudo_steps", c.convergence.max_pseudo_steps);
            r.number(cj, path, "steady_tol", c.convergence.steady_tol);
        }
    }
    if (j.contains("campaign")) {
        const json& cj = j.at("campaign");
        if (r.object(cj, "campaign", {"p", "alpha"})) {
            CampaignSpec camp{{c.model.p}, {c.model.alpha}};
            r.numbers(cj, "campaign", "p", camp.p);
            r.numbers(cj, "campaign", "alpha", camp.alpha);
            c.campaign = camp;
        }
    }
    c.inequality.family.seed = c.seed;
    // Semantic checks run even when the schema had problems so every issue is reported at once.
    for (auto& s : c.violations()) r.errors.push_back(s);
    if (!r.errors.empty()) throw ConfigError(r.errors);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read configuration file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_json(const RunConfig& cfg) { return to_json(cfg).dump(2); }

std::string config_hash(const RunConfig& cfg) {
    // The output directory is where results go, not what is computed.
    json j = to_json(cfg);
    j.erase("output_dir");
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

/// Appends a config_hash column to every line of a CSV document.
std::string with_hash(const std::string& csv, const std::string& hash) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        out << line << ',' << (header ? "config_hash" : hash) << '\n';
        header = false;
    }
    return out.str();
}

class Outputs {
public:
    Outputs(std::filesystem::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {}

    void csv(const std::string& name, const std::string& body) { text(name, with_hash(body, hash_)); }

    void text(const std::string& name, const std::string& body) {
        const auto path = dir_ / name;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw ConfigError("cannot write '" + path.string() + "'");
        os << body;
        files.push_back(path);
    }

    void snapshot(const VectorField& u, const std::string& stem) {
        write_snapshot(u, dir_ / stem);
        for (int c = 0; c < u.grid().dims(); ++c) files.push_back(dir_ / (stem + "." + component_tag(true, c) + ".bin"));
    }

    const std::filesystem::path& dir() const { return dir_; }
    std::vector<std::filesystem::path> files;

private:
    std::filesystem::path dir_;
    std::string hash_;
};

Grid make_grid(const GridSpec& g) { return Grid::uniform(g.domain, g.cells); }

std::string run_simulate(const RunConfig& c, Outputs& out) {
    const Grid grid = make_grid(c.grid);
    InitialData init = c.simulate.initial;
    init.seed = c.seed;
    ForcingSpec forcing = ForcingSpec::zero();
    if (c.simulate.forcing == "manufactured") {
        ManufacturedSolution ms;
        ms.amplitude = c.simulate.forcing_amplitude;
        forcing = ForcingSpec::steady(ms.forcing(grid, c.model));
    }
    const RunResult r = run(grid, init, forcing, c.model, c.solver);
    std::ostringstream ledger;
    r.ledger.write_csv(ledger);
    out.csv("ledger.csv", ledger.str());
    if (c.simulate.write_final_state) out.snapshot(r.final_state, "final");
    for (std::size_t i = 0; i + 1 < r.trajectory.states.size(); ++i) {
        if (r.trajectory.steps[i] == 0) continue;
        char stem[32];
        std::snprintf(stem, sizeof stem, "step%06d", r.trajectory.steps[i]);
        out.snapshot(r.trajectory.states[i], stem);
    }
    double worst = 0.0;
    for (std::size_t n = 1; n <= r.ledger.rows.size(); ++n) worst = std::max(worst, energy_residual(r.ledger, n));
    const double kin = r.ledger.rows.empty() ? r.ledger.kinetic0 : r.ledger.rows.back().kinetic;
    return "kinetic=" + num(kin) + " max_energy_residual=" + num(worst);
}

std::string run_condition(const RunConfig& c, Outputs& out) {
    const Grid grid = make_grid(c.grid);
    FieldSampler sampler(grid, c.seed, c.condition.bumps);
    const OperatorConditionReport rep = check_conditions(c.model, sampler, c.condition.samples, c.condition.div_tol);
    std::ostringstream os;
    write_condition_csv_header(os);
    write_condition_csv_row(os, rep, c.seed);
    out.csv("conditions.csv", os.str());
    return "c0_hat=" + num(rep.c0_hat) + " c1_hat=" + num(rep.c1_hat);
}

std::string verdict_summary(const SweepReport& rep) {
    std::set<std::string> v;
    for (const auto& row : rep.rows) v.insert(row.verdict);
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : "|") + x;
    return s;
}

std::string run_inequality(const RunConfig& c, Outputs& out) {
    SweepReport rep;
    if (c.inequality.estimator == "hardy_1d") {
        for (double p : c.inequality.p_grid)
            for (double a : c.inequality.alpha_grid) rep.append(hardy_sweep_1d(p, a, c.inequality.levels, c.inequality.depth0));
    } else {
        TestFunctionFamily fam = c.inequality.family;
        fam.seed = c.seed;
        const Grid base = make_grid(c.grid);
        rep = b_bound_sweep(fam, c.inequality.p_grid, c.inequality.alpha_grid, c.grid.domain, &base);
    }
    std::ostringstream os;
    rep.write_csv(os);
    out.csv("sweep.csv", os.str());
    return verdict_summary(rep);
}

std::string run_ap(const RunConfig& c, Outputs& out) {
    const Grid grid = make_grid(c.grid);
    const SweepReport rep = ap_sweep(grid, c.model.p, c.ap.alpha_grid, c.ap.levels, c.ap.cube_sizes, c.ap.points);
    std::ostringstream os;
    rep.write_csv(os);
    out.csv("ap_sweep.csv", os.str());
    return verdict_summary(rep);
}

std::string run_convergence(const RunConfig& c, Outputs& out) {
    const auto& cs = c.convergence;
    std::ostringstream os;
    os << "kind,level,cells_x,cells_y,dt,value,order\n";
    std::string summary;
    if (cs.kind == "spatial") {
        ManufacturedSolution ms;
        ms.amplitude = c.simulate.forcing_amplitude;
        SolverConfig sc = c.solver;
        sc.dt = cs.pseudo_dt;
        sc.t_end = cs.pseudo_dt;
        double prev = 0.0;
        for (std::size_t k = 0; k < cs.cells.size(); ++k) {
            const int nx = cs.cells[k];
            const int ny = std::max(2, static_cast<int>(std::lround(double(nx) * c.grid.cells[1] / c.grid.cells[0])));
            const Grid g = Grid::uniform(c.grid.domain, {nx, ny, 1});
            Stepper stepper(g, c.model, sc);
            const VectorField exact = ms.velocity(g);
            const VectorField f = ms.forcing(g, c.model);
            VectorField u = stepper.project(exact);
            double change = 1.0;
            for (int s = 0; s < cs.max_pseudo_steps && change > cs.steady_tol; ++s) {
                StepResult r = stepper.step(u, f);
                const double n = l2_norm(r.u);
                change = n > 0.0 ? l2_norm(r.u - u) / n : 0.0;
                u = std::move(r.u);
            }
            const double err = l2_norm(u - exact) / l2_norm(exact);
            const double order = k > 0 ? std::log2(prev / err) * std::log(2.0) / std::log(double(nx) / cs.cells[k - 1])
                                       : std::nan("");
            os << "spatial," << k << ',' << nx << ',' << ny << ',' << num(sc.dt) << ',' << num(err) << ','
               << (k > 0 ? num(order) : "") << '\n';
            if (k > 0) summary = "order=" + num(order);
            prev = err;
        }
    } else {
        const Grid g = make_grid(c.grid);
        InitialData init = c.simulate.initial;
        init.seed = c.seed;
        std::vector<double> e;
        for (int k = 0; k < cs.dt_levels; ++k) {
            SolverConfig sc = c.solver;
            sc.dt = c.solver.dt / std::pow(2.0, k);
            const RunResult r = run(g, init, ForcingSpec::zero(), c.model, sc);
            e.push_back(r.ledger.rows.empty() ? r.ledger.kinetic0 : r.ledger.rows.back().kinetic);
            std::string order;
            if (k >= 2) {
                const double o = std::log2((e[k - 2] - e[k - 1]) / (e[k - 1] - e[k]));
                order = num(o);
                summary = "order=" + order;
            }
            os << "temporal," << k << ',' << g.cells(0) << ',' << g.cells(1) << ',' << num(sc.dt) << ',' << num(e[k])
               << ',' << order << '\n';
        }
    }
    out.csv("convergence.csv", os.str());
    return summary;
}

void write_manifest(const RunConfig& cfg, const ExecutionResult& r, double wall, const Outputs& out,
                    std::vector<std::filesystem::path> files) {
    json m;
    m["version"] = artifact_version;
    m["config_hash"] = config_hash(cfg);
    m["config"] = to_json(cfg);
    m["experiment"] = to_string(cfg.experiment);
    m["seed"] = cfg.seed;
    m["grid"] = {{"domain", to_string(cfg.grid.domain.kind)},
                 {"cells", std::vector<int>(cfg.grid.cells.begin(), cfg.grid.cells.begin() + cfg.grid.domain.dims())}};
    m["tolerances"] = {{"picard_tol", cfg.solver.picard_tol},
                       {"linear_tol", cfg.solver.linear_tol},
                       {"leray_tol", cfg.solver.leray_tol}};
    m["status"] = r.status;
    m["exit_code"] = r.exit_code;
    m["message"] = r.message;
    m["summary"] = r.summary;
    m["wall_time_s"] = wall;
    std::vector<std::string> names;
    for (const auto& f : files) names.push_back(f.filename().generic_string());
    m["files"] = names;
    m["partial"] = r.status != "complete";
    std::ofstream os(out.dir() / "manifest.json", std::ios::binary);
    os << m.dump(2) << '\n';
}

}  // namespace

ExecutionResult execute(const RunConfig& cfg) {
    ExecutionResult res;
    const auto t0 = std::chrono::steady_clock::now();
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) {
        res.exit_code = exit_config;
        res.status = "failed";
        res.message = "cannot create output directory '" + cfg.output_dir.string() + "': " + ec.message();
        return res;
    }
    Outputs out(cfg.output_dir, config_hash(cfg));
    try {
        const auto v = cfg.violations();
        if (!v.empty()) throw ConfigError(v);
        switch (cfg.experiment) {
            case ExperimentKind::simulate: res.summary = run_simulate(cfg, out); break;
            case ExperimentKind::condition_check: res.summary = run_condition(cfg, out); break;
            case ExperimentKind::inequality_sweep: res.summary = run_inequality(cfg, out); break;
            case ExperimentKind::ap_sweep: res.summary = run_ap(cfg, out); break;
            case ExperimentKind::convergence_study: res.summary = run_convergence(cfg, out); break;
        }
    } catch (const PreconditionError& e) {
        res.exit_code = exit_config;
        res.status = "precondition-violated";
        res.message = e.what();
    } catch (const ConfigError& e) {
        res.exit_code = exit_config;
        res.status = "config-error";
        res.message = e.what();
    } catch (const ArgumentError& e) {
        res.exit_code = exit_config;
        res.status = "config-error";
        res.message = e.what();
    } catch (const DomainError& e) {
        res.exit_code = exit_config;
        res.status = "config-error";
        res.message = e.what();
    } catch (const SolverError& e) {
        res.exit_code = exit_solver;
        res.status = "solver-error";
        res.message = e.what();
    } catch (const NumericError& e) {
        res.exit_code = exit_numeric;
        res.status = "numeric-error";
        res.message = e.what();
    } catch (const std::exception& e) {
        res.exit_code = exit_failure;
        res.status = "failed";
        res.message = e.what();
    }
    if (res.exit_code != exit_ok && !out.files.empty()) res.status += " (partial outputs)";
    res.files = out.files;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, res, wall, out, out.files);
    res.files.push_back(cfg.output_dir / "manifest.json");
    return res;
}

CampaignManifest CampaignManifest::expand(const RunConfig& base) {
    CampaignManifest m;
    m.base = base;
    m.hash = config_hash(base);
    m.version = artifact_version;
    const std::vector<double> ps = base.campaign ? base.campaign->p : std::vector<double>{base.model.p};
    const std::vector<double> as = base.campaign ? base.campaign->alpha : std::vector<double>{base.model.alpha};
    int index = 0;
    for (double p : ps)
        for (double a : as) {
            CampaignCell cell;
            cell.p = p;
            cell.alpha = a;
            RunConfig c = base;
            c.campaign.reset();
            if (base.campaign) {
                c.model.p = p;
                c.model.alpha = a;
                c.inequality.p_grid = {p};
                c.inequality.alpha_grid = {a};
                c.ap.alpha_grid = {a};
            }
            char name[32];
            std::snprintf(name, sizeof name, "cell_%03d", index++);
            cell.dir = base.output_dir / name;
            c.output_dir = cell.dir;
            cell.config = c;
            m.cells.push_back(std::move(cell));
        }
    return m;
}

int sweep(const CampaignManifest& manifest, int threads) {
    const std::size_t n = manifest.cells.size();
    std::vector<ExecutionResult> results(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const RunConfig& c = manifest.cells[i].config;
            const auto v = c.violations();
            if (!v.empty()) {
                // Out-of-range cells are reported, not run.
                std::filesystem::create_directories(c.output_dir);
                ExecutionResult r;
                r.exit_code = exit_config;
                r.status = "precondition-violated";
                r.message = ConfigError(v).what();
                Outputs out(c.output_dir, config_hash(c));
                write_manifest(c, r, 0.0, out, {});
                results[i] = r;
                continue;
            }
            results[i] = execute(c);
        }
    };
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int k = 1; k < t; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::filesystem::create_directories(manifest.base.output_dir);
    std::ostringstream csv;
    csv << "cell,p,alpha,status,exit_code,summary,config_hash\n";
    json cells = json::array();
    int code = exit_ok;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = manifest.cells[i];
        const auto& r = results[i];
        std::string summary = r.summary;
        std::replace(summary.begin(), summary.end(), ',', ';');
        csv << c.dir.filename().generic_string() << ',' << num(c.p) << ',' << num(c.alpha) << ',' << r.status << ','
            << r.exit_code << ',' << summary << ',' << config_hash(c.config) << '\n';
        cells.push_back({{"cell", c.dir.filename().generic_string()},
                         {"p", c.p},
                         {"alpha", c.alpha},
                         {"status", r.status},
                         {"config_hash", config_hash(c.config)}});
        const bool terminated = r.exit_code == exit_ok || r.status == "precondition-violated";
        if (!terminated && code == exit_ok) code = r.exit_code;
    }
    {
        std::ofstream os(manifest.base.output_dir / "campaign.csv", std::ios::binary);
        os << csv.str();
    }
    json m;
    m["version"] = manifest.version;
    m["config_hash"] = manifest.hash;
    m["config"] = to_json(manifest.base);
    m["cells"] = cells;
    std::ofstream os(manifest.base.output_dir / "campaign.json", std::ios::binary);
    os << m.dump(2) << '\n';
    return code;
}

}  // namespace rotsmag
