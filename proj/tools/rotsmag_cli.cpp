#include <CLI11.hpp>

#include <iostream>
#include <set>

#include "rotsmag/errors.hpp"
#include "rotsmag/runner.hpp"

using namespace rotsmag;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

void add_options(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "JSON run configuration")->required();
    sub->add_option("--out", o.out, "output directory (overrides output_dir)");
    sub->add_option("--seed", o.seed, "random seed (overrides seed)");
    sub->add_option("--threads", o.threads, "campaign cells run in parallel")->check(CLI::PositiveNumber);
}

int dispatch(const std::string& command, const Options& o) {
    RunConfig cfg;
    try {
        cfg = load_config(o.config);
        if (!o.out.empty()) cfg.output_dir = o.out;
        if (o.seed) {
            cfg.seed = *o.seed;
            cfg.inequality.family.seed = *o.seed;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }

    const std::set<ExperimentKind> allowed = [&]() -> std::set<ExperimentKind> {
        if (command == "simulate") return {ExperimentKind::simulate};
        if (command == "check") return {ExperimentKind::condition_check};
        if (command == "convergence") return {ExperimentKind::convergence_study};
        return {ExperimentKind::inequality_sweep, ExperimentKind::ap_sweep, ExperimentKind::simulate,
                ExperimentKind::condition_check, ExperimentKind::convergence_study};
    }();
    if (!allowed.count(cfg.experiment)) {
        std::cerr << "experiment '" << to_string(cfg.experiment) << "' cannot be run by the '" << command
                  << "' subcommand\n";
        return exit_config;
    }

    if (command == "sweep" || cfg.campaign) {
        const CampaignManifest m = CampaignManifest::expand(cfg);
        const int code = sweep(m, o.threads);
        std::cout << "campaign " << m.hash << ": " << m.cells.size() << " cells -> "
                  << (cfg.output_dir / "campaign.csv").string() << '\n';
        return code;
    }
    const ExecutionResult r = execute(cfg);
    std::cout << to_string(cfg.experiment) << ": " << r.status;
    if (!r.summary.empty()) std::cout << " (" << r.summary << ')';
    std::cout << '\n';
    if (!r.message.empty()) std::cerr << r.message << '\n';
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rotational Smagorinsky solver and weighted-inequality laboratory"};
    app.require_subcommand(1);
    Options opts;
    std::string command;
    for (const char* name : {"simulate", "check", "sweep", "convergence"}) {
        static const std::map<std::string, std::string> help = {
            {"simulate", "time-dependent run with an energy ledger"},
            {"check", "operator growth and coercivity constants"},
            {"sweep", "inequality or A_p sweep, or any configuration with a campaign block"},
            {"convergence", "spatial or temporal convergence study"}};
        auto* sub = app.add_subcommand(name, help.at(name));
        add_options(sub, opts);
        sub->callback([&command, name] { command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }
    return dispatch(command, opts);
}
