// Command-line front end: reproduces the RCS, near/far, squint, link and
// tracer data products from a scenario config.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ris/scenario.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Scenario config file (JSON)")
        ->required();
    cmd->add_option("--out", args.out_dir, "Output directory (overrides config)");
    cmd->add_option("--set", args.overrides,
                    "Override a config value, e.g. --set design.theta_out_deg=25");
}

ris::ScenarioConfig load(const CommonArgs& args) {
    const auto j = ris::load_scenario_json(args.config_path, args.overrides);
    auto config = ris::parse_scenario(j);
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    return config;
}

void report(const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS indoor sub-THz channel characterization"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* rcs = app.add_subcommand("rcs", "RCS pattern cut and dominant rays");
    auto* nearfar = app.add_subcommand("nearfar", "Near-field vs far-field deviation curve");
    auto* squint = app.add_subcommand("squint", "Beam squint over the frequency list");
    auto* link = app.add_subcommand("link", "Bistatic link budget over the distance grid");
    auto* trace = app.add_subcommand("trace", "Indoor ray trace and channel impulse response");
    auto* figures = app.add_subcommand("make-figures", "Run all commands on one scenario");
    for (auto* cmd : {rcs, nearfar, squint, link, trace, figures}) add_common(cmd, args);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = load(args);
        if (rcs->parsed()) report(ris::run_rcs(config));
        else if (nearfar->parsed()) report(ris::run_nearfar(config));
        else if (squint->parsed()) report(ris::run_squint(config));
        else if (link->parsed()) report(ris::run_link(config));
        else if (trace->parsed()) report(ris::run_trace(config));
        else if (figures->parsed()) report(ris::run_make_figures(config));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
