// cavity-bjj <subcommand> <config> [--out DIR] [--stride T] [--horizon T]

#include "cavity_bjj/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Mean-field, reduced and exact dynamics of a cavity-coupled bosonic Josephson junction"};
    app.require_subcommand(1, 1);

    std::string config_path;
    cavity_bjj::RunOverrides overrides;
    std::string out_dir;
    double stride = 0.0;
    double horizon = 0.0;

    for (const auto& name : cavity_bjj::subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_option("--stride", stride, "sampling interval");
        sub->add_option("--horizon", horizon, "integration horizon");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cavity_bjj::exit_config;
    }

    const auto* sub = app.get_subcommands().front();
    if (sub->count("--out")) overrides.out_dir = out_dir;
    if (sub->count("--stride")) overrides.stride = stride;
    if (sub->count("--horizon")) overrides.horizon = horizon;
    return cavity_bjj::run_file(sub->get_name(), config_path, overrides, std::cout, std::cerr);
}
