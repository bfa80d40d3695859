#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "nttkit/harness.hpp"

int main(int argc, char** argv) {
    nttkit::configure_logging();

    CLI::App app{"nttkit: normalized tensor-train experiments"};
    app.require_subcommand(1);

    std::string config;
    nttkit::RunOptions opts;
    std::string out;
    auto* run = app.add_subcommand("run", "run an experiment config and write its artifacts");
    run->add_option("config", config, "experiment config (JSON)")->required();
    run->add_option("--jobs", opts.jobs, "independent runs executed in parallel")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "output directory (overrides the config)");

    std::string dir;
    auto* rep = app.add_subcommand("report", "summarize the manifests under a results directory");
    rep->add_option("dir", dir, "results directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        if (!out.empty()) opts.out = out;
        return nttkit::run_config_file(config, opts);
    }
    return nttkit::report(dir, std::cout);
}
