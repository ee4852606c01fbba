#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "holecov/cli.hpp"

namespace {

// HOLECOV_LOG takes a spdlog level name (trace, debug, info, warn, err, off).
void configure_logging()
{
    auto logger = spdlog::stderr_color_mt("holecov");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("HOLECOV_LOG"))
        spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv)
{
    configure_logging();

    CLI::App app{"Coverage-hole prevention simulator"};
    app.require_subcommand(1);
    CLI::App* run = app.add_subcommand("run", "Run a scenario and write its outputs");

    holecov::RunConfig cfg;
    std::string mode;
    std::string emit = "trace,summary";
    int steps = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    run->add_option("--config", cfg.scenario, "Scenario file")->required();
    run->add_option("--out", cfg.out_dir, "Output directory")->required();
    auto* mode_opt = run->add_option("--mode", mode, "Override the mode")
                         ->check(CLI::IsMember({"ncbf", "hf-only", "nominal-only"}));
    auto* steps_opt = run->add_option("--steps", steps, "Override the step count");
    auto* dt_opt = run->add_option("--dt", dt, "Override the time step");
    auto* seed_opt = run->add_option("--seed", seed, "Override the seed");
    run->add_option("--emit", emit, "Comma-separated outputs: trace, summary, plotdata");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*mode_opt)
            cfg.mode = holecov::parse_mode(mode);
        if (*steps_opt)
            cfg.steps = steps;
        if (*dt_opt)
            cfg.dt = dt;
        if (*seed_opt)
            cfg.seed = seed;
        cfg.emit = holecov::parse_emit(emit);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return holecov::run_command(cfg);
}
