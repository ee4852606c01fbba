#include "holecov/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "holecov/config.hpp"
#include "holecov/output.hpp"

namespace holecov {

EmitFlags parse_emit(const std::string& list)
{
    EmitFlags out{false, false, false};
    std::istringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item == "trace")
            out.trace = true;
        else if (item == "summary")
            out.summary = true;
        else if (item == "plotdata")
            out.plotdata = true;
        else
            throw ValidationError("unknown emit target '" + item + "'");
    }
    return out;
}

int run_command(const RunConfig& config)
{
    Scenario sc;
    try {
        if (!std::filesystem::exists(config.scenario))
            throw ValidationError("scenario file not found: " + config.scenario.string());
        sc = load_config(config.scenario);
        if (config.mode)
            sc.mode = *config.mode;
        if (config.steps)
            sc.steps = *config.steps;
        if (config.dt)
            sc.dt = *config.dt;
        if (config.seed)
            sc.seed = *config.seed;
        sc.validate();
        std::filesystem::create_directories(config.out_dir);
    } catch (const ParseError& e) {
        std::cerr << "error: " << config.scenario.string() << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        spdlog::info("running {} agents for {} steps in {} mode", sc.agents.size(), sc.steps, to_string(sc.mode));
        const RunResult result = run(sc);
        if (config.emit.trace) {
            std::ofstream f(config.out_dir / "trace.csv");
            write_trace(f, result.trace);
            if (!f)
                throw Error("cannot write trace.csv");
        }
        if (config.emit.summary) {
            std::ofstream f(config.out_dir / "summary.txt");
            write_summary(f, sc, result);
            if (!f)
                throw Error("cannot write summary.txt");
        }
        if (config.emit.plotdata)
            emit_plotdata(config.out_dir, result.trace);
        if (sc.strict_clamps && result.summary.clamp_events > 0) {
            std::cerr << "error: state clamps activated " << result.summary.clamp_events << " times\n";
            return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace holecov
