#include "holecov/output.hpp"

#include <fstream>
#include <functional>
#include <string>

#include <fmt/format.h>

namespace holecov {

namespace {

using AgentColumns = std::function<void(std::string&, const AgentTrace&)>;

std::string agent_header(std::size_t n, std::initializer_list<const char*> names)
{
    std::string out;
    for (std::size_t i = 0; i < n; ++i)
        for (const char* name : names) {
            // Units, when present, follow the index: "x0[m]".
            const std::string s(name);
            const auto br = s.find('[');
            out += ',';
            out += br == std::string::npos ? s + std::to_string(i) : s.substr(0, br) + std::to_string(i) + s.substr(br);
        }
    return out;
}

void write_table(std::ostream& out, std::span<const TraceRecord> trace, const std::string& global_header,
                 const std::function<void(std::string&, const TraceRecord&)>& global_cols,
                 std::initializer_list<const char*> agent_names, const AgentColumns& agent_cols)
{
    const std::size_t n = trace.empty() ? 0 : trace.front().agents.size();
    out << "step,time[s]" << global_header << agent_header(n, agent_names) << '\n';
    std::string row;
    for (const TraceRecord& rec : trace) {
        row = fmt::format("{},{}", rec.step, rec.time);
        global_cols(row, rec);
        for (const AgentTrace& a : rec.agents)
            agent_cols(row, a);
        row += '\n';
        out << row;
    }
}

void global_columns(std::string& row, const TraceRecord& rec)
{
    row += fmt::format(",{},{},{},{},{},{}", rec.H, rec.H_M, rec.H_O, rec.exact_holes, rec.witnesses,
                       rec.switched ? 1 : 0);
}

const char* const kGlobalHeader = ",H,H_M,H_O,exact_holes,witnesses,switch";

}  // namespace

void write_trace(std::ostream& out, std::span<const TraceRecord> trace)
{
    write_table(out, trace, kGlobalHeader, global_columns,
                {"x[m]", "y[m]", "z[m]", "lambda[m]", "R[m]", "hmin", "argmax", "trios", "constraints",
                 "fallback", "clamped"},
                [](std::string& row, const AgentTrace& a) {
                    row += fmt::format(",{},{},{},{},{},{},{},{},{},{},{}", a.state.x, a.state.y, a.state.z,
                                       a.state.lambda, a.R, a.min_ncbf, a.argmax, a.trios, a.constraints,
                                       a.fallback ? 1 : 0, a.clamped ? 1 : 0);
                });
}

void write_summary(std::ostream& out, const Scenario& sc, const RunResult& result)
{
    const RunSummary& s = result.summary;
    out << fmt::format("mode = {}\n", to_string(sc.mode));
    out << fmt::format("agents = {}\n", sc.agents.size());
    out << fmt::format("steps = {}\n", s.steps);
    out << fmt::format("dt = {}\n", sc.dt);
    out << fmt::format("seed = {}\n", sc.seed);
    out << fmt::format("final_H = {}\n", s.final_H);
    out << fmt::format("min_ncbf = {}\n", s.min_ncbf);
    out << fmt::format("sampled_steps = {}\n", s.sampled_steps);
    out << fmt::format("witness_steps = {}\n", s.witness_steps);
    out << fmt::format("exact_hole_steps = {}\n", s.exact_hole_steps);
    out << fmt::format("switches = {}\n", s.switches);
    out << fmt::format("switch_induced_holes = {}\n", s.switch_induced_holes);
    out << fmt::format("max_hole_duration = {}\n", s.max_hole_duration);
    out << fmt::format("max_violation = {}\n", s.max_violation);
    out << fmt::format("fallbacks = {}\n", s.fallbacks);
    out << fmt::format("clamp_events = {}\n", s.clamp_events);
    const auto& fin = result.final_world.states;
    for (std::size_t i = 0; i < fin.size(); ++i)
        out << fmt::format("final_state{} = {} {} {} {}\n", i, fin[i].x, fin[i].y, fin[i].z, fin[i].lambda);
}

std::vector<std::filesystem::path> emit_plotdata(const std::filesystem::path& dir,
                                                 std::span<const TraceRecord> trace)
{
    if (trace.empty())
        throw Error("cannot emit plot data for an empty trace");
    std::vector<std::filesystem::path> written;
    auto open = [&](const char* name) {
        written.push_back(dir / name);
        std::ofstream f(written.back());
        if (!f)
            throw Error("cannot write " + written.back().string());
        return f;
    };
    auto none = [](std::string&, const TraceRecord&) {};
    {
        auto f = open("positions.csv");
        write_table(f, trace, "", none, {"x[m]", "y[m]", "z[m]", "lambda[m]"},
                    [](std::string& row, const AgentTrace& a) {
                        row += fmt::format(",{},{},{},{}", a.state.x, a.state.y, a.state.z, a.state.lambda);
                    });
    }
    {
        auto f = open("radius.csv");
        write_table(f, trace, "", none, {"R[m]"},
                    [](std::string& row, const AgentTrace& a) { row += fmt::format(",{}", a.R); });
    }
    {
        auto f = open("ncbf.csv");
        write_table(f, trace, "", none, {"hmin", "argmax"},
                    [](std::string& row, const AgentTrace& a) { row += fmt::format(",{},{}", a.min_ncbf, a.argmax); });
    }
    {
        auto f = open("global.csv");
        write_table(f, trace, kGlobalHeader, global_columns, {}, [](std::string&, const AgentTrace&) {});
    }
    return written;
}

}  // namespace holecov
