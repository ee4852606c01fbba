#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "holecov/cli.hpp"
#include "holecov/config.hpp"
#include "holecov/output.hpp"

using namespace holecov;
namespace fs = std::filesystem;

namespace {

const std::string kMinimal = R"(
[agents]
10 10 6 1
16 10 6 1
13 15 6 1

[density]
mission = 0 0 30 30
1 13 12 6
)";

fs::path scenario(const char* name)
{
    return fs::path(HOLECOV_SCENARIO_DIR) / name;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("holecov_test_" + name);
    fs::remove_all(p);
    return p;
}

std::vector<std::string> lines(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

void check_same(const Scenario& a, const Scenario& b)
{
    REQUIRE(a.agents.size() == b.agents.size());
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
        CHECK(a.agents[i].as_vector() == b.agents[i].as_vector());
        CHECK(a.constant_input(i) == b.constant_input(i));
    }
    CHECK(a.sensing.r == b.sensing.r);
    CHECK(a.sensing.kappa == b.sensing.kappa);
    CHECK(a.sensing.sigma == b.sensing.sigma);
    CHECK(a.sensing.M == b.sensing.M);
    CHECK(a.sensing.w == b.sensing.w);
    REQUIRE(a.density.components.size() == b.density.components.size());
    for (std::size_t k = 0; k < a.density.components.size(); ++k) {
        CHECK(a.density.components[k].weight == b.density.components[k].weight);
        CHECK(a.density.components[k].mean == b.density.components[k].mean);
        CHECK(a.density.components[k].scale == b.density.components[k].scale);
    }
    CHECK(a.density.mission.xmin == b.density.mission.xmin);
    CHECK(a.density.mission.ymax == b.density.mission.ymax);
    CHECK(a.controller.epsilon == b.controller.epsilon);
    CHECK(a.controller.guard_threshold == b.controller.guard_threshold);
    CHECK(a.controller.w_lambda == b.controller.w_lambda);
    CHECK(a.controller.alpha.gain == b.controller.alpha.gain);
    CHECK(a.controller.alpha.power == b.controller.alpha.power);
    CHECK(a.mode == b.mode);
    CHECK(a.nominal == b.nominal);
    CHECK(a.dt == b.dt);
    CHECK(a.steps == b.steps);
    CHECK(a.grid_resolution == b.grid_resolution);
    CHECK(a.hole_every == b.hole_every);
    CHECK(a.min_z == b.min_z);
    CHECK(a.min_lambda == b.min_lambda);
    CHECK(a.seed == b.seed);
    CHECK(a.jitter == b.jitter);
    CHECK(a.strict_clamps == b.strict_clamps);
}

}  // namespace

TEST_CASE("minimal scenario takes the defaults")
{
    const Scenario s = parse_config(kMinimal);
    CHECK(s.agents.size() == 3);
    CHECK(s.controller.epsilon == 0.2);
    CHECK(s.controller.guard_threshold == 1e4);
    CHECK(s.controller.w_lambda == 3e6);
    CHECK(s.controller.alpha.power == 3);
    CHECK(s.mode == Mode::Ncbf);
    CHECK(s.nominal == NominalSource::Coverage);
    CHECK(s.density.components.size() == 1);
    CHECK(s.density.mission.xmax == 30.0);
}

TEST_CASE("parse errors carry line and column")
{
    SUBCASE("unknown key")
    {
        try {
            parse_config(kMinimal + "[sim]\n  colour = 3\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 11);
            CHECK(e.column() == 3);
            CHECK(std::string(e.what()).find("line 11, column 3") == 0);
        }
    }
    SUBCASE("unknown section")
    {
        CHECK_THROWS_AS(parse_config(kMinimal + "[camera]\n"), ParseError);
    }
    SUBCASE("malformed number")
    {
        try {
            parse_config(kMinimal + "[sim]\ndt = 0.0x1\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 11);
            CHECK(e.column() == 6);
        }
    }
    SUBCASE("agent rows need four or eight numbers")
    {
        CHECK_THROWS_AS(parse_config("[agents]\n1 2 3 4 5\n[density]\nmission = 0 0 1 1\n"), ParseError);
        CHECK_NOTHROW(parse_config("[agents]\n1 2 3 4 0 0 0 0\n[density]\nmission = 0 0 10 10\n"));
    }
    SUBCASE("integers are range checked")
    {
        CHECK_THROWS_AS(parse_config(kMinimal + "[sim]\nsteps = 99999999999\n"), ParseError);
        CHECK_THROWS_AS(parse_config(kMinimal + "[sim]\nseed = -1\n"), ParseError);
        CHECK_THROWS_AS(parse_config(kMinimal + "[sim]\nsteps = 2.5\n"), ParseError);
    }
    SUBCASE("row outside a section")
    {
        CHECK_THROWS_AS(parse_config("1 2 3 4\n"), ParseError);
    }
    SUBCASE("comments are ignored")
    {
        CHECK_NOTHROW(parse_config("# header\n" + kMinimal + "[sim] # trailing\nsteps = 3 # three\n"));
    }
}

TEST_CASE("invalid values are validation errors")
{
    CHECK_THROWS_WITH_AS(parse_config(kMinimal + "[sim]\ndt = 0\n"), "dt must be positive", ValidationError);
    CHECK_THROWS_AS(parse_config(kMinimal + "[sim]\nmode = fast\n"), ValidationError);
    CHECK_THROWS_AS(parse_config(kMinimal + "[controller]\nalpha_power = 2\n"), ValidationError);
    CHECK_THROWS_AS(parse_config(kMinimal + "[sensing]\nsigma = -1\n"), ValidationError);
}

TEST_CASE("serialize round trip")
{
    for (const char* name : {"trio.cfg", "nine_agents.cfg", "five_agents.cfg"}) {
        CAPTURE(name);
        const Scenario s = load_config(scenario(name));
        const Scenario back = parse_config(serialize(s));
        check_same(s, back);
        CHECK(serialize(back) == serialize(s));
    }
    Scenario odd = parse_config(kMinimal);
    odd.dt = 0.1 + 0.2;
    odd.seed = 18446744073709551615ull;
    odd.strict_clamps = true;
    odd.mode = Mode::HfOnly;
    check_same(odd, parse_config(serialize(odd)));
}

TEST_CASE("bundled scenarios carry the published parameters")
{
    const Scenario nine = load_config(scenario("nine_agents.cfg"));
    CHECK(nine.agents.size() == 9);
    CHECK(nine.density.mission.width() == 60.0);
    CHECK(nine.density.mission.height() == 60.0);
    CHECK(nine.sensing.kappa == 4.0);
    CHECK(nine.sensing.sigma == 3.0);
    CHECK(nine.sensing.M == 11.0);
    CHECK(nine.sensing.w == 0.4);
    CHECK(nine.controller.w_lambda == 3.0e6);
    CHECK(nine.controller.epsilon == 0.2);
    CHECK(nine.controller.alpha.gain == 1.0);
    CHECK(nine.controller.alpha.power == 3);
    CHECK(nine.grid_resolution == 0.3);

    const Scenario five = load_config(scenario("five_agents.cfg"));
    CHECK(five.agents.size() == 5);
    CHECK(five.density.mission.width() * five.density.mission.height() == doctest::Approx(12.0));
    CHECK(five.sensing.kappa == 4.0);
    CHECK(five.sensing.sigma == 1.0);
    CHECK(five.sensing.M == 0.7);
    CHECK(five.sensing.w == 0.2);
    CHECK(five.controller.w_lambda == 1.0e6);
    CHECK(five.controller.epsilon == 0.2);
    CHECK(five.controller.alpha.gain == 20.0);
    CHECK(five.controller.alpha.power == 3);

    const Scenario trio = load_config(scenario("trio.cfg"));
    CHECK(trio.agents.size() == 3);
    CHECK(trio.nominal == NominalSource::Constant);
}

TEST_CASE("emit list")
{
    const EmitFlags all = parse_emit("trace,summary,plotdata");
    CHECK((all.trace && all.summary && all.plotdata));
    const EmitFlags one = parse_emit("plotdata");
    CHECK_FALSE(one.trace);
    CHECK(one.plotdata);
    CHECK_THROWS_AS(parse_emit("trace,pictures"), ValidationError);
}

TEST_CASE("run command exit codes")
{
    RunConfig cfg;
    cfg.out_dir = scratch("missing");
    cfg.scenario = "/nonexistent/holecov.cfg";
    CHECK(run_command(cfg) == 2);

    const fs::path bad = scratch("bad.cfg");
    std::ofstream(bad) << kMinimal << "[sim]\nsteps = 0\n";
    cfg.scenario = bad;
    CHECK(run_command(cfg) == 2);

    const fs::path clamp = scratch("clamp.cfg");
    std::ofstream(clamp) << "[agents]\n5 5 1 1 0 0 -1000 0\n[density]\nmission = 0 0 10 10\n1 5 5 3\n"
                         << "[sim]\nnominal = constant\nsteps = 2\nstrict_clamps = true\n";
    cfg.scenario = clamp;
    CHECK(run_command(cfg) == 3);
    fs::remove(bad);
    fs::remove(clamp);
}

TEST_CASE("trio run writes a safe trace")
{
    RunConfig cfg;
    cfg.scenario = scenario("trio.cfg");
    cfg.out_dir = scratch("trio");
    REQUIRE(run_command(cfg) == 0);

    const auto trace = lines(cfg.out_dir / "trace.csv");
    REQUIRE(trace.size() == 1501);
    CHECK(trace[0].rfind("step,time[s],H,H_M,H_O,exact_holes,witnesses,switch,x0[m],", 0) == 0);
    for (std::size_t k = 1; k < trace.size(); ++k)
        CHECK(trace[k].substr(0, trace[k].find(',')) == std::to_string(k - 1));

    const auto summary = lines(cfg.out_dir / "summary.txt");
    double min_ncbf = -1.0;
    for (const auto& l : summary)
        if (l.rfind("min_ncbf = ", 0) == 0)
            min_ncbf = std::stod(l.substr(11));
    CHECK(min_ncbf >= 0.0);
    fs::remove_all(cfg.out_dir);
}

TEST_CASE("plot data of a one-step run has one row per file")
{
    RunConfig cfg;
    cfg.scenario = scenario("trio.cfg");
    cfg.out_dir = scratch("plot");
    cfg.steps = 1;
    cfg.emit = parse_emit("plotdata");
    REQUIRE(run_command(cfg) == 0);
    CHECK_FALSE(fs::exists(cfg.out_dir / "trace.csv"));
    for (const char* f : {"positions.csv", "radius.csv", "ncbf.csv", "global.csv"}) {
        CAPTURE(f);
        const auto rows = lines(cfg.out_dir / f);
        CHECK(rows.size() == 2);
    }
    CHECK_THROWS_AS(emit_plotdata(cfg.out_dir, {}), Error);
    fs::remove_all(cfg.out_dir);
}

TEST_CASE("command-line overrides reach the run")
{
    RunConfig cfg;
    cfg.scenario = scenario("trio.cfg");
    cfg.out_dir = scratch("override");
    cfg.steps = 7;
    cfg.mode = Mode::NominalOnly;
    cfg.emit = parse_emit("trace,summary");
    REQUIRE(run_command(cfg) == 0);
    CHECK(lines(cfg.out_dir / "trace.csv").size() == 8);
    bool mode_seen = false;
    for (const auto& l : lines(cfg.out_dir / "summary.txt"))
        mode_seen = mode_seen || l == "mode = nominal-only";
    CHECK(mode_seen);
    fs::remove_all(cfg.out_dir);
}
