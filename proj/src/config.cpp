#include "holecov/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace holecov {

ParseError::ParseError(int line, int column, const std::string& message)
    : Error(fmt::format("line {}, column {}: {}", line, column, message)), line_(line), column_(column)
{
}

namespace {

struct Token {
    std::string_view text;
    int column = 1;
};

std::vector<Token> tokenize(std::string_view line)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        if (i >= line.size())
            break;
        if (line[i] == '=') {
            out.push_back({line.substr(i, 1), static_cast<int>(i) + 1});
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '=')
            ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Scenario parse()
    {
        std::size_t pos = 0;
        while (pos <= text_.size()) {
            std::size_t end = text_.find('\n', pos);
            if (end == std::string_view::npos)
                end = text_.size();
            ++line_;
            std::string_view line = text_.substr(pos, end - pos);
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            handle(line);
            pos = end + 1;
        }
        sc_.validate();
        return sc_;
    }

private:
    [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(line_, t.column, msg); }

    double number(const Token& t) const
    {
        double v = 0.0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        if (!t.text.empty() && *first == '+')
            ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            fail(t, fmt::format("expected a number, found '{}'", t.text));
        return v;
    }

    template <typename Int = int>
    Int integer(const Token& t) const
    {
        Int v = 0;
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec == std::errc::result_out_of_range)
            fail(t, fmt::format("integer out of range: '{}'", t.text));
        if (ec != std::errc() || ptr != t.text.data() + t.text.size())
            fail(t, fmt::format("expected an integer, found '{}'", t.text));
        return v;
    }

    bool boolean(const Token& t) const
    {
        if (t.text == "true")
            return true;
        if (t.text == "false")
            return false;
        fail(t, fmt::format("expected true or false, found '{}'", t.text));
    }

    void handle(std::string_view line)
    {
        const std::vector<Token> tok = tokenize(line);
        if (tok.empty())
            return;
        if (tok[0].text.front() == '[') {
            if (tok.size() != 1 || tok[0].text.back() != ']')
                fail(tok[0], "malformed section header");
            const std::string_view name = tok[0].text.substr(1, tok[0].text.size() - 2);
            if (name != "agents" && name != "sensing" && name != "density" && name != "sim" && name != "controller")
                fail(tok[0], fmt::format("unknown section '{}'", name));
            section_ = std::string(name);
            return;
        }
        if (section_.empty())
            fail(tok[0], "content before the first section");
        if (tok.size() >= 2 && tok[1].text == "=") {
            if (tok.size() < 3)
                fail(tok[1], "missing value");
            assign(tok[0], std::vector<Token>(tok.begin() + 2, tok.end()));
            return;
        }
        row(tok);
    }

    void row(const std::vector<Token>& tok)
    {
        std::vector<double> v;
        for (const auto& t : tok)
            v.push_back(number(t));
        if (section_ == "agents") {
            if (v.size() != 4 && v.size() != 8)
                fail(tok[0], "agent rows take 4 values (x y z lambda) or 8 with a nominal input");
            sc_.agents.push_back({v[0], v[1], v[2], v[3]});
            if (v.size() == 8) {
                sc_.constant_nominal.resize(sc_.agents.size(), Vec4::Zero());
                sc_.constant_nominal.back() = Vec4(v[4], v[5], v[6], v[7]);
            }
        } else if (section_ == "density") {
            if (v.size() != 4)
                fail(tok[0], "density rows take 4 values (weight mx my scale)");
            sc_.density.components.push_back({v[0], Vec2(v[1], v[2]), v[3]});
        } else {
            fail(tok[0], fmt::format("section [{}] holds key = value lines only", section_));
        }
    }

    void single(const Token& key, const std::vector<Token>& val) const
    {
        if (val.size() != 1)
            fail(val[1], fmt::format("'{}' takes a single value", key.text));
    }

    void assign(const Token& key, const std::vector<Token>& val)
    {
        const std::string_view k = key.text;
        if (section_ == "density" && k == "mission") {
            if (val.size() != 4)
                fail(key, "mission takes 4 values (xmin ymin xmax ymax)");
            sc_.density.mission = {number(val[0]), number(val[1]), number(val[2]), number(val[3])};
            return;
        }
        single(key, val);
        const Token& t = val[0];
        if (section_ == "sensing") {
            SensingParams& p = sc_.sensing;
            if (k == "r")
                p.r = number(t);
            else if (k == "kappa")
                p.kappa = number(t);
            else if (k == "sigma")
                p.sigma = number(t);
            else if (k == "M")
                p.M = number(t);
            else if (k == "w")
                p.w = number(t);
            else
                unknown(key);
        } else if (section_ == "sim") {
            if (k == "dt")
                sc_.dt = number(t);
            else if (k == "steps")
                sc_.steps = integer(t);
            else if (k == "mode")
                sc_.mode = parse_mode(std::string(t.text));
            else if (k == "nominal")
                sc_.nominal = parse_nominal_source(std::string(t.text));
            else if (k == "grid_resolution")
                sc_.grid_resolution = number(t);
            else if (k == "hole_every")
                sc_.hole_every = integer(t);
            else if (k == "min_z")
                sc_.min_z = number(t);
            else if (k == "min_lambda")
                sc_.min_lambda = number(t);
            else if (k == "seed")
                sc_.seed = integer<std::uint64_t>(t);
            else if (k == "jitter")
                sc_.jitter = number(t);
            else if (k == "strict_clamps")
                sc_.strict_clamps = boolean(t);
            else
                unknown(key);
        } else if (section_ == "controller") {
            ControllerParams& c = sc_.controller;
            if (k == "epsilon")
                c.epsilon = number(t);
            else if (k == "guard_threshold")
                c.guard_threshold = number(t);
            else if (k == "w_lambda")
                c.w_lambda = number(t);
            else if (k == "alpha_gain")
                c.alpha.gain = number(t);
            else if (k == "alpha_power")
                c.alpha.power = integer(t);
            else
                unknown(key);
        } else {
            unknown(key);
        }
    }

    [[noreturn]] void unknown(const Token& key) const
    {
        fail(key, fmt::format("unknown key '{}' in section [{}]", key.text, section_));
    }

    std::string_view text_;
    int line_ = 0;
    std::string section_;
    Scenario sc_;
};

}  // namespace

Scenario parse_config(std::string_view text)
{
    return Parser(text).parse();
}

Scenario load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize(const Scenario& sc)
{
    std::string out;
    auto line = [&out](const std::string& s) {
        out += s;
        out += '\n';
    };
    line("[agents]");
    for (std::size_t i = 0; i < sc.agents.size(); ++i) {
        const AgentState& a = sc.agents[i];
        std::string row = fmt::format("{} {} {} {}", a.x, a.y, a.z, a.lambda);
        if (i < sc.constant_nominal.size()) {
            const Vec4& u = sc.constant_nominal[i];
            row += fmt::format(" {} {} {} {}", u[0], u[1], u[2], u[3]);
        }
        line(row);
    }
    line("");
    line("[sensing]");
    line(fmt::format("r = {}", sc.sensing.r));
    line(fmt::format("kappa = {}", sc.sensing.kappa));
    line(fmt::format("sigma = {}", sc.sensing.sigma));
    line(fmt::format("M = {}", sc.sensing.M));
    line(fmt::format("w = {}", sc.sensing.w));
    line("");
    line("[density]");
    const Rect& m = sc.density.mission;
    line(fmt::format("mission = {} {} {} {}", m.xmin, m.ymin, m.xmax, m.ymax));
    for (const auto& c : sc.density.components)
        line(fmt::format("{} {} {} {}", c.weight, c.mean.x(), c.mean.y(), c.scale));
    line("");
    line("[sim]");
    line(fmt::format("dt = {}", sc.dt));
    line(fmt::format("steps = {}", sc.steps));
    line(fmt::format("mode = {}", to_string(sc.mode)));
    line(fmt::format("nominal = {}", to_string(sc.nominal)));
    line(fmt::format("grid_resolution = {}", sc.grid_resolution));
    line(fmt::format("hole_every = {}", sc.hole_every));
    line(fmt::format("min_z = {}", sc.min_z));
    line(fmt::format("min_lambda = {}", sc.min_lambda));
    line(fmt::format("seed = {}", sc.seed));
    line(fmt::format("jitter = {}", sc.jitter));
    line(fmt::format("strict_clamps = {}", sc.strict_clamps));
    line("");
    line("[controller]");
    line(fmt::format("epsilon = {}", sc.controller.epsilon));
    line(fmt::format("guard_threshold = {}", sc.controller.guard_threshold));
    line(fmt::format("w_lambda = {}", sc.controller.w_lambda));
    line(fmt::format("alpha_gain = {}", sc.controller.alpha.gain));
    line(fmt::format("alpha_power = {}", sc.controller.alpha.power));
    return out;
}

}  // namespace holecov
