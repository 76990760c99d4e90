#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smlab/fields/oracle.hpp"
#include "smlab/io.hpp"

namespace smlab
{
inline constexpr int config_schema_version = 1;

struct StateSpec
{
    OracleKind oracle{OracleKind::ho_ground};
    double x0{0};
    double sigma0{1};
    double omega{1};
    double mass{1};
    double hbar{1};
    //! "oracle" samples the closed form; "schrodinger" propagates it numerically.
    std::string solver{"oracle"};
    //! Spacing of stored field snapshots; zero picks one from the SDE spec.
    double field_dt{0};
};

struct GridSpec
{
    double x_min{-8};
    double x_max{8};
    std::size_t n{801};
};

struct ParamSpec
{
    ParamKind kind{ParamKind::nu};
    double value{0.5};
    Mode mode{Mode::real};
};

struct SdeSpec
{
    double dt{1e-3};
    std::size_t n_steps{1000};
    std::size_t n_paths{10000};
    std::optional<std::uint64_t> seed;
    std::size_t workers{1};
};

struct CheckRequest
{
    std::string name;
    std::optional<double> tolerance;
};

struct ExperimentConfig
{
    int schema_version{config_schema_version};
    StateSpec state;
    GridSpec grid;
    std::vector<ParamSpec> params{ParamSpec{}};
    std::optional<SdeSpec> sde;
    std::vector<CheckRequest> checks;
    std::string output_dir;
};

inline DiffusionParams make_params(ParamSpec const& s, StateSpec const& st)
{
    return diffusion_params(s.kind, s.value, st.mass, st.hbar, s.mode);
}

inline Grid1D make_grid(GridSpec const& g)
{
    return Grid1D(g.x_min, g.x_max, g.n);
}

//---------------------------------------------------------------------------//
// SERIALIZATION
//---------------------------------------------------------------------------//

inline Json to_json(ExperimentConfig const& c)
{
    Json params = Json::array();
    for (auto const& p : c.params)
    {
        if (p.mode != Mode::real)
            params.push_back({{"mode", to_string(p.mode)}});
        else
        {
            char const* key = p.kind == ParamKind::nu ? "nu" : p.kind == ParamKind::z ? "z" : "beta";
            params.push_back({{key, p.value}});
        }
    }
    Json checks = Json::array();
    for (auto const& r : c.checks)
    {
        if (r.tolerance)
            checks.push_back({{"name", r.name}, {"tolerance", *r.tolerance}});
        else
            checks.push_back(r.name);
    }
    Json j{{"schema_version", c.schema_version},
           {"state",
            {{"oracle", to_string(c.state.oracle)},
             {"x0", c.state.x0},
             {"sigma0", c.state.sigma0},
             {"omega", c.state.omega},
             {"mass", c.state.mass},
             {"hbar", c.state.hbar},
             {"solver", c.state.solver},
             {"field_dt", c.state.field_dt}}},
           {"grid", {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"n", c.grid.n}}},
           {"params", params},
           {"checks", checks}};
    if (c.sde)
    {
        j["sde"] = {{"dt", c.sde->dt},
                    {"n_steps", c.sde->n_steps},
                    {"n_paths", c.sde->n_paths},
                    {"seed", c.sde->seed ? Json(*c.sde->seed) : Json(nullptr)}};
    }
    // Output location and worker count do not change results.
    return j;
}

namespace detail
{
//! Typed field access that reports the dotted path on failure.
class ConfigReader
{
  public:
    ConfigReader(Json const& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            fail(path_, "expected an object");
    }

    [[noreturn]] static void fail(std::string const& field, std::string const& what)
    {
        throw ConfigError("config field '" + field + "': " + what);
    }

    std::string field(std::string const& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(std::string const& key) const { return j_.contains(key); }

    Json const& at(std::string const& key) const { return j_.at(key); }

    void only(std::set<std::string> const& allowed) const
    {
        for (auto const& [k, v] : j_.items())
        {
            if (!allowed.count(k))
                fail(field(k), "unknown key");
        }
    }

    double number(std::string const& key, double fallback) const
    {
        if (!has(key))
            return fallback;
        auto const& v = j_.at(key);
        if (!v.is_number())
            fail(field(key), "expected a number");
        return v.get<double>();
    }

    std::size_t count(std::string const& key, std::size_t fallback) const
    {
        if (!has(key))
            return fallback;
        auto const& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            fail(field(key), "expected a non-negative integer");
        return v.get<std::size_t>();
    }

    std::string text(std::string const& key, std::string fallback) const
    {
        if (!has(key))
            return fallback;
        auto const& v = j_.at(key);
        if (!v.is_string())
            fail(field(key), "expected a string");
        return v.get<std::string>();
    }

  private:
    Json const& j_;
    std::string path_;
};

inline std::pair<std::size_t, std::size_t> line_and_column(std::string const& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
            ++col;
    }
    return {line, col};
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Parse an experiment configuration.
 *
 * Syntax errors report line and column, field errors the dotted field
 * path. Check names are validated later against the registry.
 */
inline ExperimentConfig parse_config(std::string const& text)
{
    Json j;
    try
    {
        j = Json::parse(text);
    }
    catch (nlohmann::json::parse_error const& e)
    {
        auto [line, col] = detail::line_and_column(text, e.byte);
        throw ConfigError("config parse error at line " + std::to_string(line) + ", column "
                          + std::to_string(col) + ": " + e.what());
    }
    using detail::ConfigReader;
    ConfigReader root(j, "");
    root.only({"schema_version", "state", "grid", "params", "sde", "checks", "tolerances",
               "output_dir"});

    ExperimentConfig c;
    if (!root.has("schema_version"))
        ConfigReader::fail("schema_version", "missing");
    c.schema_version = static_cast<int>(root.count("schema_version", 0));
    if (c.schema_version != config_schema_version)
    {
        ConfigReader::fail("schema_version", "unsupported version "
                                                 + std::to_string(c.schema_version));
    }

    if (root.has("state"))
    {
        ConfigReader s(root.at("state"), "state");
        s.only({"oracle", "x0", "sigma0", "omega", "mass", "hbar", "solver", "field_dt"});
        try
        {
            c.state.oracle = oracle_from_string(s.text("oracle", "ho_ground"));
        }
        catch (InvalidInput const& e)
        {
            ConfigReader::fail("state.oracle", e.what());
        }
        c.state.x0 = s.number("x0", c.state.x0);
        c.state.sigma0 = s.number("sigma0", c.state.sigma0);
        c.state.omega = s.number("omega", c.state.omega);
        c.state.mass = s.number("mass", c.state.mass);
        c.state.hbar = s.number("hbar", c.state.hbar);
        c.state.solver = s.text("solver", c.state.solver);
        c.state.field_dt = s.number("field_dt", 0);
        if (c.state.solver != "oracle" && c.state.solver != "schrodinger")
            ConfigReader::fail("state.solver", "expected 'oracle' or 'schrodinger'");
        for (auto [key, v] : {std::pair{"mass", c.state.mass}, {"hbar", c.state.hbar},
                              {"omega", c.state.omega}, {"sigma0", c.state.sigma0}})
        {
            if (!(v > 0))
                ConfigReader::fail(std::string("state.") + key, "must be positive");
        }
        if (c.state.field_dt < 0)
            ConfigReader::fail("state.field_dt", "must be non-negative");
    }

    if (root.has("grid"))
    {
        ConfigReader g(root.at("grid"), "grid");
        g.only({"x_min", "x_max", "n"});
        c.grid.x_min = g.number("x_min", c.grid.x_min);
        c.grid.x_max = g.number("x_max", c.grid.x_max);
        c.grid.n = g.count("n", c.grid.n);
        if (!(c.grid.x_max > c.grid.x_min))
            ConfigReader::fail("grid.x_max", "must exceed grid.x_min");
        if (c.grid.n < 4)
            ConfigReader::fail("grid.n", "need at least 4 nodes");
    }

    if (root.has("params"))
    {
        auto const& list = root.at("params");
        if (!list.is_array() || list.empty())
            ConfigReader::fail("params", "expected a non-empty array");
        c.params.clear();
        for (std::size_t i = 0; i < list.size(); ++i)
        {
            std::string path = "params[" + std::to_string(i) + "]";
            ConfigReader p(list[i], path);
            p.only({"nu", "z", "beta", "mode"});
            ParamSpec spec;
            int given = p.has("nu") + p.has("z") + p.has("beta");
            if (p.has("mode"))
            {
                try
                {
                    spec.mode = mode_from_string(p.text("mode", "real"));
                }
                catch (Error const& e)
                {
                    ConfigReader::fail(path + ".mode", e.what());
                }
            }
            if (spec.mode == Mode::real && given != 1)
                ConfigReader::fail(path, "give exactly one of nu, z, beta");
            if (p.has("nu"))
                spec = {ParamKind::nu, p.number("nu", 0), spec.mode};
            else if (p.has("z"))
                spec = {ParamKind::z, p.number("z", 0), spec.mode};
            else if (p.has("beta"))
                spec = {ParamKind::beta, p.number("beta", 0), spec.mode};
            try
            {
                make_params(spec, c.state);
            }
            catch (Error const& e)
            {
                ConfigReader::fail(path, e.what());
            }
            c.params.push_back(spec);
        }
    }

    if (root.has("sde"))
    {
        ConfigReader s(root.at("sde"), "sde");
        s.only({"dt", "n_steps", "n_paths", "seed", "workers"});
        SdeSpec sde;
        sde.dt = s.number("dt", sde.dt);
        sde.n_steps = s.count("n_steps", sde.n_steps);
        sde.n_paths = s.count("n_paths", sde.n_paths);
        sde.workers = std::max<std::size_t>(1, s.count("workers", sde.workers));
        if (s.has("seed"))
            sde.seed = static_cast<std::uint64_t>(s.count("seed", 0));
        if (!(sde.dt > 0))
            ConfigReader::fail("sde.dt", "must be positive");
        if (sde.n_paths < 2)
            ConfigReader::fail("sde.n_paths", "need at least 2 paths");
        c.sde = sde;
    }

    std::map<std::string, double> overrides;
    if (root.has("tolerances"))
    {
        auto const& t = root.at("tolerances");
        if (!t.is_object())
            ConfigReader::fail("tolerances", "expected an object");
        for (auto const& [k, v] : t.items())
        {
            if (!v.is_number())
                ConfigReader::fail("tolerances." + k, "expected a number");
            overrides[k] = v.get<double>();
        }
    }

    if (root.has("checks"))
    {
        auto const& list = root.at("checks");
        if (!list.is_array())
            ConfigReader::fail("checks", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i)
        {
            std::string path = "checks[" + std::to_string(i) + "]";
            CheckRequest r;
            if (list[i].is_string())
                r.name = list[i].get<std::string>();
            else
            {
                ConfigReader o(list[i], path);
                o.only({"name", "tolerance"});
                r.name = o.text("name", "");
                if (o.has("tolerance"))
                    r.tolerance = o.number("tolerance", 0);
            }
            if (r.name.empty())
                ConfigReader::fail(path, "missing check name");
            if (!r.tolerance && overrides.count(r.name))
                r.tolerance = overrides.at(r.name);
            if (r.tolerance && !(*r.tolerance > 0))
                ConfigReader::fail(path + ".tolerance", "must be positive");
            c.checks.push_back(r);
        }
    }
    for (auto const& [k, v] : overrides)
    {
        bool used = std::any_of(c.checks.begin(), c.checks.end(),
                                [&](auto const& r) { return r.name == k; });
        if (!used)
            ConfigReader::fail("tolerances." + k, "no such check requested");
    }

    c.output_dir = root.text("output_dir", "");
    return c;
}

inline ExperimentConfig load_config(fs::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace smlab
