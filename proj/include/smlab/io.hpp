#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "smlab/grid.hpp"
#include "smlab/params.hpp"

namespace smlab
{
using Json = nlohmann::ordered_json;

namespace fs = std::filesystem;

inline void ensure_directory(fs::path const& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

inline std::ofstream open_output(fs::path const& path,
                                 std::ios::openmode mode = std::ios::out)
{
    if (path.has_parent_path())
        ensure_directory(path.parent_path());
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

inline void check_written(std::ofstream& out, fs::path const& path)
{
    out.flush();
    if (!out)
        throw IoError("write failed for " + path.string());
}

//! Shortest decimal form that reads back to the same double.
inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_json(fs::path const& path, Json const& j)
{
    auto out = open_output(path);
    out << j.dump(2) << '\n';
    check_written(out, path);
}

inline Json to_json(Grid1D const& g)
{
    return {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"n", g.size()}, {"dx", g.dx()}};
}

inline Json to_json(DiffusionParams const& p)
{
    return {{"mode", to_string(p.mode)},
            {"mass", p.mass},
            {"hbar", p.hbar},
            {"nu_re", p.nu.real()},
            {"nu_im", p.nu.imag()},
            {"z_re", p.z.real()},
            {"z_im", p.z.imag()},
            {"beta", p.beta}};
}

inline DiffusionParams params_from_json(Json const& j)
{
    DiffusionParams p;
    p.mode = mode_from_string(j.at("mode").get<std::string>());
    p.mass = j.at("mass").get<double>();
    p.hbar = j.at("hbar").get<double>();
    p.nu = Complex(j.at("nu_re").get<double>(), j.at("nu_im").get<double>());
    p.z = Complex(j.at("z_re").get<double>(), j.at("z_im").get<double>());
    p.beta = j.at("beta").get<double>();
    return p;
}

}  // namespace smlab
