#pragma once

#include <complex>
#include <iomanip>
#include <optional>
#include <sstream>
#include <vector>

#include "smlab/fields/fokker_planck.hpp"
#include "smlab/fields/wave.hpp"
#include "smlab/io.hpp"

namespace smlab
{
//! One CSV with columns x, value_real, value_imag.
template<class Derived>
void write_field_csv(fs::path const& path,
                     Grid1D const& grid,
                     Eigen::MatrixBase<Derived> const& field)
{
    require_size(grid, field.size(), "write_field_csv");
    auto out = open_output(path);
    out << "x,value_real,value_imag\n";
    for (Eigen::Index i = 0; i < field.size(); ++i)
    {
        std::complex<double> v(field[i]);
        out << format_double(grid.x(static_cast<std::size_t>(i))) << ','
            << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
    }
    check_written(out, path);
}

//---------------------------------------------------------------------------//
/*!
 * Write one CSV per stored time plus a JSON sidecar next to each.
 *
 * Files are named <tt>stem_0000.csv</tt> and <tt>stem_0000.json</tt>.
 * Returns the CSV paths.
 */
template<class Field>
std::vector<fs::path> write_snapshots(fs::path const& dir,
                                      std::string const& stem,
                                      Grid1D const& grid,
                                      std::vector<double> const& times,
                                      std::vector<Field> const& fields,
                                      std::optional<DiffusionParams> params = {},
                                      Json extra = Json::object())
{
    if (times.size() != fields.size())
        throw InvalidInput("write_snapshots: times and fields differ in length");
    std::vector<fs::path> written;
    for (std::size_t k = 0; k < fields.size(); ++k)
    {
        std::ostringstream name;
        name << stem << '_' << std::setw(4) << std::setfill('0') << k;
        fs::path csv = dir / (name.str() + ".csv");
        write_field_csv(csv, grid, fields[k]);
        Json meta = {{"grid", to_json(grid)}, {"time", times[k]}, {"index", k}};
        if (params)
            meta["params"] = to_json(*params);
        for (auto const& [key, value] : extra.items())
            meta[key] = value;
        write_json(dir / (name.str() + ".json"), meta);
        written.push_back(csv);
    }
    return written;
}

inline std::vector<fs::path> write_wave_solution(fs::path const& dir,
                                                 std::string const& stem,
                                                 WaveSolution const& ws)
{
    return write_snapshots(dir, stem, ws.grid, ws.times, ws.psi, std::nullopt,
                           {{"field", "psi"}});
}

inline std::vector<fs::path> write_density_sequence(fs::path const& dir,
                                                    std::string const& stem,
                                                    DensitySequence const& seq)
{
    return write_snapshots(dir, stem, seq.grid, seq.times, seq.rho, std::nullopt,
                           {{"field", "rho"}});
}

}  // namespace smlab
