#pragma once

#include <string>

#include "smlab/algebra/space.hpp"
#include "smlab/io.hpp"

namespace smlab
{
//! Outcome of one operator identity check.
struct ResidualReport
{
    std::string identity_name;
    std::size_t grid_n{0};
    double dx{0};
    Complex nu{0};
    double max_interior_residual{0};
    double tolerance{0};
    bool pass{false};
    //! Free-form remark, e.g. a sign convention the check relies on.
    std::string note;
};

inline ResidualReport make_residual_report(std::string name,
                                           Grid1D const& grid,
                                           DiffusionParams const& p,
                                           double residual,
                                           double tolerance,
                                           std::string note = {})
{
    return {std::move(name), grid.size(), grid.dx(), p.nu, residual, tolerance,
            residual < tolerance, std::move(note)};
}

inline Json to_json(ResidualReport const& r)
{
    Json j{{"identity_name", r.identity_name},
           {"grid_n", r.grid_n},
           {"dx", r.dx},
           {"nu", r.nu.imag() == 0 ? Json(r.nu.real()) : Json{{"re", r.nu.real()}, {"im", r.nu.imag()}}},
           {"max_interior_residual", r.max_interior_residual},
           {"tolerance", r.tolerance},
           {"pass", r.pass}};
    if (!r.note.empty())
        j["note"] = r.note;
    return j;
}

//! Row-major CSV with columns <tt>row,col,re,im</tt>; zero entries are kept.
inline void write_matrix_csv(fs::path const& path, OperatorMatrix const& op)
{
    auto out = open_output(path);
    out << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < op.m.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < op.m.cols(); ++j)
        {
            out << i << ',' << j << ',' << format_double(op.m(i, j).real()) << ','
                << format_double(op.m(i, j).imag()) << '\n';
        }
    }
    check_written(out, path);
}

}  // namespace smlab
