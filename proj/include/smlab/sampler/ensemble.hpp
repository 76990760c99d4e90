#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "smlab/io.hpp"
#include "smlab/params.hpp"

namespace smlab
{
//---------------------------------------------------------------------------//
/*!
 * Steps whose positions an ensemble keeps.
 *
 * Full path matrices at desk scale (1e5 paths by 1e4 steps) do not fit in
 * memory, so simulations record a chosen subset. Steps are sorted and unique.
 */
class RecordPlan
{
  public:
    RecordPlan() = default;

    explicit RecordPlan(std::vector<std::size_t> steps) : steps_(std::move(steps))
    {
        std::sort(steps_.begin(), steps_.end());
        steps_.erase(std::unique(steps_.begin(), steps_.end()), steps_.end());
    }

    static RecordPlan all(std::size_t n_steps) { return every(n_steps, 1); }

    //! Steps 0, k, 2k, ... and always the final step.
    static RecordPlan every(std::size_t n_steps, std::size_t k)
    {
        if (k == 0)
            throw InvalidInput("RecordPlan: stride must be positive");
        std::vector<std::size_t> s;
        for (std::size_t j = 0; j <= n_steps; j += k)
            s.push_back(j);
        s.push_back(n_steps);
        return RecordPlan(std::move(s));
    }

    //! Contiguous steps [first, last].
    static RecordPlan window(std::size_t first, std::size_t last)
    {
        std::vector<std::size_t> s;
        for (std::size_t j = first; j <= last; ++j)
            s.push_back(j);
        return RecordPlan(std::move(s));
    }

    RecordPlan& merge(RecordPlan const& other)
    {
        std::vector<std::size_t> s = steps_;
        s.insert(s.end(), other.steps_.begin(), other.steps_.end());
        *this = RecordPlan(std::move(s));
        return *this;
    }

    std::vector<std::size_t> const& steps() const { return steps_; }
    bool empty() const { return steps_.empty(); }
    std::size_t back() const { return steps_.back(); }

  private:
    std::vector<std::size_t> steps_;
};

//---------------------------------------------------------------------------//
/*!
 * Positions of a block of sample paths at the recorded steps.
 *
 * Column \c c of \c positions holds every path at step \c steps[c]. Paths
 * are numbered globally from \c path_offset so that an ensemble simulated in
 * chunks matches the one simulated at once.
 */
struct Ensemble
{
    std::size_t n_paths{0};
    std::size_t n_steps{0};
    std::size_t path_offset{0};
    double dt{0};
    double t0{0};
    std::uint64_t seed{0};
    DiffusionParams params;
    std::string provenance;
    double x_min{0};
    double x_max{0};
    std::vector<std::size_t> steps;
    Eigen::MatrixXd positions;

    bool recorded(std::size_t step) const
    {
        return std::binary_search(steps.begin(), steps.end(), step);
    }

    Eigen::Index column(std::size_t step) const
    {
        auto it = std::lower_bound(steps.begin(), steps.end(), step);
        if (it == steps.end() || *it != step)
        {
            throw InvalidInput("Ensemble: step " + std::to_string(step)
                               + " was not recorded");
        }
        return static_cast<Eigen::Index>(it - steps.begin());
    }

    auto at(std::size_t step) const { return positions.col(this->column(step)); }

    double time(std::size_t step) const
    {
        return t0 + static_cast<double>(step) * dt;
    }
};

//! CSV with columns path_id, step, x (global path ids).
inline void write_ensemble_csv(fs::path const& path, Ensemble const& e)
{
    auto out = open_output(path);
    out << "path_id,step,x\n";
    for (std::size_t k = 0; k < e.n_paths; ++k)
    {
        for (std::size_t c = 0; c < e.steps.size(); ++c)
        {
            out << (e.path_offset + k) << ',' << e.steps[c] << ','
                << format_double(e.positions(static_cast<Eigen::Index>(k),
                                             static_cast<Eigen::Index>(c)))
                << '\n';
        }
    }
    check_written(out, path);
}

//---------------------------------------------------------------------------//
/*!
 * Binary export: <tt>stem.bin</tt> of little-endian 64-bit floats, one row
 * per recorded step (row-major, paths along the row), and <tt>stem.json</tt>
 * declaring the layout.
 */
inline void write_ensemble_binary(fs::path const& dir,
                                  std::string const& stem,
                                  Ensemble const& e)
{
    fs::path bin = dir / (stem + ".bin");
    auto out = open_output(bin, std::ios::out | std::ios::binary);
    std::vector<unsigned char> buf(e.n_paths * 8);
    for (std::size_t c = 0; c < e.steps.size(); ++c)
    {
        for (std::size_t k = 0; k < e.n_paths; ++k)
        {
            double v = e.positions(static_cast<Eigen::Index>(k),
                                   static_cast<Eigen::Index>(c));
            auto bits = std::bit_cast<std::uint64_t>(v);
            for (int b = 0; b < 8; ++b)
                buf[k * 8 + static_cast<std::size_t>(b)]
                    = static_cast<unsigned char>(bits >> (8 * b));
        }
        out.write(reinterpret_cast<char const*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
    check_written(out, bin);

    Json header = {{"format", "f64-le"},
                   {"layout", "row-major"},
                   {"rows", e.steps.size()},
                   {"cols", e.n_paths},
                   {"row_meaning", "recorded step"},
                   {"col_meaning", "path"},
                   {"path_offset", e.path_offset},
                   {"steps", e.steps},
                   {"n_steps", e.n_steps},
                   {"dt", e.dt},
                   {"t0", e.t0},
                   {"seed", e.seed},
                   {"params", to_json(e.params)},
                   {"provenance", e.provenance},
                   {"data", bin.filename().string()}};
    write_json(dir / (stem + ".json"), header);
}

//! Inverse of write_ensemble_binary.
inline Ensemble read_ensemble_binary(fs::path const& dir, std::string const& stem)
{
    std::ifstream hin(dir / (stem + ".json"));
    if (!hin)
        throw IoError("cannot open " + (dir / (stem + ".json")).string());
    Json h = Json::parse(hin);
    Ensemble e;
    e.steps = h.at("steps").get<std::vector<std::size_t>>();
    e.n_paths = h.at("cols").get<std::size_t>();
    e.n_steps = h.at("n_steps").get<std::size_t>();
    e.path_offset = h.at("path_offset").get<std::size_t>();
    e.dt = h.at("dt").get<double>();
    e.t0 = h.at("t0").get<double>();
    e.seed = h.at("seed").get<std::uint64_t>();
    e.provenance = h.at("provenance").get<std::string>();
    e.params = params_from_json(h.at("params"));
    e.positions.resize(static_cast<Eigen::Index>(e.n_paths),
                       static_cast<Eigen::Index>(e.steps.size()));
    fs::path bin = dir / h.at("data").get<std::string>();
    std::ifstream in(bin, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + bin.string());
    std::vector<unsigned char> buf(e.n_paths * 8);
    for (std::size_t c = 0; c < e.steps.size(); ++c)
    {
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size()));
        if (!in)
            throw IoError("truncated ensemble data in " + bin.string());
        for (std::size_t k = 0; k < e.n_paths; ++k)
        {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= std::uint64_t{buf[k * 8 + static_cast<std::size_t>(b)]} << (8 * b);
            e.positions(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c))
                = std::bit_cast<double>(bits);
        }
    }
    return e;
}

}  // namespace smlab
