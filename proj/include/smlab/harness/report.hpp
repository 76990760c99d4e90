#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include "smlab/io.hpp"

namespace smlab
{
inline constexpr int report_schema_version = 1;
inline constexpr char const* smlab_version = "0.1.0";

enum class CheckStatus
{
    pass,
    fail,
    inconclusive,
};

inline char const* to_string(CheckStatus s)
{
    switch (s)
    {
        case CheckStatus::pass:
            return "pass";
        case CheckStatus::fail:
            return "fail";
        case CheckStatus::inconclusive:
            return "inconclusive";
    }
    return "?";
}

//! 64-bit FNV-1a of a string, as 16 hex digits.
inline std::string fnv1a_hex(std::string const& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string digest(Json const& j)
{
    return fnv1a_hex(j.dump());
}

//---------------------------------------------------------------------------//
/*!
 * One measured quantity against its reference.
 *
 * \c anchor names the identity under test and \c oracle what produced the
 * reference. Supplementary records document a criterion (e.g. the exact
 * lattice form of an identity) without entering the aggregate status.
 */
struct CheckRecord
{
    std::string check;
    std::string name;
    std::string anchor;
    std::string oracle;
    Json inputs = Json::object();
    Json measured;
    Json reference;
    double tolerance{0};
    std::optional<double> std_error;
    CheckStatus status{CheckStatus::fail};
    bool supplementary{false};
    std::string detail;
    //! Pipeline stage that raised, when the record reports an error.
    std::string stage;
};

inline Json to_json(CheckRecord const& r)
{
    Json j{{"check", r.check},
           {"name", r.name},
           {"anchor", r.anchor},
           {"oracle", r.oracle},
           {"inputs", r.inputs},
           {"inputs_digest", digest(r.inputs)},
           {"measured", r.measured},
           {"reference", r.reference},
           {"tolerance", r.tolerance},
           {"std_error", r.std_error ? Json(*r.std_error) : Json(nullptr)},
           {"status", to_string(r.status)},
           {"supplementary", r.supplementary}};
    if (!r.detail.empty())
        j["detail"] = r.detail;
    if (!r.stage.empty())
        j["stage"] = r.stage;
    return j;
}

//! Tabular data for offline plotting; written as <tt>stem.csv</tt>.
struct PlotTable
{
    std::string stem;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct Report
{
    std::vector<CheckRecord> records;
    Json environment = Json::object();
    std::string config_digest;
    std::vector<PlotTable> plots;
    //! Wall-clock creation time; the only field outside the reproducible body.
    std::string generated_at;

    std::size_t count(CheckStatus s) const
    {
        std::size_t n = 0;
        for (auto const& r : records)
            n += !r.supplementary && r.status == s;
        return n;
    }

    bool passed() const { return this->count(CheckStatus::fail) == 0; }

    void add(CheckRecord r) { records.push_back(std::move(r)); }
};

inline std::string utc_timestamp()
{
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

//! Reproducible part of the report.
inline Json report_body(Report const& r)
{
    Json records = Json::array();
    for (auto const& rec : r.records)
        records.push_back(to_json(rec));
    Json plots = Json::array();
    for (auto const& p : r.plots)
        plots.push_back(p.stem + ".csv");
    return {{"schema_version", report_schema_version},
            {"config_digest", r.config_digest},
            {"environment", r.environment},
            {"summary",
             {{"status", r.passed() ? "pass" : "fail"},
              {"pass", r.count(CheckStatus::pass)},
              {"fail", r.count(CheckStatus::fail)},
              {"inconclusive", r.count(CheckStatus::inconclusive)}}},
            {"records", records},
            {"plots", plots}};
}

inline Json to_json(Report const& r)
{
    Json j = report_body(r);
    j["generated_at"] = r.generated_at;
    return j;
}

inline void write_report(fs::path const& path, Report const& r)
{
    write_json(path, to_json(r));
}

//---------------------------------------------------------------------------//
/*!
 * Write every plot table of the report as CSV under \c out_dir.
 *
 * Nothing is created for a report without tables.
 */
inline std::vector<fs::path> emit_plots_data(Report const& report, fs::path const& out_dir)
{
    std::vector<fs::path> written;
    for (auto const& t : report.plots)
    {
        fs::path path = out_dir / (t.stem + ".csv");
        auto out = open_output(path);
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            out << (c ? "," : "") << t.columns[c];
        out << '\n';
        for (auto const& row : t.rows)
        {
            if (row.size() != t.columns.size())
                throw IoError("emit_plots_data: ragged row in " + path.string());
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "," : "") << format_double(row[c]);
            out << '\n';
        }
        check_written(out, path);
        written.push_back(path);
    }
    return written;
}

}  // namespace smlab
