#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "decaylab/functionals.hpp"
#include "decaylab/geometry.hpp"
#include "decaylab/potential.hpp"

namespace decaylab {

/// Parameters a series needs to be analysed on its own (no config file).
struct RunMeta {
    std::string name;
    GridMode mode{GridMode::radial3d};
    int n{3};
    double h{0.0};
    double dt{0.0};
    double T{0.0};
    double L{0.0};
    double epsilon{0.1};
    double B{0.0};
    std::vector<double> radii;
    PotentialSpec potential;
    std::uint64_t config_hash{0};
};

struct TimeSeries {
    RunMeta meta;
    Constants constants;
    std::vector<DiagnosticsRecord> records;

    std::size_t radius_index(double R) const;
};

/// Streams records as CSV. Columns, in order:
/// t, E, E_R{R_i}..., L2_R{R_i}..., L2_total, W, M_lhs, flux_accum, Vterm_accum,
/// X{R_i}..., A, then F, vid_lhs, vid_rhs, hardy.
/// The first line is a '#' comment carrying the schema version, units and config hash.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const RunMeta& meta);
    void write(const DiagnosticsRecord& rec);

private:
    std::ostream& os_;
    std::size_t nradii_;
};

std::string csv_header(const RunMeta& meta);

struct CsvSeries {
    std::vector<double> radii;
    std::uint64_t config_hash{0};
    std::vector<DiagnosticsRecord> records;
};

/// Throws std::runtime_error on malformed input.
CsvSeries read_csv(std::istream& is);

/// Constants + run metadata, the companion of a CSV series.
nlohmann::json constants_to_json(const RunMeta& meta, const Constants& c);
void constants_from_json(const nlohmann::json& j, RunMeta& meta, Constants& c);

/// Series from a CSV file plus its constants JSON.
TimeSeries load_series(const std::string& csv_path, const std::string& constants_path);

/// 64-bit FNV-1a, used to stamp outputs with the config they came from.
std::uint64_t fnv1a(const std::string& text);
std::string hex_hash(std::uint64_t h);

}  // namespace decaylab
