#include "decaylab/series.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace decaylab {

std::size_t TimeSeries::radius_index(double R) const
{
    for (std::size_t k = 0; k < meta.radii.size(); ++k) {
        if (std::abs(meta.radii[k] - R) <= 1e-12 * std::max(1.0, R)) return k;
    }
    throw std::invalid_argument("series has no column for R = " + std::to_string(R));
}

std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex_hash(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string fmt_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string radius_tag(double R)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", R);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

}  // namespace

std::string csv_header(const RunMeta& meta)
{
    std::ostringstream os;
    os << "t,E";
    for (double R : meta.radii) os << ",E_R" << radius_tag(R);
    for (double R : meta.radii) os << ",L2_R" << radius_tag(R);
    os << ",L2_total,W,M_lhs,flux_accum,Vterm_accum";
    for (double R : meta.radii) os << ",X" << radius_tag(R);
    os << ",A,F,vid_lhs,vid_rhs,hardy";
    return os.str();
}

CsvWriter::CsvWriter(std::ostream& os, const RunMeta& meta) : os_(os), nradii_(meta.radii.size())
{
    os_ << "# decaylab-series v1; config_hash=" << hex_hash(meta.config_hash) << "; mode=" << to_string(meta.mode)
        << "; units: t[time] energies[energy] L2[length^n*amplitude^2] W[energy*length] M_lhs[energy*time]"
        << " flux_accum,Vterm_accum[energy*time] hardy[1]\n";
    os_ << csv_header(meta) << '\n';
}

void CsvWriter::write(const DiagnosticsRecord& r)
{
    if (r.E_R.size() != nradii_) throw std::invalid_argument("CsvWriter: record radius count mismatch");
    std::string line = fmt_num(r.t) + ',' + fmt_num(r.E);
    for (double v : r.E_R) line += ',' + fmt_num(v);
    for (double v : r.L2_R) line += ',' + fmt_num(v);
    for (double v : {r.L2_total, r.W, r.M_lhs, r.flux_accum, r.Vterm_accum}) line += ',' + fmt_num(v);
    for (double v : r.X) line += ',' + fmt_num(v);
    for (double v : {r.A, r.F, r.vid_lhs, r.vid_rhs, r.hardy}) line += ',' + fmt_num(v);
    os_ << line << '\n';
}

CsvSeries read_csv(std::istream& is)
{
    CsvSeries out;
    std::string line;
    std::vector<std::string> header;
    bool tagged = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# decaylab-series v", 0) == 0) {
                if (line.rfind("# decaylab-series v1;", 0) != 0) throw std::runtime_error("CSV: unsupported schema version");
                tagged = true;
            }
            const auto pos = line.find("config_hash=");
            if (pos != std::string::npos) out.config_hash = std::stoull(line.substr(pos + 12, 16), nullptr, 16);
            continue;
        }
        header = split(line, ',');
        break;
    }
    if (!tagged) throw std::runtime_error("CSV: missing '# decaylab-series v1' comment line");
    if (header.size() < 2 || header[0] != "t" || header[1] != "E") throw std::runtime_error("CSV: missing header row");
    std::size_t k = 2;
    while (k < header.size() && header[k].rfind("E_R", 0) == 0) out.radii.push_back(std::stod(header[k++].substr(3)));
    const std::size_t m = out.radii.size();
    if (m == 0) throw std::runtime_error("CSV: no E_R columns");
    const std::size_t expected = 2 + 3 * m + 5 + 5;
    if (header.size() != expected) throw std::runtime_error("CSV: unexpected column count");

    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (cells.size() != expected) throw std::runtime_error("CSV: row " + std::to_string(row) + " has wrong width");
        std::vector<double> v;
        v.reserve(cells.size());
        for (const auto& c : cells) {
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != c.size() || !std::isfinite(x)) {
                throw std::runtime_error("CSV: row " + std::to_string(row) + ": bad number '" + c + "'");
            }
            v.push_back(x);
        }
        DiagnosticsRecord r;
        std::size_t i = 0;
        r.t = v[i++];
        r.E = v[i++];
        r.E_R.assign(v.begin() + static_cast<long>(i), v.begin() + static_cast<long>(i + m));
        i += m;
        r.L2_R.assign(v.begin() + static_cast<long>(i), v.begin() + static_cast<long>(i + m));
        i += m;
        r.L2_total = v[i++];
        r.W = v[i++];
        r.M_lhs = v[i++];
        r.flux_accum = v[i++];
        r.Vterm_accum = v[i++];
        r.X.assign(v.begin() + static_cast<long>(i), v.begin() + static_cast<long>(i + m));
        i += m;
        r.A = v[i++];
        r.F = v[i++];
        r.vid_lhs = v[i++];
        r.vid_rhs = v[i++];
        r.hardy = v[i++];
        out.records.push_back(std::move(r));
    }
    return out;
}

nlohmann::json constants_to_json(const RunMeta& meta, const Constants& c)
{
    return {
        {"schema", 1},
        {"name", meta.name},
        {"config_hash", hex_hash(meta.config_hash)},
        {"mode", to_string(meta.mode)},
        {"n", meta.n},
        {"h", meta.h},
        {"dt", meta.dt},
        {"T", meta.T},
        {"L", meta.L},
        {"epsilon", meta.epsilon},
        {"B", meta.B},
        {"R", meta.radii},
        {"potential",
         {{"kind", to_string(meta.potential.kind)},
          {"amplitude", meta.potential.amplitude},
          {"exponent", meta.potential.exponent}}},
        {"constants",
         {{"E0", c.E0},
          {"J0", c.J0},
          {"K0", c.K0},
          {"I0", c.I0},
          {"norm_u0", c.norm_u0},
          {"norm_dn_u1", c.norm_dn_u1}}},
    };
}

void constants_from_json(const nlohmann::json& j, RunMeta& meta, Constants& c)
{
    try {
        if (j.at("schema").get<int>() != 1) throw std::runtime_error("constants JSON: unsupported schema version");
        meta.name = j.value("name", "");
        meta.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
        meta.mode = grid_mode_from_string(j.at("mode").get<std::string>());
        meta.n = j.at("n").get<int>();
        meta.h = j.at("h").get<double>();
        meta.dt = j.at("dt").get<double>();
        meta.T = j.at("T").get<double>();
        meta.L = j.at("L").get<double>();
        meta.epsilon = j.at("epsilon").get<double>();
        meta.B = j.at("B").get<double>();
        meta.radii = j.at("R").get<std::vector<double>>();
        const auto& p = j.at("potential");
        meta.potential.kind = potential_kind_from_string(p.at("kind").get<std::string>());
        meta.potential.amplitude = p.at("amplitude").get<double>();
        meta.potential.exponent = p.at("exponent").get<double>();
        const auto& k = j.at("constants");
        c.E0 = k.at("E0").get<double>();
        c.J0 = k.at("J0").get<double>();
        c.K0 = k.at("K0").get<double>();
        c.I0 = k.at("I0").get<double>();
        c.norm_u0 = k.at("norm_u0").get<double>();
        c.norm_dn_u1 = k.at("norm_dn_u1").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("constants JSON: ") + e.what());
    }
}

TimeSeries load_series(const std::string& csv_path, const std::string& constants_path)
{
    std::ifstream cs(csv_path);
    if (!cs) throw std::runtime_error("cannot open " + csv_path);
    std::ifstream js(constants_path);
    if (!js) throw std::runtime_error("cannot open " + constants_path);
    TimeSeries ts;
    nlohmann::json j;
    try {
        js >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(constants_path + ": " + e.what());
    }
    constants_from_json(j, ts.meta, ts.constants);
    CsvSeries csv = read_csv(cs);
    if (csv.radii.size() != ts.meta.radii.size()) throw std::runtime_error("CSV radii do not match the constants file");
    if (csv.config_hash != 0 && csv.config_hash != ts.meta.config_hash) {
        throw std::runtime_error("CSV and constants file come from different configs");
    }
    ts.records = std::move(csv.records);
    return ts;
}

}  // namespace decaylab
