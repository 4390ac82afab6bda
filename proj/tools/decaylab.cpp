#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "decaylab/analysis.hpp"
#include "decaylab/harness.hpp"

namespace fs = std::filesystem;
using namespace decaylab;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& p)
{
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p);
    if (!os) throw UsageError("cannot write " + p.string());
    return os;
}

// Runs cfg, writing the CSV and the constants JSON. Returns the series.
TimeSeries simulate(const ExperimentConfig& cfg)
{
    const fs::path dir = output_directory(cfg);
    const fs::path csv_path = dir / cfg.csv_file;
    const fs::path const_path = dir / cfg.constants_file;
    TimeSeries ts;
    {
        std::ofstream csv = open_out(csv_path);
        ts = run(cfg, &csv);
    }
    json j = constants_to_json(ts.meta, ts.constants);
    j["config"] = config_echo(cfg);
    open_out(const_path) << j.dump(2) << '\n';
    std::cout << "series    " << csv_path.string() << " (" << ts.records.size() << " records)\n"
              << "constants " << const_path.string() << '\n';
    return ts;
}

void print_checks(const std::vector<CheckResult>& checks)
{
    for (const auto& c : checks) {
        std::printf("%-4s %-28s %s\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.detail.c_str());
    }
}

int cmd_run(const std::string& config)
{
    const ExperimentConfig cfg = parse_config(config);
    const TimeSeries ts = simulate(cfg);
    const auto& c = ts.constants;
    std::printf("E0 = %.6e  K0 = %.6e  I0 = %.6e  J0 = %.6e\n", c.E0, c.K0, c.I0, c.J0);
    return kPass;
}

int cmd_check_potential(const std::string& config)
{
    const ExperimentConfig cfg = parse_config(config, false);
    const Grid grid = build_grid(cfg.obstacle, cfg.L, cfg.h, cfg.mode);
    const AdmissibilityReport rep = check_A2(cfg.potential, grid);
    json out;
    out["kind"] = to_string(cfg.potential.kind);
    out["params"] = {{"amplitude", cfg.potential.amplitude}, {"exponent", cfg.potential.exponent}};
    out["pass"] = rep.pass;
    out["worst"] = rep.worst;
    out["location"] = {{"x", rep.location.x}, {"y", rep.location.y}, {"radius", rep.worst_radius}};
    out["closed_form"] = {{"pass", rep.closed_form_pass},
                          {"worst", rep.closed_form_worst},
                          {"radius", rep.closed_form_radius},
                          {"agree", rep.agree}};
    std::cout << out.dump(2) << '\n';
    return rep.pass ? kPass : kFail;
}

int cmd_check_domain(const std::string& config)
{
    const ExperimentConfig cfg = parse_config(config, false);
    const StarShapeReport star = check_star_shaped(cfg.obstacle);
    json out;
    out["star_shaped"] = {{"pass", star.pass},
                          {"worst", star.worst},
                          {"where", {star.where.point.x, star.where.point.y}},
                          {"normal", {star.where.normal.x, star.where.normal.y}}};
    if (star.pass) out["grid"] = grid_summary(build_grid(cfg.obstacle, cfg.L, cfg.h, cfg.mode));
    std::cout << out.dump(2) << '\n';
    return star.pass ? kPass : kFail;
}

int cmd_sweep(const std::string& config, const std::vector<double>& radii)
{
    const ExperimentConfig cfg = with_radii(parse_config(config), radii);
    const TimeSeries ts = simulate(cfg);
    std::vector<DecayCertificate> certs;
    for (double R : cfg.radii) {
        if (cfg.T < 4.0 * R) {
            std::printf("R = %-6g skipped (T < 4R)\n", R);
            continue;
        }
        certs.push_back(certify_decay(ts, ts.constants, R));
        const auto& c = certs.back();
        std::printf("R = %-6g C_hat = %.4e  trend = %s  %s\n", R, c.C_hat,
                    c.trend_slope ? std::to_string(*c.trend_slope).c_str() : "n/a",
                    c.bound_holds ? "holds" : "VIOLATED");
    }
    bool ok = true;
    for (const auto& c : certs) ok = ok && c.bound_holds;
    if (certs.size() >= 3) {
        const RIndependence ri = check_R_independence(certs);
        std::printf("max/min C_hat = %.3f (limit %.0f) %s\n", ri.ratio, kRStabilityFactor, ri.pass ? "ok" : "FAIL");
        ok = ok && ri.pass;
    }
    return ok ? kPass : kFail;
}

int cmd_fit(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw UsageError("cannot read " + path);
    const CsvSeries s = read_csv(is);
    json out = json::array();
    for (std::size_t k = 0; k < s.radii.size(); ++k) {
        const double R = s.radii[k];
        std::vector<double> x, y;
        const double t_end = s.records.empty() ? 0.0 : s.records.back().t;
        for (const auto& r : s.records) {
            if (r.t < std::max(2.0 * R, 0.5 * t_end) || !(r.E_R[k] > 0.0)) continue;
            x.push_back(r.t - R);
            y.push_back(r.E_R[k]);
        }
        json row{{"R", R}, {"samples", x.size()}};
        if (x.size() >= 2) {
            const LogLogFit f = fit_loglog(x, y);
            row["slope"] = f.slope;
            row["r2"] = f.r2;
        }
        out.push_back(row);
    }
    std::cout << out.dump(2) << '\n';
    return kPass;
}

int cmd_certify(const std::string& csv, const std::string& constants, std::string out_path)
{
    const TimeSeries ts = load_series(csv, constants);
    const SuiteReport rep = certify_series(ts);
    print_checks(rep.checks);
    if (out_path.empty()) {
        fs::path p(csv);
        p.replace_extension(".certificate.json");
        out_path = p.string();
    }
    open_out(out_path) << to_json(rep).dump(2) << '\n';
    std::cout << "certificate " << out_path << '\n';
    if (!rep.pass()) {
        std::cout << "first violated: " << rep.first_failure() << '\n';
        return kFail;
    }
    std::cout << "all inequalities hold\n";
    return kPass;
}

int cmd_selftest(std::size_t points)
{
    const auto checks = run_selftest(points);
    print_checks(checks);
    bool ok = true;
    for (const auto& c : checks) ok = ok && c.pass;
    std::cout << (ok ? "selftest passed\n" : "selftest FAILED\n");
    return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Local energy decay experiments for exterior wave equations"};
    app.require_subcommand(1);

    std::string config, csv, constants, out;
    std::vector<double> radii;
    std::size_t points = 100000;

    auto* run_cmd = app.add_subcommand("run", "simulate and write the CSV series and constants JSON");
    run_cmd->add_option("config", config)->required()->check(CLI::ExistingFile);
    auto* pot_cmd = app.add_subcommand("check-potential", "audit the potential for admissibility");
    pot_cmd->add_option("config", config)->required()->check(CLI::ExistingFile);
    auto* dom_cmd = app.add_subcommand("check-domain", "star-shape check and grid summary");
    dom_cmd->add_option("config", config)->required()->check(CLI::ExistingFile);
    auto* sweep_cmd = app.add_subcommand("sweep", "run with the given radii and certify decay per R");
    sweep_cmd->add_option("config", config)->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--R", radii, "observation radii")->required()->delimiter(',');
    auto* fit_cmd = app.add_subcommand("fit", "log-log slope of E_R over the last half of a series");
    fit_cmd->add_option("series", csv)->required()->check(CLI::ExistingFile);
    auto* cert_cmd = app.add_subcommand("certify", "run the inequality suite on a stored series");
    cert_cmd->add_option("series", csv)->required()->check(CLI::ExistingFile);
    cert_cmd->add_option("constants", constants)->required()->check(CLI::ExistingFile);
    cert_cmd->add_option("-o,--out", out, "certificate path (default: <series>.certificate.json)");
    auto* self_cmd = app.add_subcommand("selftest", "exact-identity checks");
    self_cmd->add_option("--points", points, "random eikonal points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(config);
        if (pot_cmd->parsed()) return cmd_check_potential(config);
        if (dom_cmd->parsed()) return cmd_check_domain(config);
        if (sweep_cmd->parsed()) return cmd_sweep(config, radii);
        if (fit_cmd->parsed()) return cmd_fit(csv);
        if (cert_cmd->parsed()) return cmd_certify(csv, constants, out);
        if (self_cmd->parsed()) return cmd_selftest(points);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return kFail;
    }
    return kUsage;
}
