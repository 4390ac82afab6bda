// One PASS/FAIL line per acceptance criterion. Exit status 0 iff every line passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "decaylab/analysis.hpp"
#include "decaylab/harness.hpp"

using namespace decaylab;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs{DECAYLAB_CONFIG_DIR};
const std::vector<std::string> kAdmissible{"a_power2", "b_power3", "c_exponential", "d_square2d", "e_free"};

struct Outcome {
    bool pass{true};
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!detail.empty()) detail += "; ";
        detail += what;
        if (!ok) {
            pass = false;
            detail += " [FAILED]";
        }
    }
};

std::string fmt(double v, int prec = 3)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

std::string read_text(const fs::path& p)
{
    std::ifstream is(p);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// Same run at h/2 with dt/2; sample times coincide with the original.
ExperimentConfig refine(ExperimentConfig cfg)
{
    cfg.h *= 0.5;
    cfg.dt *= 0.5;
    cfg.steps *= 2;
    cfg.sample_every *= 2;
    return cfg;
}

double elapsed(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

const CheckResult& find_check(const SuiteReport& r, const std::string& name)
{
    for (const auto& c : r.checks) {
        if (c.name == name) return c;
    }
    throw std::runtime_error("suite report has no check " + name);
}

struct Suite {
    std::map<std::string, ExperimentConfig> cfg;
    std::map<std::string, TimeSeries> series;
    std::map<std::string, SuiteReport> report;
};

Outcome criterion1()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto checks = run_selftest(1000000, 2024);
    const double secs = elapsed(t0);
    for (const auto& c : checks) {
        if (c.name == "eikonal" || c.name == "weight_dn" || c.name == "star_shape") o.require(c.pass, c.detail);
    }
    o.require(secs < 5.0, "runtime " + fmt(secs) + " s (limit 5 s)");
    return o;
}

Outcome criterion2()
{
    Outcome o;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> alpha(0.5, 4.0), v0(1e-3, 10.0), rho(0.5, 3.0);
    std::bernoulli_distribution pick_power(0.5);
    int agree = 0, total = 0, power_right = 0, powers = 0;
    for (int k = 0; k < 200; ++k) {
        const double r0 = rho(rng);
        const bool power = pick_power(rng);
        const double a = alpha(rng);
        const PotentialSpec spec = power ? PotentialSpec::power(v0(rng), a) : PotentialSpec::exponential(v0(rng));
        const Grid g = build_grid(ObstacleSpec::ball(r0), r0 + 20.0, 0.05, GridMode::radial3d);
        const auto rep = check_A2(spec, g);
        ++total;
        if (rep.agree) ++agree;
        if (power) {
            ++powers;
            if (rep.pass == (a >= 2.0)) ++power_right;
        } else if (rep.pass != (r0 >= 2.0)) {
            o.require(false, "exponential verdict wrong at rho = " + fmt(r0));
        }
    }
    o.require(agree == total, std::to_string(agree) + "/" + std::to_string(total) + " grid/closed-form verdicts agree");
    o.require(power_right == powers, "power verdict = (alpha >= 2) on " + std::to_string(power_right) + "/" +
                                         std::to_string(powers));
    const Grid g = build_grid(ObstacleSpec::ball(1.0), 21.0, 0.05, GridMode::radial3d);
    const auto kg = check_A2(PotentialSpec::constant(1.0), g);
    o.require(!kg.pass && kg.agree, "Klein-Gordon worst " + fmt(kg.worst) + " fails");
    o.require(check_A2(PotentialSpec::power(1.0, 2.0), g).pass, "power(1,2) passes");
    o.require(!check_A2(PotentialSpec::power(1.0, 1.9), g).pass, "power(1,1.9) fails");
    return o;
}

Outcome criterion3(const Suite& s)
{
    Outcome o;
    const ConvergenceStudy st = convergence_study(s.cfg.at("e_free"), 3);
    std::string orders;
    for (double v : st.oracle_orders) orders += " " + fmt(v);
    o.require(!st.oracle_orders.empty() && st.monotone, "oracle errors monotone");
    for (double v : st.oracle_orders) o.require(v >= 1.8, "oracle order " + fmt(v));
    for (double v : st.drift_orders) o.require(v >= 1.8, "drift order " + fmt(v));
    const double drift = st.levels.front().energy_drift;
    o.require(drift <= 1e-3, "drift at default h " + fmt(drift));
    for (const auto& name : kAdmissible) {
        const auto& c = find_check(s.report.at(name), "energy_conservation");
        o.require(c.pass, name + " drift " + fmt(c.worst));
    }
    return o;
}

Outcome criterion4(const Suite& s)
{
    Outcome o;
    const ConvergenceStudy st = convergence_study(s.cfg.at("a_power2"), 3);
    o.require(st.monotone && st.morawetz_orders.size() == 2, "Morawetz residuals monotone under refinement");
    for (double v : st.morawetz_orders) o.require(v >= 1.8, "residual order " + fmt(v));
    for (const auto& name : kAdmissible) {
        const TimeSeries& ts = s.series.at(name);
        const auto& r0 = ts.records.front();
        const double res = std::abs(r0.M_lhs - ts.constants.J0 - r0.flux_accum);
        o.require(res <= 1e-12 * std::max(1.0, std::abs(ts.constants.J0)), name + " t=0 residual " + fmt(res));
        const auto& c = find_check(s.report.at(name), "morawetz_inequality");
        o.require(c.pass, name + " inequality excess " + fmt(c.worst));
    }
    return o;
}

Outcome criterion5(const Suite& s)
{
    Outcome o;
    for (const auto& name : kAdmissible) {
        const TimeSeries& ts = s.series.at(name);
        const double w0 = std::abs(ts.records.front().W - ts.constants.I0) / ts.constants.I0;
        const auto& c = find_check(s.report.at(name), "weighted_energy_bound");
        o.require(c.pass && w0 <= 1e-12, name + " max W/I0 " + fmt(c.worst, 6) + ", |W(0)-I0|/I0 " + fmt(w0));
    }
    return o;
}

Outcome criterion6(const Suite& s, std::map<std::string, TimeSeries>& fine)
{
    Outcome o;
    for (const std::string name : {"a_power2", "b_power3", "c_exponential", "d_square2d"}) {
        const SuiteReport& rep = s.report.at(name);
        std::string cs;
        bool holds = true;
        for (const auto& c : rep.certificates) {
            holds = holds && c.bound_holds;
            cs += (cs.empty() ? "" : "/") + fmt(c.C_hat);
        }
        o.require(holds && rep.certificates.size() == 3, name + " C_hat " + cs);
        o.require(rep.r_independence && rep.r_independence->pass,
                  name + " ratio " + fmt(rep.r_independence ? rep.r_independence->ratio : NAN));

        const ExperimentConfig fcfg = refine(s.cfg.at(name));
        fine[name] = run(fcfg);
        const TimeSeries& fs = fine[name];
        double worst = 0.0;
        bool stable = true;
        for (auto coarse : rep.certificates) {
            DecayCertificate f = certify_decay(fs, fs.constants, coarse.R);
            stable = check_resolution(coarse, f) && stable;
            worst = std::max(worst, std::abs(f.C_hat - coarse.C_hat) / coarse.C_hat);
        }
        o.require(stable, name + " h/2 change " + fmt(100.0 * worst) + "%");
    }
    return o;
}

Outcome criterion7(const Suite& s)
{
    Outcome o;
    const auto& l2 = s.report.at("a_power2").local_l2;
    o.require(l2.has_value(), "local L2 certificate present");
    if (l2) {
        o.require(l2->chain_holds, "R = " + fmt(l2->R) + " chain max L2_R/(2R^a/V0 E_R) " + fmt(l2->worst_chain_ratio));
        o.require(l2->decay.bound_holds && std::isfinite(l2->decay.C_hat), "constant " + fmt(l2->decay.C_hat));
    }
    return o;
}

Outcome criterion8(const Suite& s, const std::map<std::string, TimeSeries>& fine)
{
    Outcome o;
    const ExperimentConfig& cfg = s.cfg.at("a_power2");
    std::string text = read_text(kConfigs / "a_power2.ini");
    const std::string from = "T = " + fmt(cfg.T, 6), to = "T = " + fmt(2.0 * cfg.T, 6);
    const auto pos = text.find(from);
    if (pos == std::string::npos) throw std::runtime_error("a_power2.ini: no '" + from + "' line");
    text.replace(pos, from.size(), to);
    const TimeSeries doubled = run(parse_config_text(text, kConfigs));
    const double q1 = l2_quotient_max(s.series.at("a_power2"), cfg.T);
    const double q2 = l2_quotient_max(doubled, 2.0 * cfg.T);
    const double change = std::abs(q2 - q1) / q1;
    o.require(std::isfinite(q1) && change < 0.10,
              "quotient " + fmt(q1, 4) + " (T) vs " + fmt(q2, 4) + " (2T), change " + fmt(100 * change) + "%");

    const double v1 = v_identity_residual(s.series.at("a_power2"));
    const double v2 = v_identity_residual(fine.at("a_power2"));
    const double order = std::log2(v1 / v2);
    o.require(order >= 1.8, "v-identity residual " + fmt(v1) + " -> " + fmt(v2) + " (order " + fmt(order) + ")");
    for (const auto& name : kAdmissible) {
        const auto& c = find_check(s.report.at(name), "hardy_quotient");
        o.require(c.pass, name + " Hardy quotient " + fmt(c.worst));
    }
    return o;
}

Outcome criterion9(const Suite& s)
{
    Outcome o;
    for (const auto& name : kAdmissible) {
        const TimeSeries& ts = s.series.at(name);
        const ConcentrationReport rep = concentration_report(ts, ts.constants, ts.meta.radii.front(), ts.meta.epsilon);
        o.require(rep.far_ok && rep.partition_ok && rep.gap_ok,
                  name + " partition " + fmt(rep.worst_partition) + (rep.far_ok ? "" : " far-field violated") +
                      (rep.gap_ok ? "" : " gap violated"));
    }
    return o;
}

Outcome criterion10(const Suite& s)
{
    Outcome o;
    const SuiteReport& rep = s.report.at("f_klein_gordon");
    const std::string first = rep.first_failure();
    o.require(!rep.pass() && !first.empty(), "Klein-Gordon run trips '" + (first.empty() ? "nothing" : first) + "'");
    return o;
}

}  // namespace

int main()
{
    int failures = 0;
    const auto report = [&](int n, const char* title, const Outcome& o) {
        std::printf("%s criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", n, title, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    };
    const auto guarded = [&](int n, const char* title, auto&& fn) {
        try {
            report(n, title, fn());
        } catch (const std::exception& e) {
            report(n, title, Outcome{false, std::string("error: ") + e.what()});
        }
    };

    guarded(1, "exact identities", [] { return criterion1(); });
    guarded(2, "admissibility oracle equivalence", [] { return criterion2(); });

    Suite s;
    for (const auto& name : {"a_power2", "b_power3", "c_exponential", "d_square2d", "e_free", "f_klein_gordon"}) {
        try {
            const ExperimentConfig cfg = parse_config(kConfigs / (std::string(name) + ".ini"));
            s.cfg.emplace(name, cfg);
            s.series.emplace(name, run(cfg));
            s.report.emplace(name, certify_series(s.series.at(name)));
        } catch (const std::exception& e) {
            std::fprintf(stderr, "suite config %s: %s\n", name, e.what());
        }
    }

    std::map<std::string, TimeSeries> fine;
    guarded(3, "solver correctness", [&] { return criterion3(s); });
    guarded(4, "Morawetz identity and inequality", [&] { return criterion4(s); });
    guarded(5, "weighted energy bound", [&] { return criterion5(s); });
    guarded(6, "local energy decay certification", [&] { return criterion6(s, fine); });
    guarded(7, "local L2 decay", [&] { return criterion7(s); });
    guarded(8, "L2 bound and v-identity", [&] { return criterion8(s, fine); });
    guarded(9, "energy concentration", [&] { return criterion9(s); });
    guarded(10, "falsification control", [&] { return criterion10(s); });
    return failures == 0 ? 0 : 1;
}
