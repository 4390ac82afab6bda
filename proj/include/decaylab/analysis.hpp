#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decaylab/harness.hpp"
#include "decaylab/series.hpp"

namespace decaylab {

/// Least-squares line through (log x, log y).
struct LogLogFit {
    double slope{0.0};
    double intercept{0.0};
    double r2{0.0};
    std::size_t count{0};
};

/// Throws std::invalid_argument on fewer than two points or non-positive entries.
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct DecayCertificate {
    double R{0.0};
    double K0{0.0};
    std::uint64_t run{0};  ///< config hash of the source series
    double C_hat{0.0};     ///< max over [2R, T] of (t - R) E_R(t) / K0
    double t_at_max{0.0};
    double window_begin{0.0};
    double window_end{0.0};
    std::optional<double> trend_slope;  ///< last third; empty with fewer than three positive samples
    std::optional<double> rate_slope;   ///< log E_R vs log(t - R), last half
    bool tail_negligible{false};
    bool bound_holds{false};
    std::optional<bool> R_stable;
    std::optional<bool> resolution_stable;
};

inline constexpr double kTrendLimit = 0.05;
inline constexpr double kRStabilityFactor = 3.0;
inline constexpr double kResolutionTolerance = 0.10;

/// Requires K0 > 0 and T >= 4R (std::invalid_argument otherwise).
DecayCertificate certify_decay(const TimeSeries& series, const Constants& constants, double R);

/// Same trend machinery on an arbitrary nonnegative column q(t) = (t - R) y(t) / scale.
DecayCertificate certify_tail(const TimeSeries& series, std::span<const double> y, double scale, double R);

struct RIndependence {
    double ratio{0.0};
    double min_C{0.0};
    double max_C{0.0};
    bool pass{false};
};

/// pass iff max C_hat / min C_hat <= 3. Needs k >= 3 certificates from one run;
/// marks each certificate's R_stable.
RIndependence check_R_independence(std::span<DecayCertificate> certs);

/// |C_fine - C_coarse| / C_coarse <= 10%; marks both certificates.
bool check_resolution(DecayCertificate& coarse, DecayCertificate& fine);

struct LocalL2Certificate {
    double R{0.0};
    double V0{0.0};
    double alpha{0.0};
    double prefactor{0.0};  ///< 2 R^alpha / V0
    double worst_chain_ratio{0.0};  ///< max L2_R / (prefactor E_R)
    bool chain_holds{false};
    DecayCertificate decay;  ///< on (t - R) L2_R / (prefactor K0)
    bool pass() const { return chain_holds && decay.bound_holds; }
};

/// Potential must be power(V0, alpha) with alpha >= 2.
LocalL2Certificate certify_local_l2(const TimeSeries& series, const Constants& constants, double R,
                                    const PotentialSpec& potential);

struct ConvergenceLevel {
    double h{0.0};
    double dt{0.0};
    std::optional<double> oracle_error;
    double energy_drift{0.0};
    std::optional<double> morawetz_residual;
};

struct ConvergenceStudy {
    std::vector<ConvergenceLevel> levels;
    std::vector<double> oracle_orders;
    std::vector<double> drift_orders;
    std::vector<double> morawetz_orders;
    bool monotone{true};

    double min_order() const;
    bool pass(double min_order = 1.8) const;
};

/// Runs cfg at h, h/2, h/4, ... with dt halved alongside h, so the sample times coincide.
/// Drift and residual are maxima over the coarse-level sample times; the oracle
/// error is a sup-norm maximum over about eight of them.
ConvergenceStudy convergence_study(const ExperimentConfig& cfg, int levels = 3);

struct ConcentrationRow {
    double t{0.0};
    double E_R{0.0};
    double A{0.0};
    double F{0.0};
    double partition_residual{0.0};  ///< (E_R + A + F - E) / E
    double far_bound{0.0};           ///< I0 / (1 + eps t)
    std::optional<double> gap_bound;  ///< C_hat K0 / (t - R) + far_bound, for t >= 2R
    double gap{0.0};                 ///< E(0) - A
};

struct ConcentrationReport {
    double R{0.0};
    double epsilon{0.0};
    std::vector<ConcentrationRow> rows;
    double worst_partition{0.0};
    bool far_ok{true};
    bool gap_ok{true};
    bool partition_ok{true};
    bool pass() const { return far_ok && gap_ok && partition_ok; }
};

/// R must be the first radius of the series (A is recorded for it only).
ConcentrationReport concentration_report(const TimeSeries& series, const Constants& constants, double R,
                                         double epsilon);

/// ||u(t)|| / (||u0|| + ||d_n u1||), maximised over records with t <= t_max.
double l2_quotient_max(const TimeSeries& series, double t_max);

/// max |vid_lhs - vid_rhs| / (||u0||^2 + E0).
double v_identity_residual(const TimeSeries& series);

struct CheckResult {
    std::string name;
    bool pass{true};
    double worst{0.0};
    std::string detail;
};

struct SuiteReport {
    std::vector<CheckResult> checks;
    std::vector<DecayCertificate> certificates;
    std::optional<LocalL2Certificate> local_l2;
    std::optional<RIndependence> r_independence;

    bool pass() const;
    /// Name of the first failing check in suite order, empty when everything passes.
    std::string first_failure() const;
};

/// Inequality suite, in order: energy conservation, Morawetz inequality, weighted
/// bound, weighted monotonicity, far-field bound, energy partition, decay per R,
/// R independence, local L2, Hardy quotient.
SuiteReport certify_series(const TimeSeries& series);

/// Exact-identity checks behind `decaylab selftest`: eikonal residual at random
/// points, star-shape verdicts, the free-wave oracle, and the t = 0 constants.
std::vector<CheckResult> run_selftest(std::size_t eikonal_points = 100000, std::uint64_t seed = 1);

nlohmann::json to_json(const DecayCertificate& c);
nlohmann::json to_json(const SuiteReport& r);

}  // namespace decaylab
