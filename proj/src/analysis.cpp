#include "decaylab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace decaylab {

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: x and y differ in length");
    if (x.size() < 2) throw std::invalid_argument("fit_loglog: need at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_loglog: entries must be positive");
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_loglog: x values are all equal");
    LogLogFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    f.count = x.size();
    return f;
}

namespace {

// sample times are accumulated steps; allow rounding below 4R
bool window_fits(double T, double R)
{
    return T >= 4.0 * R * (1.0 - 1e-12);
}

// slope of log q against log(t - R) on the records with t >= from; empty when
// fewer than three usable points remain
std::optional<double> tail_slope(const std::vector<double>& t, const std::vector<double>& q, double R, double from)
{
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= from && q[i] > 0.0) {
            xs.push_back(t[i] - R);
            ys.push_back(q[i]);
        }
    }
    if (xs.size() < 3) return std::nullopt;
    return fit_loglog(xs, ys).slope;
}

}  // namespace

DecayCertificate certify_tail(const TimeSeries& series, std::span<const double> y, double scale, double R)
{
    if (!(scale > 0.0)) throw std::invalid_argument("certify: K0 <= 0, the decay bound is vacuous");
    if (y.size() != series.records.size()) throw std::invalid_argument("certify: column length mismatch");
    if (series.records.empty()) throw std::invalid_argument("certify: empty series");
    const double T = series.records.back().t;
    if (!window_fits(T, R)) throw std::invalid_argument("certify: window [2R, T] too short (needs T >= 4R)");

    DecayCertificate c;
    c.R = R;
    c.K0 = scale;
    c.run = series.meta.config_hash;
    c.window_begin = 2.0 * R;
    c.window_end = T;

    std::vector<double> ts, qs, es;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = series.records[i].t;
        if (t < c.window_begin) continue;
        ts.push_back(t);
        es.push_back(y[i]);
        qs.push_back((t - R) * y[i] / scale);
    }
    if (ts.size() < 6) throw std::invalid_argument("certify: fewer than six samples in the window [2R, T]");

    const auto it = std::max_element(qs.begin(), qs.end());
    c.C_hat = *it;
    c.t_at_max = ts[static_cast<std::size_t>(it - qs.begin())];

    const double third = T - (T - c.window_begin) / 3.0;
    double tail_max = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] >= third) tail_max = std::max(tail_max, qs[i]);
    }
    // a tail six orders below the peak carries no trend information, only rounding
    c.tail_negligible = tail_max <= 1e-6 * c.C_hat || tail_max == 0.0;
    c.trend_slope = tail_slope(ts, qs, R, third);
    c.rate_slope = tail_slope(ts, es, R, T - (T - c.window_begin) / 2.0);

    const bool finite = std::isfinite(c.C_hat) && c.C_hat >= 0.0;
    const bool flat = c.trend_slope ? *c.trend_slope <= kTrendLimit : c.tail_negligible;
    c.bound_holds = finite && (flat || c.tail_negligible);
    return c;
}

DecayCertificate certify_decay(const TimeSeries& series, const Constants& constants, double R)
{
    const std::size_t k = series.radius_index(R);
    std::vector<double> y;
    y.reserve(series.records.size());
    for (const auto& r : series.records) y.push_back(r.E_R[k]);
    return certify_tail(series, y, constants.K0, R);
}

RIndependence check_R_independence(std::span<DecayCertificate> certs)
{
    if (certs.size() < 3) throw std::invalid_argument("R independence: need at least three radii");
    for (const auto& c : certs) {
        if (c.run != certs.front().run || c.K0 != certs.front().K0) {
            throw std::invalid_argument("R independence: certificates come from different runs");
        }
    }
    RIndependence r;
    r.min_C = std::numeric_limits<double>::infinity();
    for (const auto& c : certs) {
        r.min_C = std::min(r.min_C, c.C_hat);
        r.max_C = std::max(r.max_C, c.C_hat);
    }
    r.ratio = r.min_C > 0.0 ? r.max_C / r.min_C : (r.max_C > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    r.pass = r.ratio <= kRStabilityFactor;
    for (auto& c : certs) c.R_stable = r.pass;
    return r;
}

bool check_resolution(DecayCertificate& coarse, DecayCertificate& fine)
{
    if (coarse.R != fine.R) throw std::invalid_argument("resolution check: radii differ");
    const double ref = std::max(coarse.C_hat, std::numeric_limits<double>::min());
    const bool ok = std::abs(fine.C_hat - coarse.C_hat) <= kResolutionTolerance * ref;
    coarse.resolution_stable = ok;
    fine.resolution_stable = ok;
    return ok;
}

LocalL2Certificate certify_local_l2(const TimeSeries& series, const Constants& constants, double R,
                                    const PotentialSpec& potential)
{
    if (potential.kind != PotentialKind::power || potential.exponent < 2.0 || !(potential.amplitude > 0.0)) {
        throw std::invalid_argument("local L2: needs a power potential V0 |x|^-alpha with V0 > 0, alpha >= 2");
    }
    const std::size_t k = series.radius_index(R);
    LocalL2Certificate c;
    c.R = R;
    c.V0 = potential.amplitude;
    c.alpha = potential.exponent;
    c.prefactor = 2.0 * std::pow(R, c.alpha) / c.V0;
    c.chain_holds = true;
    std::vector<double> y;
    for (const auto& r : series.records) {
        y.push_back(r.L2_R[k]);
        const double bound = c.prefactor * r.E_R[k];
        if (bound > 0.0) c.worst_chain_ratio = std::max(c.worst_chain_ratio, r.L2_R[k] / bound);
        if (r.L2_R[k] > bound * (1.0 + 1e-12)) c.chain_holds = false;
    }
    c.decay = certify_tail(series, y, c.prefactor * constants.K0, R);
    return c;
}

double ConvergenceStudy::min_order() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto* v : {&oracle_orders, &drift_orders, &morawetz_orders}) {
        for (double o : *v) m = std::min(m, o);
    }
    return m;
}

bool ConvergenceStudy::pass(double min_order_required) const
{
    return monotone && min_order() >= min_order_required;
}

namespace {

std::vector<double> orders_of(const std::vector<double>& e, bool& monotone)
{
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        if (!(e[i + 1] < e[i])) monotone = false;
        out.push_back(std::log2(e[i] / e[i + 1]));
    }
    return out;
}

}  // namespace

ConvergenceStudy convergence_study(const ExperimentConfig& cfg, int nlevels)
{
    if (nlevels < 2) throw std::invalid_argument("convergence study: need at least two levels");
    const bool radial = cfg.mode == GridMode::radial3d;
    const bool oracle = radial && cfg.potential.is_zero() && cfg.data.radially_symmetric();
    const double rho = cfg.obstacle.circumradius();

    ConvergenceStudy study;
    std::vector<double> oerr, drift, mres;
    for (int lvl = 0; lvl < nlevels; ++lvl) {
        const double scale = std::ldexp(1.0, -lvl);
        const double h = cfg.h * scale;
        const double dt = cfg.dt * scale;
        const std::size_t stride = cfg.sample_every << lvl;
        const std::size_t steps = cfg.steps << lvl;

        const Grid grid = build_grid(cfg.obstacle, cfg.L, h, cfg.mode);
        const NodalPotential pot = sample_potential(cfg.potential, grid);
        const Diagnostics diag(grid, pot, cfg.data, cfg.weights(), cfg.radii, cfg.epsilon);
        const Constants& c = diag.constants();
        WaveState state = init_state(grid, cfg.data, dt, pot);

        ConvergenceLevel L;
        L.h = h;
        L.dt = dt;
        double e_max = 0.0, d_max = 0.0, m_max = 0.0;
        const std::size_t oracle_stride = stride * std::max<std::size_t>(1, cfg.steps / cfg.sample_every / 8);
        for (std::size_t n = 0;; ++n) {
            if (n % stride == 0 || n == steps) {
                const Snapshot s = snapshot(state, grid, pot, dt);
                const double E = total_energy(grid, pot, s);
                d_max = std::max(d_max, std::abs(E - c.E0) / c.E0);
                if (radial) {
                    const double lhs = morawetz_lhs(grid, pot, s);
                    m_max = std::max(m_max, std::abs(morawetz_residual(grid, lhs, s.flux_accum, c)));
                }
                if (oracle && (n % oracle_stride == 0 || n == steps)) {
                    for (std::size_t i = 0; i < grid.size(); ++i) {
                        if (!grid.active(i)) continue;
                        const double ex = oracle_free_radial(cfg.data, s.t, grid.radius(i), rho, cfg.potential);
                        e_max = std::max(e_max, std::abs(s.u[i] - ex));
                    }
                }
            }
            if (n == steps) break;
            step(state, grid, pot, dt);
            state.t = static_cast<double>(n + 1) * dt;
        }
        L.energy_drift = d_max;
        drift.push_back(d_max);
        if (radial) {
            L.morawetz_residual = m_max;
            mres.push_back(m_max);
        }
        if (oracle) {
            L.oracle_error = e_max;
            oerr.push_back(e_max);
        }
        study.levels.push_back(L);
    }
    study.drift_orders = orders_of(drift, study.monotone);
    if (!mres.empty()) study.morawetz_orders = orders_of(mres, study.monotone);
    if (!oerr.empty()) study.oracle_orders = orders_of(oerr, study.monotone);
    return study;
}

ConcentrationReport concentration_report(const TimeSeries& series, const Constants& constants, double R,
                                         double epsilon)
{
    if (series.meta.radii.empty() || std::abs(series.meta.radii.front() - R) > 1e-12 * R) {
        throw std::invalid_argument("concentration: A is recorded for the first radius only");
    }
    if (!series.records.empty() && (1.0 + epsilon) * series.records.back().t > series.meta.L * (1.0 + 1e-12)) {
        throw std::invalid_argument("concentration: (1 + eps) T exceeds the truncation radius L");
    }
    std::optional<DecayCertificate> cert;
    if (!series.records.empty() && window_fits(series.records.back().t, R) && constants.K0 > 0.0) {
        cert = certify_decay(series, constants, R);
    }

    ConcentrationReport rep;
    rep.R = R;
    rep.epsilon = epsilon;
    for (const auto& r : series.records) {
        ConcentrationRow row;
        row.t = r.t;
        row.E_R = r.E_R[0];
        row.A = r.A;
        row.F = r.F;
        row.partition_residual = r.E > 0.0 ? (row.E_R + row.A + row.F - r.E) / r.E : 0.0;
        row.far_bound = constants.I0 / (1.0 + epsilon * r.t);
        row.gap = constants.E0 - r.A;
        rep.worst_partition = std::max(rep.worst_partition, std::abs(row.partition_residual));
        if (std::abs(row.partition_residual) > 1e-12) rep.partition_ok = false;
        if (row.F > row.far_bound * (1.0 + 1e-12)) rep.far_ok = false;
        if (cert && r.t >= cert->window_begin) {
            row.gap_bound = cert->C_hat * constants.K0 / (r.t - R) + row.far_bound;
            // the gap also contains the discrete energy drift E(0) - E(t)
            const double slack = std::abs(constants.E0 - r.E) + 1e-12 * constants.E0;
            if (!(std::abs(row.gap) <= *row.gap_bound + slack)) rep.gap_ok = false;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

double l2_quotient_max(const TimeSeries& series, double t_max)
{
    const double den = series.constants.norm_u0 + series.constants.norm_dn_u1;
    if (!(den > 0.0)) throw std::invalid_argument("L2 quotient: zero initial data");
    double q = 0.0;
    for (const auto& r : series.records) {
        if (r.t <= t_max * (1.0 + 1e-12)) q = std::max(q, std::sqrt(r.L2_total) / den);
    }
    return q;
}

double v_identity_residual(const TimeSeries& series)
{
    const Constants& c = series.constants;
    const double scale = c.norm_u0 * c.norm_u0 + c.E0;
    double worst = 0.0;
    for (const auto& r : series.records) worst = std::max(worst, std::abs(r.vid_lhs - r.vid_rhs));
    return scale > 0.0 ? worst / scale : worst;
}

bool SuiteReport::pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string SuiteReport::first_failure() const
{
    for (const auto& c : checks) {
        if (!c.pass) return c.name;
    }
    return {};
}

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

SuiteReport certify_series(const TimeSeries& series)
{
    const Constants& c = series.constants;
    const RunMeta& m = series.meta;
    SuiteReport rep;
    if (series.records.empty()) throw std::invalid_argument("certify: empty series");

    {
        CheckResult r{"energy_conservation", true, 0.0, ""};
        for (const auto& rec : series.records) r.worst = std::max(r.worst, std::abs(rec.E - c.E0) / c.E0);
        r.pass = r.worst <= 1e-3;
        r.detail = "max |E(t) - E(0)| / E(0) = " + fmt(r.worst) + " (limit 1e-3)";
        rep.checks.push_back(r);
    }
    {
        CheckResult r{"morawetz_inequality", true, -std::numeric_limits<double>::infinity(), ""};
        double at = 0.0;
        for (const auto& rec : series.records) {
            const double tol = 1e-2 * std::abs(c.J0) + 1e-2 * c.E0 * rec.t * m.h + 1e-12 * c.K0;
            const double excess = rec.lhs_noV() - c.J0 - tol;
            if (excess > r.worst) {
                r.worst = excess;
                at = rec.t;
            }
        }
        r.pass = r.worst <= 0.0;
        r.detail = "max of t E + (n-1)/2 (u_t,u) + (u_t, x.grad u) - J0 - tol = " + fmt(r.worst) + " at t = " + fmt(at);
        rep.checks.push_back(r);
    }
    {
        CheckResult r{"weighted_energy_bound", true, 0.0, ""};
        for (const auto& rec : series.records) r.worst = std::max(r.worst, rec.W / c.I0);
        r.pass = r.worst <= 1.0 + 1e-2;
        r.detail = "max W(t) / I0 = " + fmt(r.worst) + " (limit 1.01)";
        rep.checks.push_back(r);
    }
    {
        CheckResult r{"weighted_energy_monotone", true, 0.0, ""};
        for (std::size_t i = 1; i < series.records.size(); ++i) {
            const double prev = series.records[i - 1].W;
            if (prev > 0.0) r.worst = std::max(r.worst, series.records[i].W / prev - 1.0);
        }
        r.pass = r.worst <= 1e-2;
        r.detail = "max relative step increase of W = " + fmt(r.worst) + " (limit 1e-2)";
        rep.checks.push_back(r);
    }
    {
        CheckResult r{"far_field_bound", true, 0.0, ""};
        for (const auto& rec : series.records) {
            r.worst = std::max(r.worst, rec.F * (1.0 + m.epsilon * rec.t) / c.I0);
        }
        r.pass = r.worst <= 1.0 + 1e-12;
        r.detail = "max far-exterior energy / (I0 / (1 + eps t)) = " + fmt(r.worst);
        rep.checks.push_back(r);
    }
    {
        CheckResult r{"energy_partition", true, 0.0, ""};
        for (const auto& rec : series.records) {
            if (rec.E <= 0.0) continue;
            r.worst = std::max(r.worst, std::abs(rec.E_R[0] + rec.A + rec.F - rec.E) / rec.E);
            for (std::size_t k = 0; k < rec.E_R.size(); ++k) {
                r.worst = std::max(r.worst, std::abs(rec.E_R[k] + rec.X[k] - rec.E) / rec.E);
            }
        }
        r.pass = r.worst <= 1e-12;
        r.detail = "max relative partition residual = " + fmt(r.worst);
        rep.checks.push_back(r);
    }
    {
        const double T = series.records.back().t;
        for (double R : m.radii) {
            CheckResult r{"local_energy_decay_R" + fmt(R), true, 0.0, ""};
            if (!window_fits(T, R)) {
                r.detail = "skipped: T < 4R";
                rep.checks.push_back(r);
                continue;
            }
            const DecayCertificate cert = certify_decay(series, c, R);
            r.pass = cert.bound_holds;
            r.worst = cert.trend_slope.value_or(0.0);
            r.detail = "C_hat = " + fmt(cert.C_hat) + ", trend slope " +
                       (cert.trend_slope ? fmt(*cert.trend_slope) : std::string("n/a")) + " (limit 0.05)" +
                       (cert.tail_negligible ? ", tail below 1e-6 C_hat" : "");
            rep.certificates.push_back(cert);
            rep.checks.push_back(r);
        }
        if (rep.certificates.size() >= 3) {
            rep.r_independence = check_R_independence(rep.certificates);
            CheckResult r{"R_independence", rep.r_independence->pass, rep.r_independence->ratio,
                          "max/min C_hat = " + fmt(rep.r_independence->ratio) + " (limit 3)"};
            rep.checks.push_back(r);
        }
    }
    if (m.potential.kind == PotentialKind::power && m.potential.exponent >= 2.0 && m.potential.amplitude > 0.0 &&
        series.records.back().t >= 4.0 * m.radii.front()) {
        rep.local_l2 = certify_local_l2(series, c, m.radii.front(), m.potential);
        CheckResult r{"local_l2_decay", rep.local_l2->pass(), rep.local_l2->worst_chain_ratio,
                      "max L2_R / ((2 R^alpha / V0) E_R) = " + fmt(rep.local_l2->worst_chain_ratio) +
                          ", certified constant " + fmt(rep.local_l2->decay.C_hat)};
        rep.checks.push_back(r);
    }
    {
        CheckResult r{"hardy_quotient", true, 0.0, ""};
        for (const auto& rec : series.records) r.worst = std::max(r.worst, rec.hardy);
        r.pass = r.worst <= 4.0;
        r.detail = "max int (v/d)^2 / int |grad v|^2 = " + fmt(r.worst) + " (limit 4)";
        rep.checks.push_back(r);
    }
    return rep;
}

std::vector<CheckResult> run_selftest(std::size_t eikonal_points, std::uint64_t seed)
{
    std::vector<CheckResult> out;

    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> tdist(0.0, 50.0), xdist(-50.0, 50.0);
        CheckResult r{"eikonal", true, 0.0, ""};
        std::size_t bad_sign = 0;
        for (std::size_t i = 0; i < eikonal_points; ++i) {
            const double t = tdist(rng);
            Vec3 x{xdist(rng), xdist(rng), xdist(rng)};
            if (std::hypot(x.x, x.y, x.z) < 1e-3) continue;
            const EikonalCheck e = check_eikonal(t, x);
            r.worst = std::max(r.worst, std::abs(e.residual));
            if (t > 0.0 && !e.psi_t_negative) ++bad_sign;
            r.pass = r.pass && e.pass;
        }
        r.detail = std::to_string(eikonal_points) + " points, max |psi_t^2 - |grad psi|^2| = " + fmt(r.worst) +
                   ", psi_t >= 0 at " + std::to_string(bad_sign);
        out.push_back(r);
    }
    {
        const WeightParams w3(3, 1.0), w2(2, 0.5);
        double err = std::abs(weight_dn(w3, 2.5) - 2.5) + std::abs(weight_dn(w2, 0.5) - std::log(2.0)) +
                     std::abs(w2.B() - 4.0);
        bool rejected = false;
        try {
            WeightParams bad(2, 1.0, 1.5);
        } catch (const std::invalid_argument&) {
            rejected = true;
        }
        CheckResult r{"weight_dn", err <= 1e-15 && rejected, err, ""};
        r.detail = "d_3(2.5) = 2.5, d_2(rho) = log 2 with B = 2/rho, B rho < 2 " +
                   std::string(rejected ? "rejected" : "ACCEPTED");
        out.push_back(r);
    }
    {
        const auto ball = check_star_shaped(ObstacleSpec::ball(1.0));
        const auto square = check_star_shaped(ObstacleSpec::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}));
        const auto ell =
            check_star_shaped(ObstacleSpec::polygon({{-1, -1}, {1, -1}, {1, 2}, {3, 2}, {3, 3}, {-1, 3}}));
        CheckResult r{"star_shape", ball.pass && square.pass && !ell.pass, ell.worst, ""};
        r.detail = "ball " + std::string(ball.pass ? "pass" : "FAIL") + ", square " +
                   (square.pass ? "pass" : "FAIL") + ", reentrant polygon " + (ell.pass ? "PASS" : "fails") +
                   " (worst x.nu = " + fmt(ell.worst) + ")";
        out.push_back(r);
    }
    {
        const std::string text = "schema = 1\n[domain]\nmode = radial3d\nradius = 1\n[potential]\nkind = zero\n"
                                 "[u0]\ncenter = 3\nwidth = 1.5\namplitude = 1\n"
                                 "[u1]\ncenter = 3\nwidth = 1.5\namplitude = 0.5\n"
                                 "[run]\nh = 0.01\nT = 3\nR = 2\n";
        const ExperimentConfig cfg = parse_config_text(text);
        const Grid grid = build_grid(cfg.obstacle, cfg.L, cfg.h, cfg.mode);
        const NodalPotential pot = sample_potential(cfg.potential, grid);
        const double rho = cfg.obstacle.circumradius();
        double at0 = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = grid.radius(i);
            at0 = std::max(at0, std::abs(oracle_free_radial(cfg.data, 0.0, r, rho, cfg.potential) -
                                         cfg.data.eval_u0({r, 0.0})));
        }
        WaveState st = init_state(grid, cfg.data, cfg.dt, pot);
        for (std::size_t n = 0; n < cfg.steps; ++n) {
            step(st, grid, pot, cfg.dt);
            st.t = static_cast<double>(n + 1) * cfg.dt;
        }
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            err = std::max(err, std::abs(st.u[i] - oracle_free_radial(cfg.data, st.t, grid.radius(i), rho,
                                                                      cfg.potential)));
        }
        CheckResult r{"oracle", at0 <= 1e-14 && err <= 1e-3, err, ""};
        r.detail = "t = 0 mismatch " + fmt(at0) + ", sup error at t = 3 (h = 0.01) " + fmt(err) + " (limit 1e-3)";
        out.push_back(r);
    }
    for (const GridMode mode : {GridMode::radial3d, GridMode::cartesian2d}) {
        const bool radial = mode == GridMode::radial3d;
        const std::string text = std::string("schema = 1\n[domain]\nmode = ") + to_string(mode) +
                                 "\nradius = 1\n[potential]\nkind = power\namplitude = 1\nexponent = 3\n"
                                 "[u0]\ncenter = 2.5\nwidth = 1\namplitude = 1\n"
                                 "[u1]\ncenter = 2.7\nwidth = 0.8\namplitude = -0.7\n"
                                 "[run]\nh = " + (radial ? "0.01" : "0.04") + "\nT = 0\nR = 2, 3\n";
        const ExperimentConfig cfg = parse_config_text(text);
        const TimeSeries ts = run(cfg);
        const DiagnosticsRecord& r0 = ts.records.front();
        const Constants& c = ts.constants;
        const double dm = std::abs(r0.M_lhs - c.J0) / std::max(1.0, std::abs(c.J0));
        const double dw = std::abs(r0.W - c.I0) / c.I0;
        const double de = std::abs(r0.E - c.E0) / c.E0;
        const double w = std::max({dm, dw, de});
        CheckResult r{std::string("constants_t0_") + to_string(mode), w <= 1e-12, w, ""};
        r.detail = "|M_lhs(0) - J0| " + fmt(dm) + ", |W(0) - I0|/I0 " + fmt(dw) + ", |E(0) - E0|/E0 " + fmt(de);
        out.push_back(r);
    }
    return out;
}

nlohmann::json to_json(const DecayCertificate& c)
{
    nlohmann::json j{
        {"R", c.R},
        {"K0", c.K0},
        {"config_hash", hex_hash(c.run)},
        {"C_hat", c.C_hat},
        {"t_at_max", c.t_at_max},
        {"window", {c.window_begin, c.window_end}},
        {"tail_negligible", c.tail_negligible},
        {"bound_holds", c.bound_holds},
    };
    j["trend_slope"] = c.trend_slope ? nlohmann::json(*c.trend_slope) : nlohmann::json(nullptr);
    j["rate_slope"] = c.rate_slope ? nlohmann::json(*c.rate_slope) : nlohmann::json(nullptr);
    j["R_stable"] = c.R_stable ? nlohmann::json(*c.R_stable) : nlohmann::json(nullptr);
    j["resolution_stable"] = c.resolution_stable ? nlohmann::json(*c.resolution_stable) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const SuiteReport& r)
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"worst", c.worst}, {"detail", c.detail}});
    }
    nlohmann::json certs = nlohmann::json::array();
    for (const auto& c : r.certificates) certs.push_back(to_json(c));
    nlohmann::json j{{"pass", r.pass()}, {"checks", checks}, {"decay_certificates", certs}};
    j["first_failure"] = r.pass() ? nlohmann::json(nullptr) : nlohmann::json(r.first_failure());
    if (r.r_independence) {
        j["R_independence"] = {{"ratio", r.r_independence->ratio}, {"pass", r.r_independence->pass}};
    }
    if (r.local_l2) {
        j["local_l2"] = {{"R", r.local_l2->R},
                         {"prefactor", r.local_l2->prefactor},
                         {"worst_chain_ratio", r.local_l2->worst_chain_ratio},
                         {"chain_holds", r.local_l2->chain_holds},
                         {"decay", to_json(r.local_l2->decay)}};
    }
    return j;
}

}  // namespace decaylab
