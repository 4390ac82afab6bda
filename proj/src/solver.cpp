#include "decaylab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace decaylab {

double Bump::profile(double r) const
{
    const double s = (r - center) / width;
    const double q = 1.0 - s * s;
    if (q <= 0.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / q);
}

double Bump::operator()(Vec2 p) const
{
    if (!angle) return profile(norm(p));
    const double cx = center * std::cos(*angle);
    const double cy = center * std::sin(*angle);
    const double s = std::hypot(p.x - cx, p.y - cy) / width;
    const double q = 1.0 - s * s;
    if (q <= 0.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / q);
}

namespace {
double sum_bumps(const std::vector<Bump>& bumps, Vec2 p)
{
    double s = 0.0;
    for (const Bump& b : bumps) s += b(p);
    return s;
}
}  // namespace

double InitialData::eval_u0(Vec2 p) const { return sum_bumps(u0, p); }
double InitialData::eval_u1(Vec2 p) const { return sum_bumps(u1, p); }

bool InitialData::radially_symmetric() const
{
    const auto shell = [](const Bump& b) { return !b.angle.has_value(); };
    return std::all_of(u0.begin(), u0.end(), shell) && std::all_of(u1.begin(), u1.end(), shell);
}

double InitialData::inner_support_radius() const
{
    double r = std::numeric_limits<double>::infinity();
    for (const auto* set : {&u0, &u1}) {
        for (const Bump& b : *set) {
            if (b.amplitude != 0.0) r = std::min(r, b.min_radius());
        }
    }
    return r;
}

double InitialData::outer_support_radius() const
{
    double r = 0.0;
    for (const auto* set : {&u0, &u1}) {
        for (const Bump& b : *set) {
            if (b.amplitude != 0.0) r = std::max(r, b.max_radius());
        }
    }
    return r;
}

void validate_initial_data(const InitialData& data, const Grid& grid)
{
    for (const auto* set : {&data.u0, &data.u1}) {
        for (const Bump& b : *set) {
            if (!(b.width > 0.0)) throw std::invalid_argument("initial data: bump width must be positive");
            if (b.angle && grid.mode() == GridMode::radial3d) {
                throw std::invalid_argument("initial data: off-center bumps need the cartesian2d mode");
            }
        }
    }
    const double inner = data.inner_support_radius();
    if (std::isinf(inner)) return;
    const double margin = grid.obstacle().circumradius() + 2.0 * grid.spacing();
    if (inner < margin - 1e-12) {
        throw std::invalid_argument("initial data: support reaches within 2h of the obstacle boundary");
    }
    if (data.outer_support_radius() > data.support_radius + 1e-12) {
        throw std::invalid_argument("initial data: support exceeds the stated support radius r_supp");
    }
    if (data.support_radius >= grid.outer_radius()) {
        throw std::invalid_argument("initial data: support radius must lie inside the truncated domain");
    }
}

NodalPotential sample_potential(const PotentialSpec& spec, const Grid& grid)
{
    NodalPotential p;
    p.spec = spec;
    p.V.assign(grid.size(), 0.0);
    p.G.assign(grid.size(), 0.0);
    p.GW.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.weight(i) == 0.0 && !grid.active(i)) continue;
        const Vec2 x = grid.position(i);
        const PotentialValue pv = eval_V(spec, lift(x));
        p.V[i] = pv.value;
        p.G[i] = 0.5 * (x.x * pv.gradient.x + x.y * pv.gradient.y) + pv.value;
        p.GW[i] = grid.weight(i) * p.G[i];
        p.max_V = std::max(p.max_V, pv.value);
    }
    return p;
}

double max_time_step(const Grid& grid)
{
    return (grid.mode() == GridMode::radial3d ? 0.9 : 0.6) * grid.spacing();
}

void check_cfl(const Grid& grid, const NodalPotential& pot, double dt)
{
    const double h = grid.spacing();
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (dt > max_time_step(grid) * (1.0 + 1e-12)) {
        throw std::invalid_argument("time step violates the CFL bound (0.9h radial, 0.6h cartesian)");
    }
    // leapfrog stability: dt^2 * (spectral radius of -Delta_h + V) < 4
    const double lap = (grid.mode() == GridMode::radial3d ? 4.0 : 8.0) / (h * h);
    if (dt * dt * (lap + pot.max_V) >= 4.0) {
        throw std::invalid_argument("time step unstable for the potential magnitude");
    }
}

namespace {

// Calls emit(k, (Delta_h u - V u)_k) over the active ranges of the grid; the
// operator is multiplied by the node mask, so inactive nodes inside a range get 0.
template <class Emit>
void sweep_operator(const Grid& grid, const NodalPotential& pot, const double* u, Emit emit)
{
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const double* V = pot.V.data();
    const double* mask = grid.mask().data();
    if (grid.mode() == GridMode::radial3d) {
        const double* r = grid.radii().data();
        const std::size_t n = grid.size();
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double lap = (r[i + 1] * u[i + 1] - 2.0 * r[i] * u[i] + r[i - 1] * u[i - 1]) * inv_h2 / r[i];
            emit(i, lap - V[i] * u[i]);
        }
        return;
    }
    const std::size_t nx = grid.nx();
    for (const auto& [b, e] : grid.active_ranges()) {
        // active nodes never sit on the outer lattice ring, so all four neighbours exist
        for (std::size_t k = b; k < e; ++k) {
            const double lap = (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx] - 4.0 * u[k]) * inv_h2;
            emit(k, mask[k] * (lap - V[k] * u[k]));
        }
    }
}

double vterm_rate(const NodalPotential& pot, std::span<const double> u)
{
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += pot.GW[i] * u[i] * u[i];
    return s;
}

}  // namespace

void apply_operator(const Grid& grid, const NodalPotential& pot, std::span<const double> u, std::span<double> out)
{
    std::fill(out.begin(), out.end(), 0.0);
    sweep_operator(grid, pot, u.data(), [&](std::size_t k, double Lu) { out[k] = Lu; });
}

std::vector<double> sample_field(const Grid& grid, const std::vector<Bump>& bumps)
{
    std::vector<double> f(grid.size(), 0.0);
    if (bumps.empty()) return f;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.active(i)) f[i] = sum_bumps(bumps, grid.position(i));
    }
    return f;
}

double boundary_flux_rate(const Grid& grid, std::span<const double> u)
{
    if (grid.mode() != GridMode::radial3d) return 0.0;
    const double h = grid.spacing();
    const double rho = grid.radius(0);
    const double ur = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    return -2.0 * std::numbers::pi * rho * rho * rho * ur * ur;
}

WaveState init_state(const Grid& grid, const InitialData& data, double dt, const NodalPotential& pot)
{
    validate_initial_data(data, grid);
    check_cfl(grid, pot, dt);
    WaveState s;
    s.u = sample_field(grid, data.u0);
    const std::vector<double> u1 = sample_field(grid, data.u1);
    std::vector<double> Lu(grid.size());
    apply_operator(grid, pot, s.u, Lu);
    s.u_prev.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        s.u_prev[i] = grid.active(i) ? s.u[i] - dt * u1[i] + 0.5 * dt * dt * Lu[i] : 0.0;
    }
    s.v.assign(grid.size(), 0.0);
    s.vterm_rate = vterm_rate(pot, s.u);
    s.flux_rate = boundary_flux_rate(grid, s.u);
    return s;
}

void step(WaveState& state, const Grid& grid, const NodalPotential& pot, double dt)
{
    check_cfl(grid, pot, dt);
    const double dt2 = dt * dt;
    const double half = 0.5 * dt;
    const double* u = state.u.data();
    const double* gw = pot.GW.data();
    const double* mask = grid.mask().data();
    double* next = state.u_prev.data();  // overwritten in place, then the buffers swap
    double* v = state.v.data();
    double vr = 0.0;
    sweep_operator(grid, pot, u, [&](std::size_t k, double Lu) {
        const double nk = mask[k] * (2.0 * u[k] - next[k] + dt2 * Lu);
        next[k] = nk;
        v[k] += half * (u[k] + nk);
        vr += gw[k] * nk * nk;
    });
    // any non-finite node poisons vr, since 0 * inf is NaN
    if (!std::isfinite(vr) || !std::isfinite(next[grid.active_ranges().front().first])) {
        throw std::runtime_error("solver: non-finite field values (unstable run)");
    }

    state.vterm_accum += half * (state.vterm_rate + vr);
    state.vterm_rate = vr;
    const double fr = boundary_flux_rate(grid, state.u_prev);
    state.flux_accum += half * (state.flux_rate + fr);
    state.flux_rate = fr;

    std::swap(state.u, state.u_prev);
    state.t += dt;
    ++state.steps;
}

std::vector<double> look_ahead(const WaveState& state, const Grid& grid, const NodalPotential& pot, double dt)
{
    std::vector<double> next(grid.size(), 0.0);
    const double dt2 = dt * dt;
    const double* u = state.u.data();
    const double* prev = state.u_prev.data();
    const double* mask = grid.mask().data();
    sweep_operator(grid, pot, u, [&](std::size_t k, double Lu) { next[k] = mask[k] * (2.0 * u[k] - prev[k] + dt2 * Lu); });
    return next;
}

std::vector<double> velocity(const WaveState& state, const Grid& grid, const NodalPotential& pot, double dt)
{
    std::vector<double> ut = look_ahead(state, grid, pot, dt);
    const double inv = 1.0 / (2.0 * dt);
    for (std::size_t i = 0; i < ut.size(); ++i) ut[i] = (ut[i] - state.u_prev[i]) * inv;
    return ut;
}

void reverse(WaveState& state) { std::swap(state.u, state.u_prev); }

Snapshot snapshot(const WaveState& state, const Grid& grid, const NodalPotential& pot, double dt)
{
    Snapshot s;
    s.t = state.t;
    s.u = state.u;
    s.ut = velocity(state, grid, pot, dt);
    s.v = state.v;
    s.flux_accum = state.flux_accum;
    s.vterm_accum = state.vterm_accum;
    return s;
}

namespace {

double shell_sum(const std::vector<Bump>& bumps, double r)
{
    double s = 0.0;
    for (const Bump& b : bumps) s += b.profile(r);
    return s;
}

// w-profile r * phi(r) extended oddly about rho0.
double odd_w(const std::vector<Bump>& bumps, double s, double rho0)
{
    if (s >= rho0) return s * shell_sum(bumps, s);
    const double m = 2.0 * rho0 - s;
    return -m * shell_sum(bumps, m);
}

// F(x) = int_{rho0}^{x} s phi1(s) ds for x >= rho0.
double velocity_primitive(const std::vector<Bump>& bumps, double x, double rho0)
{
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    for (const Bump& b : bumps) {
        const double a = std::max(rho0, b.min_radius());
        const double c = std::min(x, b.max_radius());
        if (c <= a) continue;
        total += gauss_kronrod<double, 61>::integrate([&b](double s) { return s * b.profile(s); }, a, c, 8, 1e-13);
    }
    return total;
}

// even extension of F about rho0, so that d/dx matches the odd extension of r phi1
double velocity_primitive_even(const std::vector<Bump>& bumps, double x, double rho0)
{
    return velocity_primitive(bumps, x >= rho0 ? x : 2.0 * rho0 - x, rho0);
}

}  // namespace

double oracle_free_radial(const InitialData& data, double t, double r, double rho0, const PotentialSpec& potential)
{
    if (!potential.is_zero()) throw std::invalid_argument("oracle_free_radial: requires V = 0");
    if (!data.radially_symmetric()) throw std::invalid_argument("oracle_free_radial: requires radial shell data");
    if (!(r > 0.0)) throw std::invalid_argument("oracle_free_radial: r must be positive");
    const double a = r - t;
    const double b = r + t;
    double w = 0.5 * (odd_w(data.u0, a, rho0) + odd_w(data.u0, b, rho0));
    if (!data.u1.empty() && t != 0.0) {
        w += 0.5 * (velocity_primitive_even(data.u1, b, rho0) - velocity_primitive_even(data.u1, a, rho0));
    }
    return w / r;
}

}  // namespace decaylab
