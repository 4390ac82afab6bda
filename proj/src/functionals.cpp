#include "decaylab/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace decaylab {

namespace {

bool dirichlet(NodeClass c) { return c == NodeClass::obstacle || c == NodeClass::outer; }

std::vector<double> radial_gradient(const Grid& grid, std::span<const double> u)
{
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    std::vector<double> d(n);
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    return d;
}

}  // namespace

std::vector<double> gradient_sq(const Grid& grid, std::span<const double> u)
{
    if (grid.mode() == GridMode::radial3d) {
        std::vector<double> g = radial_gradient(grid, u);
        for (double& x : g) x *= x;
        return g;
    }
    const std::size_t nx = grid.nx();
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    const auto cls = grid.classes();
    std::vector<double> g(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!grid.active(k)) continue;
        double s = 0.0;
        for (std::size_t q : {k - 1, k + 1, k - nx, k + nx}) {
            const double d = u[q] - u[k];
            s += dirichlet(cls[q]) ? d * d : 0.5 * d * d;
        }
        g[k] = s * inv_h2;
    }
    return g;
}

std::vector<double> radial_derivative(const Grid& grid, std::span<const double> u)
{
    if (grid.mode() == GridMode::radial3d) {
        std::vector<double> d = radial_gradient(grid, u);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] *= grid.radius(i);
        return d;
    }
    const std::size_t nx = grid.nx();
    const double inv_2h = 1.0 / (2.0 * grid.spacing());
    std::vector<double> d(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!grid.active(k)) continue;
        const Vec2 x = grid.position(k);
        // fourth order where the +-2 neighbours are active, second order next to Dirichlet nodes
        const auto diff = [&](std::size_t s) {
            const double c2 = u[k + s] - u[k - s];
            if (!grid.active(k + s) || !grid.active(k - s) || !grid.active(k + 2 * s) || !grid.active(k - 2 * s)) {
                return c2;
            }
            return (8.0 * c2 - (u[k + 2 * s] - u[k - 2 * s])) / 6.0;
        };
        const double gx = diff(1);
        const double gy = diff(nx);
        d[k] = (x.x * gx + x.y * gy) * inv_2h;
    }
    return d;
}

std::vector<double> pointwise_energy(const Grid& grid, const NodalPotential& pot, std::span<const double> u,
                                     std::span<const double> ut)
{
    std::vector<double> e = gradient_sq(grid, u);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = 0.5 * (ut[i] * ut[i] + e[i] + pot.V[i] * u[i] * u[i]);
    return e;
}

double total_energy(const Grid& grid, const NodalPotential& pot, const Snapshot& s)
{
    return integrate(pointwise_energy(grid, pot, s.u, s.ut), grid, Region::whole());
}

double local_energy(const Grid& grid, const NodalPotential& pot, const Snapshot& s, double R)
{
    const double rho = grid.obstacle().circumradius();
    if (!(R > rho) || R > grid.outer_radius()) {
        throw std::invalid_argument("local_energy: R must satisfy rho_0 < R <= L");
    }
    return integrate(pointwise_energy(grid, pot, s.u, s.ut), grid, Region::ball(R));
}

Constants compute_constants(const InitialData& data, const Grid& grid, const NodalPotential& pot,
                            const WeightParams& params)
{
    const std::vector<double> u0 = sample_field(grid, data.u0);
    const std::vector<double> u1 = sample_field(grid, data.u1);
    const std::vector<double> g0 = gradient_sq(grid, u0);
    const std::vector<double> xg0 = radial_derivative(grid, u0);
    const double n = grid.dimension();

    Constants c;
    double u1u0 = 0.0, u1xg = 0.0, nu0 = 0.0, ndu1 = 0.0, e0 = 0.0, i0 = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid.weight(i);
        if (w == 0.0) continue;
        const double r = grid.radius(i);
        const double dens = u1[i] * u1[i] + g0[i] + pot.V[i] * u0[i] * u0[i];
        const double d = weight_dn(params, r);
        u1u0 += w * u1[i] * u0[i];
        u1xg += w * u1[i] * xg0[i];
        nu0 += w * u0[i] * u0[i];
        ndu1 += w * d * d * u1[i] * u1[i];
        e0 += w * 0.5 * dens;
        i0 += w * (1.0 + r) * dens;
    }
    c.E0 = e0;
    c.I0 = i0;
    c.J0 = 0.5 * (n - 1.0) * u1u0 + u1xg;
    c.norm_u0 = std::sqrt(nu0);
    c.norm_dn_u1 = std::sqrt(ndu1);
    c.K0 = u1u0 + u1xg + std::sqrt(e0) * (c.norm_u0 + c.norm_dn_u1) + i0;
    return c;
}

double morawetz_lhs_noV(const Grid& grid, const NodalPotential& pot, const Snapshot& s)
{
    const double n = grid.dimension();
    const std::vector<double> xg = radial_derivative(grid, s.u);
    return s.t * total_energy(grid, pot, s) + 0.5 * (n - 1.0) * inner(s.ut, s.u, grid) + inner(s.ut, xg, grid);
}

double morawetz_lhs(const Grid& grid, const NodalPotential& pot, const Snapshot& s)
{
    return morawetz_lhs_noV(grid, pot, s) - s.vterm_accum;
}

double morawetz_residual(const Grid& grid, double lhs, double flux_accum, const Constants& c)
{
    if (grid.mode() != GridMode::radial3d) {
        throw std::logic_error("morawetz_residual: boundary flux is only tracked in radial3d mode");
    }
    return lhs - c.J0 - flux_accum;
}

double weighted_energy(const Grid& grid, const NodalPotential& pot, const Snapshot& s)
{
    const std::vector<double> e = pointwise_energy(grid, pot, s.u, s.ut);
    double sum = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double w = grid.weight(i);
        if (w != 0.0) sum += w * weight_psi(s.t, grid.radius(i)).value * 2.0 * e[i];
    }
    return sum;
}

double annulus_energy(const Grid& grid, std::span<const double> e, double R, double eps, double t)
{
    const double cap = (1.0 + eps) * t;
    if (cap > grid.outer_radius() * (1.0 + 1e-12)) {
        throw std::invalid_argument("annulus_energy: (1+eps) t exceeds the truncation radius L");
    }
    if (cap <= R) return 0.0;
    return integrate(e, grid, Region::annulus(R, cap));
}

double exterior_energy(const Grid& grid, std::span<const double> e, double R)
{
    return integrate(e, grid, Region::exterior(R));
}

void validate_record(const DiagnosticsRecord& rec)
{
    const auto bad = [&](const char* what) {
        throw std::runtime_error(std::string("diagnostics record at t=") + std::to_string(rec.t) + ": " + what);
    };
    if (!(rec.E >= 0.0) || !(rec.L2_total >= 0.0) || !(rec.W >= 0.0) || !(rec.A >= 0.0) || !(rec.F >= 0.0)) {
        bad("negative or non-finite energy entry");
    }
    for (std::size_t k = 0; k < rec.E_R.size(); ++k) {
        if (!(rec.E_R[k] >= 0.0) || !(rec.X[k] >= 0.0) || !(rec.L2_R[k] >= 0.0)) bad("negative local quantity");
        if (std::abs(rec.E_R[k] + rec.X[k] - rec.E) > 1e-12 * std::max(rec.E, 1e-300)) bad("E != E_R + X");
    }
}

Diagnostics::Diagnostics(const Grid& grid, const NodalPotential& pot, const InitialData& data, WeightParams params,
                         std::vector<double> radii, double epsilon)
    : grid_(grid), pot_(pot), params_(params), radii_(std::move(radii)), epsilon_(epsilon)
{
    if (radii_.empty()) throw std::invalid_argument("diagnostics: at least one observation radius R is required");
    const double rho = grid.obstacle().circumradius();
    for (double R : radii_) {
        if (!(R > rho) || R > grid.outer_radius()) throw std::invalid_argument("diagnostics: R must satisfy rho_0 < R <= L");
    }
    if (!(epsilon > 0.0)) throw std::invalid_argument("diagnostics: epsilon must be positive");
    u1_ = sample_field(grid, data.u1);
    inv_hardy_sq_.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.weight(i) == 0.0) continue;
        const double d = hardy_weight(params_, grid.radius(i));
        inv_hardy_sq_[i] = 1.0 / (d * d);
    }
    constants_ = compute_constants(data, grid, pot, params_);
}

DiagnosticsRecord Diagnostics::record(const Snapshot& s) const
{
    const Grid& g = grid_;
    const std::vector<double> gu = gradient_sq(g, s.u);
    const std::vector<double> xg = radial_derivative(g, s.u);
    const std::vector<double> gv = gradient_sq(g, s.v);

    DiagnosticsRecord rec;
    rec.t = s.t;
    rec.flux_accum = s.flux_accum;
    rec.Vterm_accum = s.vterm_accum;

    const std::size_t m = radii_.size();
    const double R1 = radii_.front();
    const double cap = (1.0 + epsilon_) * s.t;
    if (cap > g.outer_radius() * (1.0 + 1e-12)) {
        throw std::invalid_argument("diagnostics: (1+eps) t exceeds the truncation radius L");
    }
    const double far = std::max(R1, cap);
    rec.E_R.assign(m, 0.0);
    rec.L2_R.assign(m, 0.0);
    rec.X.assign(m, 0.0);

    double E = 0.0, W = 0.0, L2 = 0.0, ut_u = 0.0, ut_xg = 0.0, A = 0.0, F = 0.0;
    double v_grad = 0.0, v_pot = 0.0, u1_v = 0.0, v_hardy = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = g.weight(i);
        if (w == 0.0) continue;
        const double r = g.radius(i);
        const double u2 = s.u[i] * s.u[i];
        const double e = 0.5 * (s.ut[i] * s.ut[i] + gu[i] + pot_.V[i] * u2);
        const double we = w * e;
        const double wu2 = w * u2;
        E += we;
        W += we * 2.0 * weight_psi(s.t, r).value;
        L2 += wu2;
        ut_u += w * s.ut[i] * s.u[i];
        ut_xg += w * s.ut[i] * xg[i];
        v_grad += w * gv[i];
        v_pot += w * pot_.V[i] * s.v[i] * s.v[i];
        u1_v += w * u1_[i] * s.v[i];
        v_hardy += w * s.v[i] * s.v[i] * inv_hardy_sq_[i];
        for (std::size_t k = 0; k < m; ++k) {
            if (r <= radii_[k]) {
                rec.E_R[k] += we;
                rec.L2_R[k] += wu2;
            } else {
                rec.X[k] += we;
            }
        }
        if (r > far) {
            F += we;
        } else if (r > R1) {
            A += we;
        }
    }
    rec.E = E;
    rec.W = W;
    rec.L2_total = L2;
    rec.A = A;
    rec.F = F;
    const double n = g.dimension();
    rec.M_lhs = s.t * E + 0.5 * (n - 1.0) * ut_u + ut_xg - s.vterm_accum;
    rec.vid_lhs = L2 + v_grad + v_pot;
    rec.vid_rhs = constants_.norm_u0 * constants_.norm_u0 + 2.0 * u1_v;
    rec.hardy = v_grad > 0.0 ? v_hardy / v_grad : 0.0;
    return rec;
}

}  // namespace decaylab
