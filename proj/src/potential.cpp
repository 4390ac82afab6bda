#include "decaylab/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace decaylab {

std::string to_string(PotentialKind kind)
{
    switch (kind) {
    case PotentialKind::power: return "power";
    case PotentialKind::exponential: return "exponential";
    case PotentialKind::constant: return "constant";
    case PotentialKind::zero: return "zero";
    }
    return "unknown";
}

PotentialKind potential_kind_from_string(const std::string& name)
{
    if (name == "power") return PotentialKind::power;
    if (name == "exponential") return PotentialKind::exponential;
    if (name == "constant") return PotentialKind::constant;
    if (name == "zero") return PotentialKind::zero;
    throw std::invalid_argument("unknown potential kind '" + name + "'");
}

namespace {
void require_amplitude(double a)
{
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("potential amplitude must be finite and >= 0");
}
}  // namespace

PotentialSpec PotentialSpec::power(double V0, double alpha)
{
    require_amplitude(V0);
    if (!std::isfinite(alpha)) throw std::invalid_argument("power potential: exponent must be finite");
    return {PotentialKind::power, V0, alpha};
}

PotentialSpec PotentialSpec::exponential(double V0)
{
    require_amplitude(V0);
    return {PotentialKind::exponential, V0, 0.0};
}

PotentialSpec PotentialSpec::constant(double m2)
{
    require_amplitude(m2);
    return {PotentialKind::constant, m2, 0.0};
}

std::string PotentialSpec::describe() const
{
    std::ostringstream os;
    switch (kind) {
    case PotentialKind::power: os << "power(V0=" << amplitude << ", alpha=" << exponent << ")"; break;
    case PotentialKind::exponential: os << "exponential(V0=" << amplitude << ")"; break;
    case PotentialKind::constant: os << "constant(m2=" << amplitude << ")"; break;
    case PotentialKind::zero: os << "zero"; break;
    }
    return os.str();
}

RadialValue eval_V_radial(const PotentialSpec& spec, double r)
{
    switch (spec.kind) {
    case PotentialKind::power: {
        if (!(r > 0.0)) throw std::domain_error("power potential evaluated at |x| = 0");
        const double v = spec.amplitude * std::pow(r, -spec.exponent);
        return {v, -spec.exponent * v / r};
    }
    case PotentialKind::exponential: {
        const double v = spec.amplitude * std::exp(-r);
        return {v, -v};
    }
    case PotentialKind::constant: return {spec.amplitude, 0.0};
    case PotentialKind::zero: return {0.0, 0.0};
    }
    return {0.0, 0.0};
}

PotentialValue eval_V(const PotentialSpec& spec, Vec3 x)
{
    const double r = norm(x);
    const RadialValue rv = eval_V_radial(spec, r);
    if (rv.derivative == 0.0 || r == 0.0) return {rv.value, {}};
    const double s = rv.derivative / r;
    return {rv.value, {s * x.x, s * x.y, s * x.z}};
}

double admissibility_integrand(const PotentialSpec& spec, double r)
{
    const RadialValue rv = eval_V_radial(spec, r);
    return 0.5 * r * rv.derivative + rv.value;
}

std::pair<double, double> radial_admissibility_max(const PotentialSpec& spec, double r_min, double r_max)
{
    const double a = admissibility_integrand(spec, r_min);
    const double b = admissibility_integrand(spec, r_max);
    return a >= b ? std::pair{a, r_min} : std::pair{b, r_max};
}

AdmissibilityReport check_A2(const PotentialSpec& spec, const Grid& grid, double tol)
{
    AdmissibilityReport rep;
    rep.worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.weight(i) == 0.0) continue;
        const Vec2 p = grid.position(i);
        const PotentialValue pv = eval_V(spec, lift(p));
        const double g = 0.5 * (p.x * pv.gradient.x + p.y * pv.gradient.y) + pv.value;
        if (g > rep.worst) {
            rep.worst = g;
            rep.location = p;
            rep.worst_radius = grid.radius(i);
        }
    }
    const double r_min = grid.mode() == GridMode::radial3d ? grid.obstacle().ball_radius() : grid.obstacle().inradius();
    const auto [cw, cr] = radial_admissibility_max(spec, r_min, grid.outer_radius());
    rep.closed_form_worst = cw;
    rep.closed_form_radius = cr;
    rep.closed_form_pass = cw <= tol;
    const bool grid_pass = rep.worst <= tol;
    rep.agree = grid_pass == rep.closed_form_pass;
    rep.pass = grid_pass && rep.closed_form_pass;
    return rep;
}

WeightParams::WeightParams(int n, double inf_radius, std::optional<double> B) : n_(n), inf_radius_(inf_radius)
{
    if (n != 2 && n != 3) throw std::invalid_argument("weight parameters: dimension must be 2 or 3");
    if (!(inf_radius > 0.0)) throw std::invalid_argument("weight parameters: inf |x| over the domain must be positive");
    B_ = B.value_or(2.0 / inf_radius);
    if (n == 2 && B_ * inf_radius < 2.0 * (1.0 - 1e-12)) {
        throw std::invalid_argument("weight parameters: B * inf|x| must be >= 2");
    }
}

double weight_dn(const WeightParams& params, double r)
{
    if (params.dimension() == 3) return r;
    if (params.B() * r < 2.0 * (1.0 - 1e-12)) {
        throw std::domain_error("d_2 evaluated where B|x| < 2 (outside every admissible domain)");
    }
    return std::log(params.B() * r);
}

double hardy_weight(const WeightParams& params, double r)
{
    return params.dimension() == 3 ? r : r * weight_dn(params, r);
}

Psi weight_psi(double t, double r)
{
    if (r >= t) return {1.0 + r - t, -1.0, 1.0};
    const double s = 1.0 / (1.0 + t - r);
    return {s, -s * s, s * s};
}

PsiGradient weight_psi(double t, Vec3 x)
{
    const double r = norm(x);
    if (r == 0.0) throw std::domain_error("grad psi requested at x = 0");
    const Psi p = weight_psi(t, r);
    const double s = p.dr / r;
    return {p, {s * x.x, s * x.y, s * x.z}};
}

EikonalCheck check_eikonal(double t, Vec3 x)
{
    const PsiGradient g = weight_psi(t, x);
    const double grad2 = g.grad.x * g.grad.x + g.grad.y * g.grad.y + g.grad.z * g.grad.z;
    EikonalCheck c;
    c.residual = g.psi.dt * g.psi.dt - grad2;
    c.psi_t = g.psi.dt;
    c.psi_t_negative = g.psi.dt < 0.0;
    c.pass = std::abs(c.residual) <= 1e-14 && (t <= 0.0 || c.psi_t_negative);
    return c;
}

}  // namespace decaylab
