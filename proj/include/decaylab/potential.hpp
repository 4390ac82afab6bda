#pragma once

#include <optional>
#include <string>
#include <vector>

#include "decaylab/geometry.hpp"

namespace decaylab {

struct Vec3 {
    double x{};
    double y{};
    double z{};
};

inline double norm(Vec3 a) { return std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z); }
inline Vec3 lift(Vec2 p) { return {p.x, p.y, 0.0}; }

enum class PotentialKind { power, exponential, constant, zero };

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

/// Radial potential families:
///   power        V0 |x|^-alpha
///   exponential  V0 exp(-|x|)
///   constant     m^2 (Klein-Gordon)
///   zero
struct PotentialSpec {
    PotentialKind kind{PotentialKind::zero};
    double amplitude{0.0};
    double exponent{0.0};

    static PotentialSpec power(double V0, double alpha);
    static PotentialSpec exponential(double V0);
    static PotentialSpec constant(double m2);
    static PotentialSpec zero() { return {}; }

    bool is_zero() const { return kind == PotentialKind::zero || amplitude == 0.0; }
    std::string describe() const;
};

struct RadialValue {
    double value;
    double derivative;  ///< dV/dr
};

/// V(r) and V'(r). Throws std::domain_error for the power kind at r <= 0.
RadialValue eval_V_radial(const PotentialSpec& spec, double r);

struct PotentialValue {
    double value;
    Vec3 gradient;
};

PotentialValue eval_V(const PotentialSpec& spec, Vec3 x);

/// 1/2 (x . grad V) + V = 1/2 r V'(r) + V(r), the quantity that must be <= 0.
double admissibility_integrand(const PotentialSpec& spec, double r);

struct AdmissibilityReport {
    bool pass{false};
    double worst{0.0};           ///< max over weighted nodes of 1/2 x.gradV + V
    double worst_radius{0.0};    ///< |x| at the attaining node
    Vec2 location{};             ///< attaining node
    double closed_form_worst{0.0};   ///< max over r in [r_min, L] of 1/2 r V' + V
    double closed_form_radius{0.0};
    bool closed_form_pass{false};
    bool agree{false};
};

/// Audit of 1/2 (x . grad V) + V <= 0. Grid sampling plus the continuous radial
/// criterion r V'(r) <= -2 V(r) over [inf |x|, L]; both must pass and agree.
AdmissibilityReport check_A2(const PotentialSpec& spec, const Grid& grid, double tol = 1e-12);

/// Continuous radial criterion over [r_min, r_max]. Every supported kind has a
/// residual 1/2 r V' + V that is monotone or has a single interior minimum, so the
/// maximum over an interval sits at an endpoint.
std::pair<double, double> radial_admissibility_max(const PotentialSpec& spec, double r_min, double r_max);

/// Hardy weight parameters: n in {2, 3}; B is only used for n = 2 and must satisfy
/// B * inf{|x| : x in Omega} >= 2.
class WeightParams {
public:
    /// B defaults to the minimal admissible value 2 / inf_radius.
    WeightParams(int n, double inf_radius, std::optional<double> B = std::nullopt);

    int dimension() const { return n_; }
    double B() const { return B_; }
    double inf_radius() const { return inf_radius_; }

private:
    int n_;
    double inf_radius_;
    double B_;
};

/// d_n(x) = |x| (n = 3), log(B |x|) (n = 2). Throws std::domain_error when
/// B |x| < 2 for n = 2 (outside every admissible Omega for that B).
double weight_dn(const WeightParams& params, double r);

/// Weight in the Hardy inequality used for the auxiliary v = int_0^t u ds:
/// |x| for n = 3, |x| log(B|x|) for n = 2. Both give int (v/d)^2 <= 4 int |grad v|^2.
double hardy_weight(const WeightParams& params, double r);

struct Psi {
    double value;
    double dt;        ///< d psi / dt
    double dr;        ///< d psi / d|x|; grad psi = dr * x/|x|
};

/// psi(t,x) = 1 + |x| - t for |x| >= t, (1 + t - |x|)^-1 for |x| < t.
Psi weight_psi(double t, double r);

struct PsiGradient {
    Psi psi;
    Vec3 grad;
};

/// Full gradient form. Throws std::domain_error at x = 0.
PsiGradient weight_psi(double t, Vec3 x);

struct EikonalCheck {
    double residual;   ///< psi_t^2 - |grad psi|^2
    double psi_t;
    bool psi_t_negative;  ///< psi_t < 0 (claimed only for t > 0; true at t = 0 as well)
    bool pass;            ///< |residual| <= 1e-14 and (t <= 0 or psi_t < 0)
};

EikonalCheck check_eikonal(double t, Vec3 x);

}  // namespace decaylab
