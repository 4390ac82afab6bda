#pragma once

#include <optional>
#include <span>
#include <vector>

#include "decaylab/geometry.hpp"
#include "decaylab/potential.hpp"

namespace decaylab {

/// Smooth compactly supported bump a * exp(1 - 1/(1 - s^2)), |s| < 1.
///
/// Without `angle` the bump is a radial shell, s = (|x| - center) / width.
/// With `angle` (cartesian2d only) it is a blob around center * (cos a, sin a),
/// s = |x - x_c| / width.
struct Bump {
    double center{0.0};
    double width{1.0};
    double amplitude{0.0};
    std::optional<double> angle;

    double operator()(Vec2 p) const;
    /// Shell profile as a function of |x|; ignores `angle`.
    double profile(double r) const;
    double min_radius() const { return center - width; }
    double max_radius() const { return center + width; }
};

struct InitialData {
    std::vector<Bump> u0;
    std::vector<Bump> u1;
    double support_radius{0.0};  ///< r_supp

    double eval_u0(Vec2 p) const;
    double eval_u1(Vec2 p) const;
    bool radially_symmetric() const;
    /// Smallest radius reached by any bump support (infinity for empty data).
    double inner_support_radius() const;
    /// Largest radius reached by any bump support (0 for empty data).
    double outer_support_radius() const;
};

/// Throws std::invalid_argument when the supports leave
/// {rho_0 + 2h <= |x| <= r_supp}, where rho_0 is the obstacle circumradius.
void validate_initial_data(const InitialData& data, const Grid& grid);

/// V and the admissibility integrand 1/2 x.gradV + V sampled at grid nodes.
struct NodalPotential {
    PotentialSpec spec;
    std::vector<double> V;
    std::vector<double> G;
    std::vector<double> GW;  ///< quadrature weight times G
    double max_V{0.0};
};

NodalPotential sample_potential(const PotentialSpec& spec, const Grid& grid);

/// Leapfrog state. `u` is the level t, `u_prev` the level t - dt.
///
/// flux_accum = 1/2 int_0^t int_{dOmega} (du/dnu)^2 sigma.nu dS ds (radial mode only)
/// vterm_accum = int_0^t int_Omega (1/2 x.gradV + V) u^2 dx ds
/// v = int_0^t u ds (auxiliary field for the L^2 bound)
struct WaveState {
    double t{0.0};
    std::size_t steps{0};
    std::vector<double> u;
    std::vector<double> u_prev;
    std::vector<double> v;
    double flux_accum{0.0};
    double vterm_accum{0.0};
    // integrand values at the current level, reused by the trapezoid update
    double flux_rate{0.0};
    double vterm_rate{0.0};
};

/// Largest stable step for the grid mode: 0.9 h (radial3d), 0.6 h (cartesian2d).
double max_time_step(const Grid& grid);

/// Throws std::invalid_argument when dt breaks the CFL bound (including the V term).
void check_cfl(const Grid& grid, const NodalPotential& pot, double dt);

/// out = Delta_h u - V u on active nodes, 0 elsewhere.
void apply_operator(const Grid& grid, const NodalPotential& pot, std::span<const double> u, std::span<double> out);

std::vector<double> sample_field(const Grid& grid, const std::vector<Bump>& bumps);

/// u = u0, u_prev = u0 - dt u1 + dt^2/2 (Delta_h u0 - V u0), accumulators zero.
WaveState init_state(const Grid& grid, const InitialData& data, double dt, const NodalPotential& pot);

/// Advances by dt. Throws std::invalid_argument on a CFL violation and
/// std::runtime_error when the field becomes non-finite.
void step(WaveState& state, const Grid& grid, const NodalPotential& pot, double dt);

/// Level t + dt without committing it.
std::vector<double> look_ahead(const WaveState& state, const Grid& grid, const NodalPotential& pot, double dt);

/// Centered velocity (u(t+dt) - u(t-dt)) / (2 dt).
std::vector<double> velocity(const WaveState& state, const Grid& grid, const NodalPotential& pot, double dt);

/// Reverses the direction of time (swaps the two leapfrog levels).
void reverse(WaveState& state);

/// Fields at one time level, with the velocity resolved.
struct Snapshot {
    double t{0.0};
    std::vector<double> u;
    std::vector<double> ut;
    std::vector<double> v;
    double flux_accum{0.0};
    double vterm_accum{0.0};
};

Snapshot snapshot(const WaveState& state, const Grid& grid, const NodalPotential& pot, double dt);

/// Instantaneous boundary flux rate 1/2 int_{dOmega} (du/dnu)^2 sigma.nu dS for the
/// radial grid: -2 pi rho_0^3 u_r(rho_0)^2, with a one-sided 3-point u_r.
double boundary_flux_rate(const Grid& grid, std::span<const double> u);

/// Free (V = 0) radial reference solution: d'Alembert for w = r u on the odd
/// extension of the data about r = rho_0. Throws std::invalid_argument for a nonzero
/// potential or non-radial data.
double oracle_free_radial(const InitialData& data, double t, double r, double rho0, const PotentialSpec& potential);

}  // namespace decaylab
