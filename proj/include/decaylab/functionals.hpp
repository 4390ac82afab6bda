#pragma once

#include <span>
#include <vector>

#include "decaylab/geometry.hpp"
#include "decaylab/potential.hpp"
#include "decaylab/solver.hpp"

namespace decaylab {

/// |grad u|^2 per node.
///
/// radial3d: (u_r)^2 with centered differences, one-sided 3-point at both ends.
/// cartesian2d: edge form, 1/2 sum over neighbour edges of ((u_nb - u)/h)^2, where an
/// edge into a Dirichlet node (value 0) is charged entirely to the active node. The
/// quadrature sum then equals the discrete Dirichlet form (-Delta_h u, u).
std::vector<double> gradient_sq(const Grid& grid, std::span<const double> u);

/// x . grad u per node with centered differences (one-sided at radial ends; fourth
/// order on the planar lattice away from Dirichlet nodes).
std::vector<double> radial_derivative(const Grid& grid, std::span<const double> u);

/// e = 1/2 (u_t^2 + |grad u|^2 + V u^2)
std::vector<double> pointwise_energy(const Grid& grid, const NodalPotential& pot, std::span<const double> u,
                                     std::span<const double> ut);

double total_energy(const Grid& grid, const NodalPotential& pot, const Snapshot& s);

/// Throws std::invalid_argument unless rho_0 < R <= L.
double local_energy(const Grid& grid, const NodalPotential& pot, const Snapshot& s, double R);

struct Constants {
    double E0{0.0};
    double J0{0.0};
    double K0{0.0};
    double I0{0.0};
    double norm_u0{0.0};     ///< ||u0||
    double norm_dn_u1{0.0};  ///< ||d_n u1||

    bool k0_positive() const { return K0 > 0.0; }
};

/// J0 = (n-1)/2 (u1,u0) + (u1, x.grad u0)
/// I0 = int (1+|x|)(u1^2 + |grad u0|^2 + V u0^2)
/// K0 = (u1,u0) + (u1, x.grad u0) + sqrt(E0)(||u0|| + ||d_n u1||) + I0
Constants compute_constants(const InitialData& data, const Grid& grid, const NodalPotential& pot,
                            const WeightParams& params);

/// t E + (n-1)/2 (u_t,u) + (u_t, x.grad u), the left side of the Morawetz inequality.
double morawetz_lhs_noV(const Grid& grid, const NodalPotential& pot, const Snapshot& s);

/// morawetz_lhs_noV - vterm_accum.
double morawetz_lhs(const Grid& grid, const NodalPotential& pot, const Snapshot& s);

/// lhs - J0 - flux_accum. Throws std::logic_error on cartesian2d grids, where the
/// boundary flux is not tracked.
double morawetz_residual(const Grid& grid, double lhs, double flux_accum, const Constants& c);

/// W(t) = int psi(t,x) (u_t^2 + |grad u|^2 + V u^2) dx (unhalved integrand).
double weighted_energy(const Grid& grid, const NodalPotential& pot, const Snapshot& s);

/// int over R < |x| <= (1+eps) t of e; zero when (1+eps) t <= R.
/// Throws std::invalid_argument when (1+eps) t > L.
double annulus_energy(const Grid& grid, std::span<const double> e, double R, double eps, double t);

/// int over |x| > R of e.
double exterior_energy(const Grid& grid, std::span<const double> e, double R);

struct DiagnosticsRecord {
    double t{0.0};
    double E{0.0};
    std::vector<double> E_R;
    std::vector<double> L2_R;
    double L2_total{0.0};
    double W{0.0};
    double M_lhs{0.0};
    double flux_accum{0.0};
    double Vterm_accum{0.0};
    std::vector<double> X;
    double A{0.0};   ///< annulus R_1 < |x| <= (1+eps) t
    double F{0.0};   ///< far field |x| > max(R_1, (1+eps) t)
    double vid_lhs{0.0};  ///< ||v_t||^2 + ||grad v||^2 + ||sqrt(V) v||^2
    double vid_rhs{0.0};  ///< ||u0||^2 + 2 (u1, v)
    double hardy{0.0};    ///< int (v/d)^2 / int |grad v|^2 (0 while v = 0)

    double lhs_noV() const { return M_lhs + Vterm_accum; }
};

/// Throws std::runtime_error when a record breaks E = E_R + X (1e-12 relative)
/// or has a negative energy entry.
void validate_record(const DiagnosticsRecord& rec);

/// Evaluates records for one simulation. Holds the sampled data and the node
/// weights that do not change in time.
class Diagnostics {
public:
    Diagnostics(const Grid& grid, const NodalPotential& pot, const InitialData& data, WeightParams params,
                std::vector<double> radii, double epsilon);

    const Constants& constants() const { return constants_; }
    const std::vector<double>& radii() const { return radii_; }
    double epsilon() const { return epsilon_; }
    const WeightParams& weights() const { return params_; }

    DiagnosticsRecord record(const Snapshot& s) const;

private:
    const Grid& grid_;
    const NodalPotential& pot_;
    WeightParams params_;
    std::vector<double> radii_;
    double epsilon_;
    std::vector<double> u1_;
    std::vector<double> inv_hardy_sq_;
    Constants constants_;
};

}  // namespace decaylab
