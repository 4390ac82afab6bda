#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace decaylab {

struct Vec2 {
    double x{};
    double y{};
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Compact obstacle O = R^n \ closure(Omega). The origin must lie strictly inside.
///
/// Balls are used in both grid modes; polygons (counterclockwise, simple) only
/// in the planar Cartesian mode.
class ObstacleSpec {
public:
    static ObstacleSpec ball(double radius);
    static ObstacleSpec polygon(std::vector<Vec2> ccw_vertices);

    bool is_ball() const { return std::holds_alternative<Ball>(shape_); }
    double ball_radius() const;
    const std::vector<Vec2>& vertices() const;

    /// rho_0: smallest radius with the boundary inside the closed ball B_{rho_0}.
    double circumradius() const;
    /// inf{|x| : x in Omega}, the distance from the origin to the boundary.
    double inradius() const;
    /// True for points of the closed obstacle (boundary included, up to `tol`).
    bool contains(Vec2 p, double tol = 1e-12) const;

    std::string describe() const;

private:
    struct Ball {
        double radius;
    };
    struct Polygon {
        std::vector<Vec2> vertices;
    };
    explicit ObstacleSpec(std::variant<Ball, Polygon> s) : shape_(std::move(s)) {}

    std::variant<Ball, Polygon> shape_;
};

enum class GridMode { radial3d, cartesian2d };

std::string to_string(GridMode mode);
GridMode grid_mode_from_string(const std::string& name);

enum class NodeClass : std::uint8_t { interior, boundary_adjacent, obstacle, outer };

/// Point on the obstacle boundary with the unit exterior normal of Omega
/// (pointing into the obstacle).
struct BoundarySample {
    Vec2 point;
    Vec2 normal;
};

/// Discrete exterior domain.
///
/// radial3d: nodes r_i = rho_0 + i h, i = 0..N, on [rho_0, L]; both ends are
/// Dirichlet nodes. Weights 4 pi r_i^2 h with trapezoid halving at the ends.
///
/// cartesian2d: square lattice x = i h, y = j h covering [-L - 2h, L + 2h]^2,
/// node index j * nx + i. Nodes in the closed obstacle are `obstacle`, nodes
/// with |x| > L are `outer`; both are held at zero. Active nodes carry weight h^2.
///
/// Immutable after construction.
class Grid {
public:
    GridMode mode() const { return mode_; }
    int dimension() const { return mode_ == GridMode::radial3d ? 3 : 2; }
    double spacing() const { return h_; }
    double outer_radius() const { return L_; }
    const ObstacleSpec& obstacle() const { return obstacle_; }

    std::size_t size() const { return radius_.size(); }
    /// Lattice width (cartesian2d); node count for radial3d.
    std::size_t nx() const { return nx_; }

    double radius(std::size_t i) const { return radius_[i]; }
    Vec2 position(std::size_t i) const;
    double weight(std::size_t i) const { return weight_[i]; }
    NodeClass node_class(std::size_t i) const { return class_[i]; }
    bool active(std::size_t i) const
    {
        return class_[i] == NodeClass::interior || class_[i] == NodeClass::boundary_adjacent;
    }

    std::span<const double> radii() const { return radius_; }
    std::span<const double> weights() const { return weight_; }
    std::span<const NodeClass> classes() const { return class_; }
    /// 1 on active nodes, 0 elsewhere.
    std::span<const double> mask() const { return mask_; }
    /// Half-open index ranges [begin, end) that cover every active node, one per
    /// lattice row (a single range in radial mode). Empty rows are skipped.
    const std::vector<std::pair<std::size_t, std::size_t>>& active_ranges() const { return ranges_; }
    const std::vector<BoundarySample>& boundary() const { return boundary_; }

    /// inf |x| over the active nodes.
    double min_active_radius() const { return min_active_radius_; }

private:
    friend Grid build_grid(const ObstacleSpec&, double, double, GridMode);
    void index_active();
    Grid(ObstacleSpec obstacle, GridMode mode, double L, double h)
        : obstacle_(std::move(obstacle)), mode_(mode), L_(L), h_(h)
    {
    }

    ObstacleSpec obstacle_;
    GridMode mode_;
    double L_;
    double h_;
    std::size_t nx_{0};
    std::vector<double> radius_;
    std::vector<double> weight_;
    std::vector<NodeClass> class_;
    std::vector<double> mask_;
    std::vector<std::pair<std::size_t, std::size_t>> ranges_;
    std::vector<BoundarySample> boundary_;
    double min_active_radius_{0.0};
};

/// Throws std::invalid_argument for L <= 2 * circumradius, h <= 0, h >= (L - rho_0)/100,
/// or a polygon obstacle in radial mode.
Grid build_grid(const ObstacleSpec& obstacle, double L, double h, GridMode mode);

/// Boundary samples at spacing <= `spacing`: every vertex, every edge midpoint and
/// evenly spaced interior edge points. Normals are exterior to Omega.
std::vector<BoundarySample> sample_boundary(const ObstacleSpec& obstacle, double spacing);

struct StarShapeReport {
    bool pass{false};
    double worst{0.0};       ///< max over samples of x . nu(x)
    BoundarySample where{};  ///< attaining sample
};

StarShapeReport check_star_shaped(const ObstacleSpec& obstacle, double spacing = 0.05);

/// Radial region of integration. Membership is by |x|:
/// ball(R): |x| <= R, exterior(R): |x| > R, annulus(a, b): a < |x| <= b (empty when b <= a).
struct Region {
    enum class Kind { all, ball, exterior, annulus };
    Kind kind{Kind::all};
    double inner{0.0};
    double outer{0.0};

    static Region whole() { return {}; }
    static Region ball(double R) { return {Kind::ball, 0.0, R}; }
    static Region exterior(double R) { return {Kind::exterior, R, 0.0}; }
    static Region annulus(double a, double b) { return {Kind::annulus, a, b}; }

    bool contains(double r) const
    {
        switch (kind) {
        case Kind::all: return true;
        case Kind::ball: return r <= outer;
        case Kind::exterior: return r > inner;
        case Kind::annulus: return r > inner && r <= outer;
        }
        return false;
    }
};

/// Quadrature of a nodal field over the region. On radial grids a node lying on a
/// region radius counts half on each side, so ball(R) + exterior(R) = whole. Throws std::invalid_argument when a
/// region radius exceeds L or the field size does not match the grid.
double integrate(std::span<const double> field, const Grid& grid, const Region& region);

/// Weighted inner product sum_i w_i a_i b_i over the whole domain.
double inner(std::span<const double> a, std::span<const double> b, const Grid& grid);

nlohmann::json grid_summary(const Grid& grid);

}  // namespace decaylab
