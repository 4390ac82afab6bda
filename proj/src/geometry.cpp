#include "decaylab/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace decaylab {

namespace {

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
Vec2 sub(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }

double segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 d = sub(b, a);
    const double len2 = dot(d, d);
    double s = len2 > 0.0 ? dot(sub(p, a), d) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return norm(sub(p, {a.x + s * d.x, a.y + s * d.y}));
}

int orientation(Vec2 a, Vec2 b, Vec2 c)
{
    const double v = cross(sub(b, a), sub(c, a));
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p)
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2)
{
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

// Crossing-number test; boundary handling is left to the caller.
bool inside_polygon(const std::vector<Vec2>& v, Vec2 p)
{
    bool in = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            const double xc = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
            if (p.x < xc) in = !in;
        }
    }
    return in;
}

}  // namespace

ObstacleSpec ObstacleSpec::ball(double radius)
{
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("ball obstacle: radius must be positive and finite");
    }
    return ObstacleSpec(Ball{radius});
}

ObstacleSpec ObstacleSpec::polygon(std::vector<Vec2> v)
{
    const std::size_t n = v.size();
    if (n < 3) throw std::invalid_argument("polygon obstacle: need at least 3 vertices");
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) area2 += cross(v[i], v[(i + 1) % n]);
    if (!(area2 > 0.0)) {
        throw std::invalid_argument("polygon obstacle: vertices must be counterclockwise");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
                throw std::invalid_argument("polygon obstacle: edges intersect (not simple)");
            }
        }
    }
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) dist = std::min(dist, segment_distance({}, v[i], v[(i + 1) % n]));
    if (!inside_polygon(v, {}) || !(dist > 0.0)) {
        throw std::invalid_argument("polygon obstacle: origin must lie strictly inside");
    }
    return ObstacleSpec(Polygon{std::move(v)});
}

double ObstacleSpec::ball_radius() const
{
    if (!is_ball()) throw std::logic_error("obstacle is not a ball");
    return std::get<Ball>(shape_).radius;
}

const std::vector<Vec2>& ObstacleSpec::vertices() const
{
    if (is_ball()) throw std::logic_error("obstacle is not a polygon");
    return std::get<Polygon>(shape_).vertices;
}

double ObstacleSpec::circumradius() const
{
    if (is_ball()) return ball_radius();
    double r = 0.0;
    for (const Vec2& p : vertices()) r = std::max(r, norm(p));
    return r;
}

double ObstacleSpec::inradius() const
{
    if (is_ball()) return ball_radius();
    const auto& v = vertices();
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) r = std::min(r, segment_distance({}, v[i], v[(i + 1) % v.size()]));
    return r;
}

bool ObstacleSpec::contains(Vec2 p, double tol) const
{
    if (is_ball()) return norm(p) <= ball_radius() + tol;
    if (norm(p) > circumradius() + tol) return false;
    const auto& v = vertices();
    if (inside_polygon(v, p)) return true;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (segment_distance(p, v[i], v[(i + 1) % v.size()]) <= tol) return true;
    }
    return false;
}

std::string ObstacleSpec::describe() const
{
    std::ostringstream os;
    if (is_ball()) {
        os << "ball(" << ball_radius() << ")";
    } else {
        os << "polygon(";
        const auto& v = vertices();
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "; " : "") << v[i].x << ' ' << v[i].y;
        os << ")";
    }
    return os.str();
}

std::string to_string(GridMode mode)
{
    return mode == GridMode::radial3d ? "radial3d" : "cartesian2d";
}

GridMode grid_mode_from_string(const std::string& name)
{
    if (name == "radial3d") return GridMode::radial3d;
    if (name == "cartesian2d") return GridMode::cartesian2d;
    throw std::invalid_argument("unknown grid mode '" + name + "' (expected radial3d or cartesian2d)");
}

Vec2 Grid::position(std::size_t i) const
{
    if (mode_ == GridMode::radial3d) return {radius_[i], 0.0};
    const auto m = static_cast<double>((nx_ - 1) / 2);
    return {(static_cast<double>(i % nx_) - m) * h_, (static_cast<double>(i / nx_) - m) * h_};
}

std::vector<BoundarySample> sample_boundary(const ObstacleSpec& obstacle, double spacing)
{
    if (!(spacing > 0.0)) throw std::invalid_argument("sample_boundary: spacing must be positive");
    std::vector<BoundarySample> out;
    if (obstacle.is_ball()) {
        const double rho = obstacle.ball_radius();
        const auto m = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * rho / spacing)));
        out.reserve(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
            const Vec2 dir{std::cos(th), std::sin(th)};
            out.push_back({{rho * dir.x, rho * dir.y}, {-dir.x, -dir.y}});
        }
        return out;
    }
    const auto& v = obstacle.vertices();
    for (std::size_t e = 0; e < v.size(); ++e) {
        const Vec2 a = v[e];
        const Vec2 b = v[(e + 1) % v.size()];
        const Vec2 d = sub(b, a);
        const double len = norm(d);
        const Vec2 nu{-d.y / len, d.x / len};
        // even subdivision count so the midpoint is always a sample
        auto k = static_cast<std::size_t>(std::ceil(len / spacing));
        k = std::max<std::size_t>(2, k + (k % 2));
        for (std::size_t s = 0; s <= k; ++s) {
            const double f = static_cast<double>(s) / static_cast<double>(k);
            out.push_back({{a.x + f * d.x, a.y + f * d.y}, nu});
        }
    }
    return out;
}

StarShapeReport check_star_shaped(const ObstacleSpec& obstacle, double spacing)
{
    const auto samples = sample_boundary(obstacle, spacing);
    StarShapeReport rep;
    rep.worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        const double v = dot(s.point, s.normal);
        if (v > rep.worst) {
            rep.worst = v;
            rep.where = s;
        }
    }
    rep.pass = rep.worst <= 1e-12;
    return rep;
}

Grid build_grid(const ObstacleSpec& obstacle, double L, double h, GridMode mode)
{
    const double rho = obstacle.circumradius();
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("build_grid: spacing h must be positive");
    if (!(L > 2.0 * rho)) throw std::invalid_argument("build_grid: outer radius L must exceed twice the obstacle circumradius");
    if (!(h < (L - rho) / 100.0)) throw std::invalid_argument("build_grid: spacing h must be below (L - rho_0)/100");

    if (mode == GridMode::radial3d) {
        if (!obstacle.is_ball()) throw std::invalid_argument("build_grid: radial3d mode requires a ball obstacle");
        const auto n = static_cast<std::size_t>(std::ceil((L - rho) / h - 1e-9));
        Grid g(obstacle, mode, rho + static_cast<double>(n) * h, h);
        g.nx_ = n + 1;
        g.radius_.resize(n + 1);
        g.weight_.resize(n + 1);
        g.class_.assign(n + 1, NodeClass::interior);
        for (std::size_t i = 0; i <= n; ++i) {
            const double r = rho + static_cast<double>(i) * h;
            g.radius_[i] = r;
            g.weight_[i] = 4.0 * std::numbers::pi * r * r * h * ((i == 0 || i == n) ? 0.5 : 1.0);
        }
        g.class_[0] = NodeClass::obstacle;
        g.class_[1] = NodeClass::boundary_adjacent;
        g.class_[n] = NodeClass::outer;
        g.min_active_radius_ = g.radius_[1];
        g.boundary_ = sample_boundary(obstacle, h);
        g.index_active();
        return g;
    }

    Grid g(obstacle, mode, L, h);
    const auto m = static_cast<std::size_t>(std::ceil(L / h)) + 2;
    const std::size_t nx = 2 * m + 1;
    g.nx_ = nx;
    g.radius_.resize(nx * nx);
    g.weight_.assign(nx * nx, 0.0);
    g.class_.resize(nx * nx);
    for (std::size_t j = 0; j < nx; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = j * nx + i;
            const Vec2 p{(static_cast<double>(i) - static_cast<double>(m)) * h,
                         (static_cast<double>(j) - static_cast<double>(m)) * h};
            const double r = norm(p);
            g.radius_[k] = r;
            if (obstacle.contains(p, 1e-12 * std::max(1.0, rho))) {
                g.class_[k] = NodeClass::obstacle;
            } else if (r > L) {
                g.class_[k] = NodeClass::outer;
            } else {
                g.class_[k] = NodeClass::interior;
            }
        }
    }
    double rmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j + 1 < nx; ++j) {
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const std::size_t k = j * nx + i;
            if (g.class_[k] != NodeClass::interior) continue;
            g.weight_[k] = h * h;
            rmin = std::min(rmin, g.radius_[k]);
            const std::array<std::size_t, 4> nb{k - 1, k + 1, k - nx, k + nx};
            for (std::size_t q : nb) {
                if (g.class_[q] == NodeClass::obstacle) {
                    g.class_[k] = NodeClass::boundary_adjacent;
                    break;
                }
            }
        }
    }
    g.min_active_radius_ = rmin;
    g.boundary_ = sample_boundary(obstacle, h);
    g.index_active();
    return g;
}

void Grid::index_active()
{
    mask_.assign(size(), 0.0);
    for (std::size_t k = 0; k < size(); ++k) mask_[k] = active(k) ? 1.0 : 0.0;
    ranges_.clear();
    const std::size_t row = mode_ == GridMode::radial3d ? size() : nx_;
    for (std::size_t start = 0; start < size(); start += row) {
        std::size_t b = start + row, e = start;
        for (std::size_t k = start; k < start + row; ++k) {
            if (mask_[k] != 0.0) {
                b = std::min(b, k);
                e = k + 1;
            }
        }
        if (b < e) ranges_.emplace_back(b, e);
    }
}

double integrate(std::span<const double> field, const Grid& grid, const Region& region)
{
    if (field.size() != grid.size()) throw std::invalid_argument("integrate: field size does not match grid");
    const double L = grid.outer_radius();
    const double slack = 1e-12 * L;
    const bool too_far = (region.kind == Region::Kind::ball && region.outer > L + slack) ||
                         (region.kind == Region::Kind::exterior && region.inner > L + slack) ||
                         (region.kind == Region::Kind::annulus && region.outer > L + slack && region.outer > region.inner);
    if (too_far) throw std::invalid_argument("integrate: region radius exceeds the truncation radius L");

    const auto w = grid.weights();
    const auto r = grid.radii();
    // radial shells: a node sitting on a region radius contributes half its cell to each side
    const bool radial = grid.mode() == GridMode::radial3d;
    const double tie = 1e-6 * grid.spacing();
    const auto on_edge = [&](double x) {
        if (!radial) return false;
        switch (region.kind) {
        case Region::Kind::all: return false;
        case Region::Kind::ball: return std::abs(x - region.outer) <= tie;
        case Region::Kind::exterior: return std::abs(x - region.inner) <= tie;
        case Region::Kind::annulus:
            return region.outer > region.inner &&
                   (std::abs(x - region.inner) <= tie || std::abs(x - region.outer) <= tie);
        }
        return false;
    };
    double sum = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (w[i] == 0.0) continue;
        if (on_edge(r[i])) {
            sum += 0.5 * w[i] * field[i];
        } else if (region.contains(r[i])) {
            sum += w[i] * field[i];
        }
    }
    return sum;
}

double inner(std::span<const double> a, std::span<const double> b, const Grid& grid)
{
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += w[i] * a[i] * b[i];
    return sum;
}

nlohmann::json grid_summary(const Grid& grid)
{
    std::array<std::size_t, 4> hist{};
    for (NodeClass c : grid.classes()) ++hist[static_cast<std::size_t>(c)];
    const auto star = check_star_shaped(grid.obstacle(), grid.spacing());
    double volume = 0.0;
    for (double w : grid.weights()) volume += w;
    return {
        {"mode", to_string(grid.mode())},
        {"obstacle", grid.obstacle().describe()},
        {"h", grid.spacing()},
        {"L", grid.outer_radius()},
        {"nodes", grid.size()},
        {"mask",
         {{"interior", hist[0]}, {"boundary_adjacent", hist[1]}, {"obstacle", hist[2]}, {"outer", hist[3]}}},
        {"quadrature_total", volume},
        {"boundary_samples", grid.boundary().size()},
        {"min_active_radius", grid.min_active_radius()},
        {"star_shape",
         {{"pass", star.pass},
          {"worst", star.worst},
          {"point", {star.where.point.x, star.where.point.y}},
          {"normal", {star.where.normal.x, star.where.normal.y}}}},
    };
}

}  // namespace decaylab
