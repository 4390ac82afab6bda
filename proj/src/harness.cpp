#include "decaylab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace decaylab {

namespace pt = boost::property_tree;

WeightParams ExperimentConfig::weights() const
{
    return WeightParams(dimension(), obstacle.inradius(), B);
}

RunMeta ExperimentConfig::meta() const
{
    RunMeta m;
    m.name = name;
    m.mode = mode;
    m.n = dimension();
    m.h = h;
    m.dt = dt;
    m.T = T;
    m.L = L;
    m.epsilon = epsilon;
    m.B = B;
    m.radii = radii;
    m.potential = potential;
    m.config_hash = hash;
    return m;
}

double minimal_outer_radius(double T, double r_supp, double max_R)
{
    return 0.5 * (T + r_supp + max_R) + 2.0;
}

double default_outer_radius(double T, double r_supp, double max_R, double epsilon, double circumradius)
{
    const double causal = std::max(minimal_outer_radius(T, r_supp, max_R), T + r_supp + 2.0);
    return std::max({causal, (1.0 + epsilon) * T, 2.0 * circumradius + 1.0});
}

namespace {

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s{
        {"", {"schema", "name"}},
        {"domain", {"mode", "obstacle", "radius", "vertices", "outer_radius", "B"}},
        {"potential", {"kind", "amplitude", "exponent"}},
        {"u0", {"center", "width", "amplitude", "angle_deg"}},
        {"u1", {"center", "width", "amplitude", "angle_deg"}},
        {"data", {"support_radius", "jitter", "seed"}},
        {"run", {"h", "dt", "cfl", "T", "sample_every", "R", "epsilon", "override_admissibility"}},
        {"output", {"dir", "csv", "constants", "certificate"}},
    };
    return s;
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double to_number(const std::string& field, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (trim(text.substr(used)).empty() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(field + ": expected a number, got '" + text + "'");
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> text(const std::string& key) const
    {
        const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
        if (!v) return std::nullopt;
        return trim(*v);
    }
    std::string required(const std::string& key) const
    {
        auto v = text(key);
        if (!v || v->empty()) throw ConfigError(key + ": required field missing");
        return *v;
    }
    double number(const std::string& key) const { return to_number(key, required(key)); }
    std::optional<double> optional_number(const std::string& key) const
    {
        auto v = text(key);
        if (!v) return std::nullopt;
        return to_number(key, *v);
    }
    double number_or(const std::string& key, double fallback) const { return optional_number(key).value_or(fallback); }
    bool flag(const std::string& key, bool fallback) const
    {
        auto v = text(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError(key + ": expected true or false, got '" + *v + "'");
    }
    bool has_section(const std::string& s) const { return tree_.get_child_optional(s).has_value(); }

private:
    const pt::ptree& tree_;
};

std::vector<double> number_list(const std::string& field, const std::string& text)
{
    std::vector<double> out;
    std::string cell;
    std::istringstream is(text);
    while (std::getline(is, cell, ',')) out.push_back(to_number(field, trim(cell)));
    if (out.empty()) throw ConfigError(field + ": expected a comma-separated list");
    return out;
}

std::vector<Vec2> vertex_list(const std::string& text)
{
    std::vector<Vec2> out;
    std::string cell;
    std::istringstream is(text);
    while (std::getline(is, cell, ';')) {
        std::istringstream ps(cell);
        Vec2 p;
        if (!(ps >> p.x >> p.y)) throw ConfigError("domain.vertices: expected 'x y; x y; ...'");
        out.push_back(p);
    }
    return out;
}

std::vector<Bump> read_bump(const Reader& r, const std::string& section)
{
    if (!r.has_section(section)) return {};
    Bump b;
    b.center = r.number(section + ".center");
    b.width = r.number(section + ".width");
    b.amplitude = r.number(section + ".amplitude");
    if (auto a = r.optional_number(section + ".angle_deg")) b.angle = *a * std::numbers::pi / 180.0;
    if (!(b.width > 0.0)) throw ConfigError(section + ".width: must be positive");
    return {b};
}

void check_schema(const pt::ptree& tree)
{
    const auto& s = schema();
    for (const auto& [key, child] : tree) {
        if (child.empty()) {
            if (!s.at("").contains(key)) throw ConfigError("unknown top-level key '" + key + "'");
            continue;
        }
        const auto it = s.find(key);
        if (it == s.end()) throw ConfigError("unknown section [" + key + "]");
        for (const auto& [sub, _] : child) {
            if (!it->second.contains(sub)) throw ConfigError(key + "." + sub + ": unknown key");
        }
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                                   bool enforce_admissibility)
{
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    check_schema(tree);
    const Reader r(tree);

    ExperimentConfig cfg;
    cfg.hash = fnv1a(text);
    const auto version = r.text("schema");
    if (!version || *version != "1") throw ConfigError("schema: expected 'schema = 1'");
    cfg.name = r.text("name").value_or("experiment");

    try {
        cfg.mode = grid_mode_from_string(r.required("domain.mode"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("domain.mode: ") + e.what());
    }
    const std::string obstacle = r.text("domain.obstacle").value_or("ball");
    try {
        if (obstacle == "ball") {
            cfg.obstacle = ObstacleSpec::ball(r.number("domain.radius"));
        } else if (obstacle == "polygon") {
            if (cfg.mode == GridMode::radial3d) throw ConfigError("domain.obstacle: polygons need mode = cartesian2d");
            cfg.obstacle = ObstacleSpec::polygon(vertex_list(r.required("domain.vertices")));
        } else {
            throw ConfigError("domain.obstacle: expected ball or polygon, got '" + obstacle + "'");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("domain: ") + e.what());
    }

    try {
        const auto kind = potential_kind_from_string(r.text("potential.kind").value_or("zero"));
        switch (kind) {
        case PotentialKind::power:
            cfg.potential = PotentialSpec::power(r.number("potential.amplitude"), r.number("potential.exponent"));
            break;
        case PotentialKind::exponential:
            cfg.potential = PotentialSpec::exponential(r.number("potential.amplitude"));
            break;
        case PotentialKind::constant:
            cfg.potential = PotentialSpec::constant(r.number("potential.amplitude"));
            break;
        case PotentialKind::zero: cfg.potential = PotentialSpec::zero(); break;
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("potential: ") + e.what());
    }

    cfg.data.u0 = read_bump(r, "u0");
    cfg.data.u1 = read_bump(r, "u1");
    cfg.jitter = r.number_or("data.jitter", 0.0);
    cfg.seed = static_cast<std::uint64_t>(r.number_or("data.seed", 0.0));
    if (cfg.jitter < 0.0 || cfg.jitter >= 1.0) throw ConfigError("data.jitter: must lie in [0, 1)");
    if (cfg.jitter > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> dist(-cfg.jitter, cfg.jitter);
        for (auto* set : {&cfg.data.u0, &cfg.data.u1}) {
            for (Bump& b : *set) b.amplitude *= 1.0 + dist(rng);
        }
    }
    cfg.data.support_radius = r.number_or("data.support_radius", cfg.data.outer_support_radius());
    if (cfg.data.support_radius < cfg.data.outer_support_radius()) {
        throw ConfigError("data.support_radius: smaller than the bump supports");
    }

    cfg.h = r.number("run.h");
    if (!(cfg.h > 0.0)) throw ConfigError("run.h: must be positive");
    cfg.T = r.number("run.T");
    if (!(cfg.T >= 0.0)) throw ConfigError("run.T: must be >= 0");
    cfg.radii = number_list("run.R", r.required("run.R"));
    cfg.epsilon = r.number_or("run.epsilon", 0.1);
    if (!(cfg.epsilon > 0.0)) throw ConfigError("run.epsilon: must be positive");
    const double se = r.number_or("run.sample_every", 1.0);
    if (!(se >= 1.0) || se != std::floor(se)) throw ConfigError("run.sample_every: must be a positive integer");
    cfg.sample_every = static_cast<std::size_t>(se);
    cfg.override_admissibility = r.flag("run.override_admissibility", false);

    const double rho = cfg.obstacle.circumradius();
    for (double R : cfg.radii) {
        if (!(R > rho)) throw ConfigError("run.R: every radius must exceed the obstacle circumradius");
    }
    const double max_R = *std::max_element(cfg.radii.begin(), cfg.radii.end());
    const double r_supp = std::max(cfg.data.support_radius, rho);
    const double L_min = minimal_outer_radius(cfg.T, r_supp, max_R);
    if (auto L = r.optional_number("domain.outer_radius")) {
        if (*L < L_min) {
            throw ConfigError("domain.outer_radius: below the causality bound (T + r_supp + max R)/2 + 2 = " +
                              std::to_string(L_min));
        }
        if (*L < (1.0 + cfg.epsilon) * cfg.T) throw ConfigError("domain.outer_radius: below (1 + epsilon) T");
        cfg.L = *L;
    } else {
        cfg.L = default_outer_radius(cfg.T, r_supp, max_R, cfg.epsilon, rho);
    }
    if (cfg.mode == GridMode::radial3d) {
        // radial nodes sit at rho_0 + i h; report the L the grid will actually use
        cfg.L = rho + std::ceil((cfg.L - rho) / cfg.h - 1e-9) * cfg.h;
    }
    if (!(cfg.h < (cfg.L - rho) / 100.0)) throw ConfigError("run.h: must be below (L - rho_0)/100");

    const double dt_max = (cfg.mode == GridMode::radial3d ? 0.9 : 0.6) * cfg.h;
    cfg.cfl = r.number_or("run.cfl", dt_max / cfg.h);
    if (!(cfg.cfl > 0.0) || cfg.cfl * cfg.h > dt_max * (1.0 + 1e-12)) {
        throw ConfigError("run.cfl: must lie in (0, " + std::to_string(dt_max / cfg.h) + "]");
    }
    if (auto dt = r.optional_number("run.dt")) {
        if (!(*dt > 0.0) || *dt > dt_max * (1.0 + 1e-12)) throw ConfigError("run.dt: violates the CFL bound");
        const double n = std::round(cfg.T / *dt);
        if (std::abs(n * *dt - cfg.T) > 1e-9 * std::max(1.0, cfg.T)) {
            throw ConfigError("run.dt: T must be an integer multiple of dt");
        }
        cfg.dt = *dt;
        cfg.steps = static_cast<std::size_t>(n);
    } else if (cfg.T == 0.0) {
        cfg.dt = cfg.cfl * cfg.h;
        cfg.steps = 0;
    } else {
        cfg.steps = static_cast<std::size_t>(std::ceil(cfg.T / (cfg.cfl * cfg.h) - 1e-9));
        cfg.dt = cfg.T / static_cast<double>(cfg.steps);
    }

    try {
        const auto B = r.optional_number("domain.B");
        cfg.B = WeightParams(cfg.dimension(), cfg.obstacle.inradius(), B).B();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("domain.B: ") + e.what());
    }

    const auto [worst, at] = radial_admissibility_max(cfg.potential, cfg.obstacle.inradius(), cfg.L);
    if (enforce_admissibility && worst > 1e-12 && !cfg.override_admissibility) {
        std::ostringstream os;
        os << "potential: " << cfg.potential.describe()
           << " violates the admissibility condition (x.gradV)/2 + V <= 0 (worst " << worst << " at |x| = " << at
           << "); set run.override_admissibility = true to simulate anyway";
        throw ConfigError(os.str());
    }

    cfg.output_dir = base_dir / r.text("output.dir").value_or(".");
    cfg.csv_file = r.text("output.csv").value_or(cfg.name + ".csv");
    cfg.constants_file = r.text("output.constants").value_or(cfg.name + ".constants.json");
    cfg.certificate_file = r.text("output.certificate").value_or(cfg.name + ".certificate.json");
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path, bool enforce_admissibility)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), ".", enforce_admissibility);
}

ExperimentConfig with_radii(ExperimentConfig cfg, std::vector<double> radii)
{
    if (radii.empty()) throw ConfigError("R: at least one radius is required");
    const double rho = cfg.obstacle.circumradius();
    for (double R : radii) {
        if (!(R > rho)) throw ConfigError("R: every radius must exceed the obstacle circumradius");
    }
    const double max_R = *std::max_element(radii.begin(), radii.end());
    const double r_supp = std::max(cfg.data.support_radius, rho);
    if (cfg.L < minimal_outer_radius(cfg.T, r_supp, max_R)) {
        throw ConfigError("R: largest radius pushes the causality bound past L = " + std::to_string(cfg.L));
    }
    cfg.radii = std::move(radii);
    return cfg;
}

std::filesystem::path output_directory(const ExperimentConfig& cfg)
{
    if (const char* env = std::getenv("DECAYLAB_OUTPUT_DIR"); env && *env) return env;
    return cfg.output_dir;
}

nlohmann::json config_echo(const ExperimentConfig& cfg)
{
    nlohmann::json bumps = nlohmann::json::array();
    for (const auto& [label, set] : {std::pair{"u0", &cfg.data.u0}, std::pair{"u1", &cfg.data.u1}}) {
        for (const Bump& b : *set) {
            nlohmann::json jb{{"field", label}, {"center", b.center}, {"width", b.width}, {"amplitude", b.amplitude}};
            if (b.angle) jb["angle_rad"] = *b.angle;
            bumps.push_back(jb);
        }
    }
    return {
        {"name", cfg.name},
        {"config_hash", hex_hash(cfg.hash)},
        {"mode", to_string(cfg.mode)},
        {"obstacle", cfg.obstacle.describe()},
        {"potential", cfg.potential.describe()},
        {"bumps", bumps},
        {"support_radius", cfg.data.support_radius},
        {"R", cfg.radii},
        {"epsilon", cfg.epsilon},
        {"h", cfg.h},
        {"dt", cfg.dt},
        {"steps", cfg.steps},
        {"T", cfg.T},
        {"sample_every", cfg.sample_every},
        {"L", cfg.L},
        {"L_min_causal", minimal_outer_radius(cfg.T, std::max(cfg.data.support_radius, cfg.obstacle.circumradius()),
                                              *std::max_element(cfg.radii.begin(), cfg.radii.end()))},
        {"B", cfg.B},
        {"override_admissibility", cfg.override_admissibility},
    };
}

TimeSeries run(const ExperimentConfig& cfg, std::ostream* csv)
{
    const Grid grid = build_grid(cfg.obstacle, cfg.L, cfg.h, cfg.mode);
    const AdmissibilityReport adm = check_A2(cfg.potential, grid);
    if (!adm.pass && !cfg.override_admissibility) {
        throw std::runtime_error("run: potential fails the admissibility audit on the grid (worst " +
                                 std::to_string(adm.worst) + ")");
    }
    const NodalPotential pot = sample_potential(cfg.potential, grid);
    const Diagnostics diag(grid, pot, cfg.data, cfg.weights(), cfg.radii, cfg.epsilon);

    TimeSeries series;
    series.meta = cfg.meta();
    series.meta.L = grid.outer_radius();
    series.constants = diag.constants();

    std::optional<CsvWriter> writer;
    if (csv) writer.emplace(*csv, series.meta);

    WaveState state = init_state(grid, cfg.data, cfg.dt, pot);
    for (std::size_t n = 0;; ++n) {
        if (n % cfg.sample_every == 0 || n == cfg.steps) {
            DiagnosticsRecord rec = diag.record(snapshot(state, grid, pot, cfg.dt));
            validate_record(rec);
            if (writer) writer->write(rec);
            series.records.push_back(std::move(rec));
        }
        if (n == cfg.steps) break;
        step(state, grid, pot, cfg.dt);
        state.t = static_cast<double>(n + 1) * cfg.dt;
    }
    return series;
}

}  // namespace decaylab
