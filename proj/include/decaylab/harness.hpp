#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/geometry.hpp"
#include "decaylab/potential.hpp"
#include "decaylab/series.hpp"
#include "decaylab/solver.hpp"

namespace decaylab {

/// Fully resolved experiment description. Produced by parse_config; every derived
/// quantity (L, dt, step count, B) is filled in.
struct ExperimentConfig {
    std::string name;
    GridMode mode{GridMode::radial3d};
    ObstacleSpec obstacle = ObstacleSpec::ball(1.0);
    PotentialSpec potential;
    InitialData data;
    std::vector<double> radii;
    double epsilon{0.1};
    double h{0.01};
    double cfl{0.0};
    double dt{0.0};
    std::size_t steps{0};
    double T{0.0};
    std::size_t sample_every{1};
    double L{0.0};
    double B{0.0};
    std::uint64_t seed{0};
    double jitter{0.0};
    bool override_admissibility{false};
    std::filesystem::path output_dir{"."};
    std::string csv_file{"series.csv"};
    std::string constants_file{"constants.json"};
    std::string certificate_file{"certificate.json"};
    std::uint64_t hash{0};

    int dimension() const { return mode == GridMode::radial3d ? 3 : 2; }
    WeightParams weights() const;
    RunMeta meta() const;
};

/// Raised for schema violations; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses the INI-style config (sections, `key = value`, `#`/`;` comment lines).
/// Throws ConfigError on schema violations and, when `enforce_admissibility` is set,
/// on a potential violating (x.gradV)/2 + V <= 0 without `override_admissibility = true`.
ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".",
                                   bool enforce_admissibility = true);
ExperimentConfig parse_config(const std::filesystem::path& path, bool enforce_admissibility = true);

/// Replaces the observation radii, re-checking rho_0 < R and the causality bound on L.
ExperimentConfig with_radii(ExperimentConfig cfg, std::vector<double> radii);

/// Smallest admissible truncation radius: (T + r_supp + max R)/2 + 2 keeps reflections
/// from the outer boundary out of B_R on [0, T].
double minimal_outer_radius(double T, double r_supp, double max_R);

/// Default truncation radius: the wave front never reaches L on [0, T]
/// (L >= T + r_supp + 2), and the annulus cap (1+eps) T fits inside.
double default_outer_radius(double T, double r_supp, double max_R, double epsilon, double circumradius);

/// Human-readable echo of the resolved configuration.
nlohmann::json config_echo(const ExperimentConfig& cfg);

/// Simulates from t = 0 to T, sampling every `sample_every` steps and at T.
/// Records stream to `csv` when given. Throws std::runtime_error when the grid
/// audit of the admissibility condition fails without override or the solver goes unstable.
TimeSeries run(const ExperimentConfig& cfg, std::ostream* csv = nullptr);

/// Output directory with the DECAYLAB_OUTPUT_DIR environment override applied.
std::filesystem::path output_directory(const ExperimentConfig& cfg);

}  // namespace decaylab
