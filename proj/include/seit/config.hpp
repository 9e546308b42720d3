#ifndef SEIT_CONFIG_HPP
#define SEIT_CONFIG_HPP

#include <cstdint>
#include <string>

#include "seit/factorization.hpp"
#include "seit/monotonicity.hpp"
#include "seit/random_field.hpp"

namespace seit {

enum class Method { fm, mm, both };
enum class TauPolicy { automatic, max, fixed };
enum class BetaPolicy { preset, fixed };
enum class EpsilonPolicy { preset, fixed };

struct MethodConfig {
    Method kind = Method::fm;
    TauPolicy tau_policy = TauPolicy::automatic;
    int tau = 0;  // used when tau_policy == fixed
    BallLattice lattice;
    BetaPolicy beta_policy = BetaPolicy::preset;
    double beta = 0.0;
    EpsilonPolicy epsilon_policy = EpsilonPolicy::preset;
    double epsilon = 0.0;
};

// Full experiment description; see docs/config.md for the file grammar.
struct ExperimentConfig {
    std::string name = "custom";
    int refinement_level = 3;
    int disk_sides = 64;
    PixelAnomaly anomaly;
    int T = 50;
    int chaos_degree = 3;
    double noise_level = 0.0;
    MethodConfig method;
    GridSpec grid;
    int validation_samples = 0;  // optional Monte Carlo cross-check in simulate
    std::uint64_t master_seed = 1;
    std::string out_dir = "out";
    int threads = 0;

    SeedPlan seeds() const { return SeedPlan{master_seed}; }
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

// Checks every module precondition before any computation runs.
void validate_config(const ExperimentConfig& config);

// FNV-1a of the canonical serialization (output directory and thread count
// do not participate).
std::uint64_t config_hash(const ExperimentConfig& config);

// Built-in experiment presets test1..test4. The pixel geometries approximate
// the published test layouts; coordinates are artifact conventions and are
// spelled out in the emitted config.
ExperimentConfig preset(const std::string& name);

}  // namespace seit

#endif
