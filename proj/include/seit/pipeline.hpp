#ifndef SEIT_PIPELINE_HPP
#define SEIT_PIPELINE_HPP

#include <string>
#include <vector>

#include "seit/config.hpp"
#include "seit/ntd.hpp"

namespace seit {

struct RunArtifacts {
    std::string dir;
    std::vector<std::string> files;  // paths relative to dir
    std::uint64_t hash = 0;          // config hash recorded in the manifest
};

// Mesh + clean SFEM matrix (+ Monte Carlo cross-check and noisy matrix when
// the config requests them). All writes are atomic (temp file + rename).
RunArtifacts run_simulate(const ExperimentConfig& config);

// Applies the configured noise model to an existing matrix file.
RunArtifacts run_noise(const ExperimentConfig& config, const std::string& matrix_file);

// Factorization indicator and/or monotonicity mask from a matrix file.
RunArtifacts run_reconstruct(const ExperimentConfig& config,
                             const std::string& matrix_file);

struct ValidationCheck {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Invariant suites: matrix-file checks when a file is given, otherwise the
// full simulation checks (Lambda(1) spectrum, Jensen, sandwich, SFEM vs
// Monte Carlo, noise-norm exactness, dipole oracle). Failures are report
// entries, not errors.
ValidationReport run_validate(const ExperimentConfig& config,
                              const std::string& matrix_file = "");

void write_report(const std::string& path, const ValidationReport& report);

}  // namespace seit

#endif
