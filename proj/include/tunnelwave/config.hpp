#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tunnelwave/density.hpp"
#include "tunnelwave/potential.hpp"
#include "tunnelwave/tdse.hpp"

namespace tw {

// Full experiment description, loaded from JSON. All quantities in natural
// units (mass 1). Unknown keys are rejected to keep configs honest.
struct ExperimentConfig {
    PotentialModel potential;
    EnergyWindow window{0.7, 0.9};
    DensityParams density;
    std::vector<double> hbar_list;
    SimulationConfig evolution;
    // comparison/approximant knobs
    double chi_mod_C = 10.0;
    double chi_mod_beta = 0.25;
    std::vector<double> approx_times;
    GridSpec approx_grid; // n = 0: choose from the packet location
    std::vector<std::string> approximants; // subset of gauss_inf, mod, gauss, superposition
    double transmission_E = 0.8; // transmission subcommand energy list center
    std::vector<double> transmission_energies;
    // compare subcommand pass/fail contract
    double compare_gauged_tol = 0.5;
    bool compare_require_decreasing = true;
    std::string output_dir = "out";
    bool binary_snapshots = false;
    bool deterministic = true;

    std::string source_path; // where it was loaded from
    std::string raw_text;    // exact bytes, hashed into the manifest
};

ExperimentConfig load_config(const std::string& path);

// Worker count for sweep parallelism: TUNNELWAVE_WORKERS, default 1.
int worker_count();

// FNV-1a 64-bit over the raw config bytes.
unsigned long long fnv1a64(const std::string& bytes);

// Writes manifest.json (config path+hash, tool version, compiler, timings)
// into dir. Timings are (label, seconds) pairs.
void write_manifest(const std::string& dir, const ExperimentConfig& config,
                    const std::vector<std::pair<std::string, double>>& timings);

inline const char* version_string() { return "0.1.0"; }

} // namespace tw
