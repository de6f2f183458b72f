#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqeaihr/config.hpp"
#include "sqeaihr/ensemble.hpp"

namespace sqeaihr {

// CSV writers. All use '.' decimals, shortest round-trip numbers, LF endings.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_ensemble_csv(const EnsembleSummary& summary, std::ostream& out);
void write_sweep_header(std::ostream& out);
void write_sweep_rows(SweepTarget target, double value, const Trajectory& traj, std::ostream& out);

/// ODE trajectory when the config has no noise, otherwise one SDE path with
/// SeedSpec{ensemble.seed (default 0), 0}.
Trajectory simulate(const ScenarioConfig& config);

void cmd_analyze(const ScenarioConfig& config, std::ostream& out);
void cmd_simulate(const ScenarioConfig& config, std::ostream& out);

struct EnsembleRequest {
    std::size_t n_paths = 100;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;
};

/// Runs the ensemble and writes the summary CSV to `csv` and a `key = value` metrics block to `metrics`.
EnsembleSummary cmd_ensemble(const ScenarioConfig& config, const EnsembleRequest& request, std::ostream& csv,
                             std::ostream& metrics);

/// One trajectory per sweep value on a shared grid (and shared seed when stochastic).
void cmd_sweep(const ScenarioConfig& config, std::ostream& out);

struct FigureScenario {
    std::string id;
    std::string description;
    ScenarioConfig config;
};

inline constexpr double kPublishedSusceptibleDfe = 1.5563e5;

/// Canned configuration for fig1..fig7; throws std::out_of_range for other ids.
FigureScenario figure_scenario(std::string_view id);
std::vector<std::string> figure_ids();

/// Writes the figure's CSV outputs and `<id>_provenance.txt` into `dir`; returns the paths written.
/// `convention` replaces the scenario's default DFE convention when given.
std::vector<std::filesystem::path> cmd_replicate(std::string_view figure_id, const std::filesystem::path& dir,
                                                 const std::optional<DfeConvention>& convention = std::nullopt,
                                                 unsigned threads = 0);

}  // namespace sqeaihr
