#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sqeaihr/integrators.hpp"

namespace sqeaihr {

/// "Went extinct" means E + A + I below this many individuals at the final time.
inline constexpr double kExtinctionThreshold = 1e-3;
inline constexpr double kDefaultTailFraction = 0.2;

/// Running means <phi>(t) = (1/t) * integral_0^t phi(s) ds on a trajectory's recorded grid.
struct TimeAverageSeries {
    std::vector<double> grid;
    std::vector<double> values;
};

/// phi(x) = sum_k weights[k] * x_k.
TimeAverageSeries time_average(const Trajectory& traj, const Vector7& weights);
TimeAverageSeries time_average(const Trajectory& traj, Compartment component);

/// ln(E+A+I) growth rate between the first and last recorded points. Empty when the infected
/// mass is not positive at both ends ("already extinct").
std::optional<double> extinction_slope(const Trajectory& traj);

/// Minimum of <A+I> over the last tail_fraction of the time span.
double persistence_estimate(const Trajectory& traj, double tail_fraction = kDefaultTailFraction);

struct SlopeStats {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t n_finite = 0;
    std::size_t n_extinct = 0;  // paths with no positive infected mass at the end
};

struct EnsembleSummary {
    std::size_t n_paths = 0;
    std::vector<double> grid;
    std::vector<State> mean_path;
    std::vector<State> q05;
    std::vector<State> q95;
    double extinction_fraction = 0.0;
    SlopeStats slope_stats;
    std::vector<double> persistence;         // per path, index = path_index
    State mean_terminal_time_average;        // mean over paths of <X_k>(t_end)
};

struct EnsembleOptions {
    double extinction_threshold = kExtinctionThreshold;
    double tail_fraction = kDefaultTailFraction;
    /// Worker threads; 0 means std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Paths use SeedSpec{master_seed, 0..n_paths-1}. Results do not depend on `threads`:
/// each path is independent and every reduction runs in path-index order.
EnsembleSummary run_ensemble(const ModelParameters& params, const NoiseIntensities& noise, const State& init,
                             const IntegratorConfig& cfg, std::uint64_t master_seed, std::size_t n_paths,
                             const EnsembleOptions& options = {});

/// Nearest-rank empirical quantile of an unsorted sample.
double nearest_rank_quantile(std::vector<double> sample, double prob);

}  // namespace sqeaihr
