#include "sqeaihr/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace sqeaihr {

TimeAverageSeries time_average(const Trajectory& traj, const Vector7& weights) {
    if (traj.empty()) throw DomainError("time_average: empty trajectory");
    auto phi = [&](const State& x) {
        double v = 0.0;
        for (std::size_t k = 0; k < kCompartments; ++k) v += weights[k] * x[k];
        return v;
    };
    TimeAverageSeries out;
    out.grid = traj.times;
    out.values.resize(traj.size());
    const double t0 = traj.times.front();
    out.values[0] = phi(traj.states[0]);
    double integral = 0.0;
    for (std::size_t j = 1; j < traj.size(); ++j) {
        integral += phi(traj.states[j - 1]) * (traj.times[j] - traj.times[j - 1]);
        out.values[j] = integral / (traj.times[j] - t0);
    }
    return out;
}

TimeAverageSeries time_average(const Trajectory& traj, Compartment component) {
    Vector7 w{};
    w[static_cast<std::size_t>(component)] = 1.0;
    return time_average(traj, w);
}

namespace {

double infected_mass(const State& x) { return x.e() + x.a() + x.i(); }

}  // namespace

std::optional<double> extinction_slope(const Trajectory& traj) {
    if (traj.size() < 2) throw DomainError("extinction_slope: need at least two grid points");
    const double start = infected_mass(traj.states.front());
    const double end = infected_mass(traj.states.back());
    if (!(start > 0.0) || !(end > 0.0)) return std::nullopt;
    const double span = traj.times.back() - traj.times.front();
    return (std::log(end) - std::log(start)) / span;
}

double persistence_estimate(const Trajectory& traj, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw DomainError("persistence_estimate: tail_fraction must lie in (0, 1]");
    Vector7 w{};
    w[static_cast<std::size_t>(Compartment::A)] = 1.0;
    w[static_cast<std::size_t>(Compartment::I)] = 1.0;
    const auto series = time_average(traj, w);
    const double t_start = traj.times.back() - tail_fraction * (traj.times.back() - traj.times.front());
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < series.values.size(); ++j)
        if (series.grid[j] >= t_start) lowest = std::min(lowest, series.values[j]);
    return lowest;
}

double nearest_rank_quantile(std::vector<double> sample, double prob) {
    if (sample.empty()) throw DomainError("nearest_rank_quantile: empty sample");
    if (!(prob > 0.0 && prob <= 1.0)) throw DomainError("nearest_rank_quantile: prob must lie in (0, 1]");
    const auto n = sample.size();
    auto rank = static_cast<std::size_t>(std::ceil(prob * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(rank - 1), sample.end());
    return sample[rank - 1];
}

EnsembleSummary run_ensemble(const ModelParameters& params, const NoiseIntensities& noise, const State& init,
                             const IntegratorConfig& cfg, std::uint64_t master_seed, std::size_t n_paths,
                             const EnsembleOptions& options) {
    if (n_paths < 1) throw ValidationError("ensemble.paths", "must be >= 1");
    cfg.validate();

    std::vector<std::optional<Trajectory>> paths(n_paths);
    std::vector<std::exception_ptr> failures(n_paths);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next.fetch_add(1); idx < n_paths; idx = next.fetch_add(1)) {
            try {
                paths[idx] = integrate_sde(params, noise, init, cfg, SeedSpec{master_seed, idx});
            } catch (...) {
                failures[idx] = std::current_exception();
            }
        }
    };
    unsigned threads = options.threads != 0 ? options.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_paths));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    // Report the lowest failing path so the error is independent of scheduling.
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    EnsembleSummary sum;
    sum.n_paths = n_paths;
    sum.grid = paths[0]->times;
    const std::size_t n_grid = sum.grid.size();
    sum.mean_path.assign(n_grid, State{});
    sum.q05.assign(n_grid, State{});
    sum.q95.assign(n_grid, State{});

    std::vector<double> column(n_paths);
    for (std::size_t t = 0; t < n_grid; ++t) {
        for (std::size_t k = 0; k < kCompartments; ++k) {
            double acc = 0.0;
            for (std::size_t p = 0; p < n_paths; ++p) {
                column[p] = paths[p]->states[t][k];
                acc += column[p];
            }
            sum.mean_path[t][k] = acc / static_cast<double>(n_paths);
            sum.q05[t][k] = nearest_rank_quantile(column, 0.05);
            sum.q95[t][k] = nearest_rank_quantile(column, 0.95);
        }
    }

    std::size_t extinct = 0;
    double slope_acc = 0.0;
    double slope_sq = 0.0;
    sum.persistence.resize(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
        const Trajectory& traj = *paths[p];
        if (infected_mass(traj.back()) < options.extinction_threshold) ++extinct;
        if (const auto slope = extinction_slope(traj)) {
            ++sum.slope_stats.n_finite;
            slope_acc += *slope;
            slope_sq += *slope * *slope;
        } else {
            ++sum.slope_stats.n_extinct;
        }
        sum.persistence[p] = persistence_estimate(traj, options.tail_fraction);
        for (std::size_t k = 0; k < kCompartments; ++k)
            sum.mean_terminal_time_average[k] += time_average(traj, static_cast<Compartment>(k)).values.back();
    }
    for (double& v : sum.mean_terminal_time_average.values) v /= static_cast<double>(n_paths);
    sum.extinction_fraction = static_cast<double>(extinct) / static_cast<double>(n_paths);
    if (sum.slope_stats.n_finite > 0) {
        const double n = static_cast<double>(sum.slope_stats.n_finite);
        sum.slope_stats.mean = slope_acc / n;
        sum.slope_stats.stddev = std::sqrt(std::max(0.0, slope_sq / n - sum.slope_stats.mean * sum.slope_stats.mean));
    } else {
        sum.slope_stats.mean = std::numeric_limits<double>::quiet_NaN();
        sum.slope_stats.stddev = std::numeric_limits<double>::quiet_NaN();
    }
    return sum;
}

}  // namespace sqeaihr
