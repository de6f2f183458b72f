#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqeaihr/model.hpp"

namespace sqeaihr {

struct IntegratorConfig {
    double t_end = 350.0;
    double dt = 1e-2;
    std::int64_t record_every = 100;
    /// Recorded components below this value are stored as 0. Integration itself never clamps.
    double positivity_floor = 0.0;

    /// Number of fixed steps; throws ValidationError unless t_end is a whole multiple of dt.
    std::int64_t step_count() const;
    void validate() const;

    bool operator==(const IntegratorConfig&) const = default;
};

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;

    bool operator==(const SeedSpec&) const = default;
};

struct TrajectoryMeta {
    std::string integrator;
    double dt = 0.0;
    std::optional<SeedSpec> seed;
    std::string parameter_fingerprint;
    /// Smallest raw component value seen at any step, before recording clamps.
    double min_unclamped = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    TrajectoryMeta meta;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    const State& back() const { return states.back(); }
};

/// Integration failed at a definite step. seed() is set for stochastic runs.
class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, std::int64_t step, std::optional<SeedSpec> seed = std::nullopt);
    std::int64_t step() const noexcept { return step_; }
    const std::optional<SeedSpec>& seed() const noexcept { return seed_; }

private:
    std::int64_t step_;
    std::optional<SeedSpec> seed_;
};

/// Classical fixed-step RK4. Records t = 0, every record_every steps, and always the final step.
Trajectory integrate_ode(const ModelParameters& params, const State& init, const IntegratorConfig& cfg);

/// Full-truncation Euler-Maruyama: drift and diffusion are evaluated at max(x, 0) while the
/// unclamped state is carried forward. Bit-reproducible for a given SeedSpec.
Trajectory integrate_sde(const ModelParameters& params, const NoiseIntensities& noise, const State& init,
                         const IntegratorConfig& cfg, const SeedSpec& seed);

/// Seven independent Normal(0, dt) increments for one step of one path. A pure function of
/// (seed, step_index, channel); see philox.hpp for the generator.
Vector7 wiener_increments(const SeedSpec& seed, std::uint64_t step_index, double dt);

}  // namespace sqeaihr
