#include "sqeaihr/integrators.hpp"

#include <algorithm>
#include <cmath>

#include "sqeaihr/philox.hpp"

namespace sqeaihr {

std::int64_t IntegratorConfig::step_count() const {
    validate();
    const double ratio = t_end / dt;
    const auto steps = static_cast<std::int64_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
        throw ValidationError("integrator.t_end", "must be a whole multiple of integrator.dt");
    return steps;
}

void IntegratorConfig::validate() const {
    if (!(std::isfinite(dt) && dt > 0.0)) throw ValidationError("integrator.dt", "must be finite and > 0");
    if (!(std::isfinite(t_end) && t_end >= dt)) throw ValidationError("integrator.t_end", "must be >= dt");
    if (record_every < 1) throw ValidationError("integrator.record_every", "must be >= 1");
    if (!(std::isfinite(positivity_floor) && positivity_floor >= 0.0))
        throw ValidationError("integrator.positivity_floor", "must be finite and >= 0");
}

IntegrationError::IntegrationError(const std::string& what, std::int64_t step, std::optional<SeedSpec> seed)
    : NumericalError(what + " at step " + std::to_string(step) +
                     (seed ? " (seed " + std::to_string(seed->master_seed) + ", path " +
                                 std::to_string(seed->path_index) + ")"
                           : std::string())),
      step_(step),
      seed_(seed) {}

namespace {

State clamp_for_record(const State& x, double floor) {
    State out = x;
    for (double& c : out.values)
        if (c < floor) c = 0.0;
    return out;
}

bool all_finite(const State& x) {
    return std::all_of(x.values.begin(), x.values.end(), [](double c) { return std::isfinite(c); });
}

double min_component(const State& x) { return *std::min_element(x.values.begin(), x.values.end()); }

/// Shared stepping loop; `advance(state, step)` performs one step in place.
template <typename Advance>
Trajectory run_fixed_step(const State& init, const IntegratorConfig& cfg, TrajectoryMeta meta, Advance&& advance) {
    const std::int64_t steps = cfg.step_count();
    Trajectory traj;
    traj.meta = std::move(meta);
    traj.meta.dt = cfg.dt;
    const std::size_t expected = static_cast<std::size_t>(steps / cfg.record_every) + 2;
    traj.times.reserve(expected);
    traj.states.reserve(expected);

    State x = init;
    double min_seen = min_component(x);
    traj.times.push_back(0.0);
    traj.states.push_back(clamp_for_record(x, cfg.positivity_floor));
    for (std::int64_t k = 0; k < steps; ++k) {
        advance(x, k);
        if (!all_finite(x)) throw IntegrationError("non-finite state", k + 1, traj.meta.seed);
        min_seen = std::min(min_seen, min_component(x));
        const std::int64_t done = k + 1;
        if (done % cfg.record_every == 0 || done == steps) {
            traj.times.push_back(static_cast<double>(done) * cfg.dt);
            traj.states.push_back(clamp_for_record(x, cfg.positivity_floor));
        }
    }
    traj.meta.min_unclamped = min_seen;
    return traj;
}

State axpy(const State& x, double h, const Vector7& k) {
    State out = x;
    for (std::size_t c = 0; c < kCompartments; ++c) out[c] += h * k[c];
    return out;
}

}  // namespace

Trajectory integrate_ode(const ModelParameters& params, const State& init, const IntegratorConfig& cfg) {
    require_nonnegative(init, "integrate_ode");
    const double h = cfg.dt;
    TrajectoryMeta meta{"rk4", h, std::nullopt, params.fingerprint(), 0.0};
    return run_fixed_step(init, cfg, std::move(meta), [&](State& x, std::int64_t k) {
        try {
            const Vector7 k1 = drift(params, x);
            const Vector7 k2 = drift(params, axpy(x, 0.5 * h, k1));
            const Vector7 k3 = drift(params, axpy(x, 0.5 * h, k2));
            const Vector7 k4 = drift(params, axpy(x, h, k3));
            for (std::size_t c = 0; c < kCompartments; ++c)
                x[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        } catch (const DomainError& e) {
            throw IntegrationError(std::string("RK4 stage left the nonnegative orthant: ") + e.what(), k + 1);
        }
    });
}

Vector7 wiener_increments(const SeedSpec& seed, std::uint64_t step_index, double dt) {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed.master_seed),
                                              static_cast<std::uint32_t>(seed.master_seed >> 32)};
    const auto step_lo = static_cast<std::uint32_t>(step_index);
    const auto step_hi = static_cast<std::uint32_t>(step_index >> 32);
    const auto path_lo = static_cast<std::uint32_t>(seed.path_index);
    // Top two bits of path_index are dropped to make room for the block number.
    const auto path_hi = static_cast<std::uint32_t>(seed.path_index >> 32) << 2;

    const double scale = std::sqrt(dt);
    Vector7 dw{};
    for (std::uint32_t block = 0; block < 4; ++block) {
        const auto z = detail::normal_pair(detail::philox4x32({step_lo, step_hi, path_lo, path_hi | block}, key));
        dw[2 * block] = scale * z[0];
        if (2 * block + 1 < kCompartments) dw[2 * block + 1] = scale * z[1];
    }
    return dw;
}

Trajectory integrate_sde(const ModelParameters& params, const NoiseIntensities& noise, const State& init,
                         const IntegratorConfig& cfg, const SeedSpec& seed) {
    require_nonnegative(init, "integrate_sde");
    const double h = cfg.dt;
    TrajectoryMeta meta{"euler-maruyama", h, seed, params.fingerprint(), 0.0};
    return run_fixed_step(init, cfg, std::move(meta), [&](State& x, std::int64_t k) {
        State positive = x;
        for (double& c : positive.values) c = std::max(c, 0.0);
        const Vector7 f = drift(params, positive);
        const Vector7 g = diffusion(noise, positive);
        const Vector7 dw = wiener_increments(seed, static_cast<std::uint64_t>(k), h);
        for (std::size_t c = 0; c < kCompartments; ++c) x[c] += f[c] * h + g[c] * dw[c];
    });
}

}  // namespace sqeaihr
