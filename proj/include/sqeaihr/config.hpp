#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sqeaihr/analysis.hpp"
#include "sqeaihr/integrators.hpp"
#include "sqeaihr/model.hpp"

namespace sqeaihr {

/// Malformed configuration text. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The control parameters a sweep may vary.
enum class SweepTarget { beta2, lam, q };

std::string_view to_string(SweepTarget target);
std::optional<SweepTarget> parse_sweep_target(std::string_view name);

struct SweepSpec {
    SweepTarget target = SweepTarget::q;
    std::vector<double> values;

    bool operator==(const SweepSpec&) const = default;
};

struct EnsembleSpec {
    std::size_t n_paths = 100;
    std::uint64_t master_seed = 0;

    bool operator==(const EnsembleSpec&) const = default;
};

/// The initial state used for every published simulation.
inline const State kPaperInitialState{1.8e6, 0.0, 10.0, 15.0, 8.0, 5.0, 0.0};

struct ScenarioConfig {
    ModelParameters parameters;
    std::optional<NoiseIntensities> noise;
    State initial_state = kPaperInitialState;
    IntegratorConfig integrator;
    DfeConvention dfe_convention;
    std::optional<EnsembleSpec> ensemble;
    std::optional<SweepSpec> sweep;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Parses the line-oriented `key = value` format:
///
///     # comment
///     beta1 = 5e-6
///     noise.sig3 = 0.015
///     sweep.q = 0.071, 0.2, 0.4
///
/// Missing keys keep their defaults. Unknown or duplicate keys and malformed lines throw
/// ParseError; values that break a model invariant throw ValidationError naming the field.
ScenarioConfig parse_config(std::string_view text);

/// Canonical text for a config: every key written explicitly, numbers in shortest round-trip form.
std::string render_config(const ScenarioConfig& config);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Copy of `params` with the sweep target replaced; throws ValidationError on invariant breaks.
ModelParameters with_sweep_value(const ModelParameters& params, SweepTarget target, double value);

}  // namespace sqeaihr
