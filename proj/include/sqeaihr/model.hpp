#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace sqeaihr {

/// Compartments in canonical order. Every vector and matrix in the library indexes this way.
enum class Compartment : std::size_t { S = 0, Q, E, A, I, H, R };

inline constexpr std::size_t kCompartments = 7;
inline constexpr std::array<const char*, kCompartments> kCompartmentNames = {"S", "Q", "E", "A", "I", "H", "R"};

using Vector7 = std::array<double, kCompartments>;

/// Thrown when a parameter set or model input violates a documented invariant.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Thrown for arguments outside an operation's mathematical domain (e.g. a negative count).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown when a numerical procedure fails (non-finite state, solver non-convergence).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One point (S, Q, E, A, I, H, R) of the phase space, in individuals.
struct State {
    Vector7 values{};

    State() = default;
    explicit State(const Vector7& v) : values(v) {}
    State(double s, double q, double e, double a, double i, double h, double r) : values{s, q, e, a, i, h, r} {}

    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }
    double& operator[](Compartment c) { return values[static_cast<std::size_t>(c)]; }
    double operator[](Compartment c) const { return values[static_cast<std::size_t>(c)]; }

    double s() const { return values[0]; }
    double q() const { return values[1]; }
    double e() const { return values[2]; }
    double a() const { return values[3]; }
    double i() const { return values[4]; }
    double h() const { return values[5]; }
    double r() const { return values[6]; }

    bool operator==(const State&) const = default;
};

/// Raw rate constants (per day). Defaults are the Table 1 nominal values with
/// beta1 = 5e-6, beta2 = 0.6 * beta1 and p = 0.6201 chosen inside their ranges.
struct ParameterValues {
    double lambda_in = 108.63;  // recruitment, individuals/day
    double beta1 = 5e-6;
    double beta2 = 3e-6;
    double b = 70.0;            // media half-saturation, individuals
    double theta = 0.0494;
    double q = 0.071;
    double lam = 0.1003;        // quarantine release
    double mu = 0.00029;
    double sigma = 0.2;
    double p = 0.6201;
    double eps_a = 0.1;
    double gamma_a = 0.15;
    double d_a = 0.005;
    double eps_i = 0.33;
    double gamma_i = 0.1001;
    double d_i = 0.008;
    double gamma_h = 0.14;
    double d_h = 0.004;

    bool operator==(const ParameterValues&) const = default;
};

/// Validated parameter set. Construction enforces every invariant the analysis relies on:
/// all rates nonnegative and finite, beta1 >= beta2, 0 < theta < 1, 0 < p < 1, mu > 0, b > 0.
class ModelParameters {
public:
    ModelParameters() : ModelParameters(ParameterValues{}) {}
    explicit ModelParameters(const ParameterValues& values);

    const ParameterValues& values() const noexcept { return v_; }
    const ParameterValues* operator->() const noexcept { return &v_; }

    /// mu + eps_a + gamma_a + d_a, the total exit rate from A.
    double exit_rate_a() const { return v_.mu + v_.eps_a + v_.gamma_a + v_.d_a; }
    /// mu + eps_i + gamma_i + d_i, the total exit rate from I.
    double exit_rate_i() const { return v_.mu + v_.eps_i + v_.gamma_i + v_.d_i; }
    double exit_rate_h() const { return v_.mu + v_.d_h + v_.gamma_h; }

    /// Stable hex digest of the exact bit patterns of all rate constants.
    std::string fingerprint() const;

    bool operator==(const ModelParameters&) const = default;

private:
    ParameterValues v_;
};

/// Diffusion intensities sigma_1..sigma_7 of the stochastic system, 1/sqrt(day).
class NoiseIntensities {
public:
    NoiseIntensities() = default;
    explicit NoiseIntensities(const Vector7& sig);

    const Vector7& values() const noexcept { return sig_; }
    double operator[](std::size_t k) const { return sig_[k]; }
    bool is_zero() const;

    bool operator==(const NoiseIntensities&) const = default;

private:
    Vector7 sig_{};
};

/// Slack for the D-regions: eta above Lambda/mu, eta_prime below Lambda/(mu + dI + dA + dH).
struct RegionSpec {
    double eta = 0.0;
    double eta_prime = 0.0;
};

struct RegionMembership {
    bool in_upper = false;   // D^eta
    bool in_lower = false;   // D_eta'
    bool in_band = false;    // D^eta_eta'
    bool in_feasible = false;  // S <= S°, Q <= Q°
};

/// beta1 - beta2 * I / (b + I).
double effective_contact_rate(const ModelParameters& params, double i_count);

/// New infections per day: effective_contact_rate * S * (I + theta * A).
double incidence(const ModelParameters& params, const State& state);

/// Deterministic vector field of the seven-compartment system.
Vector7 drift(const ModelParameters& params, const State& state);

/// Diagonal diffusion coefficients sigma_k * X_k.
Vector7 diffusion(const NoiseIntensities& noise, const State& state);

double total_population(const State& state);

/// Lambda - mu N - dA A - dI I - dH H; equals the component sum of drift().
double population_balance(const ModelParameters& params, const State& state);

RegionMembership region_membership(const State& state, const ModelParameters& params, const RegionSpec& spec);

/// Throws DomainError if any component is negative or non-finite.
void require_nonnegative(const State& state, const char* what);

}  // namespace sqeaihr
