#pragma once

#include <optional>
#include <utility>

#include <Eigen/Core>

#include "sqeaihr/model.hpp"

namespace sqeaihr {

using Matrix3 = Eigen::Matrix3d;
using Matrix7 = Eigen::Matrix<double, 7, 7>;

/// Which S° enters threshold formulas: the closed form from the rate constants, or a
/// caller-supplied value (used to reproduce published numerics that disagree with the closed form).
class DfeConvention {
public:
    static DfeConvention formula() { return DfeConvention{}; }
    static DfeConvention override_value(double s_o);

    bool is_override() const noexcept { return override_.has_value(); }
    std::optional<double> override_s_o() const noexcept { return override_; }

    bool operator==(const DfeConvention&) const = default;

private:
    std::optional<double> override_;
};

struct DiseaseFreeEquilibrium {
    double s_o = 0.0;
    double q_o = 0.0;
    State full_state;
};

/// S° = (Lambda/mu)(mu+lam)/(mu+q+lam), Q° = (Lambda/mu) q/(mu+q+lam).
DiseaseFreeEquilibrium compute_dfe(const ModelParameters& params);

/// DFE under a convention. An override replaces S° and sets Q° = q S° / (mu + lam),
/// the quarantine balance at that S°.
DiseaseFreeEquilibrium compute_dfe(const ModelParameters& params, const DfeConvention& convention);

double compute_r0(const ModelParameters& params, double s_o);

struct NextGeneration {
    Matrix3 f;  // new-infection Jacobian, order (E, A, I)
    Matrix3 v;  // transition Jacobian
};

NextGeneration next_generation_matrices(const ModelParameters& params, double s_o);

/// Spectral radius of F V^{-1}, computed numerically.
double next_generation_spectral_radius(const NextGeneration& ngm);

/// Intermediate constants and the quadratic A I*^2 + B I* + C = 0 whose positive root is the
/// endemic infective level. The quadratic is normalised by the positive factor (mu+lam)/q
/// relative to the textbook form so that q = 0 is covered; the roots are unchanged.
struct EndemicCoefficients {
    double c = 0.0;
    double m = 0.0;
    double c_prime = 0.0;
    double m_prime = 0.0;
    double frak_a = 0.0;
    double frak_b = 0.0;
    double frak_c = 0.0;
};

EndemicCoefficients endemic_coefficients(const ModelParameters& params, double s_o);

/// The unique endemic equilibrium when R0 > 1 under the chosen convention, otherwise empty.
std::optional<State> endemic_equilibrium(const ModelParameters& params,
                                         const DfeConvention& convention = DfeConvention::formula());

/// Analytic Jacobian of drift().
Matrix7 jacobian(const ModelParameters& params, const State& state);

/// Largest real part among the eigenvalues of a square matrix.
double spectral_bound(const Eigen::MatrixXd& matrix);

struct ExtinctionReport {
    double half_max_noise_sq = 0.0;   // 0.5 * max sigma_i^2
    double min_infected_noise_sq = 0.0;  // min(sigma3^2, sigma4^2, sigma5^2)
    double growth_term = 0.0;         // beta1 S° - mu
    double extinction_exponent = 0.0;  // beta1 S° - mu - min_infected_noise_sq / 6
    bool noise_dominance_ok = false;  // mu > half_max_noise_sq
    bool noise_floor_ok = false;      // min_infected_noise_sq > 6 (beta1 S° - mu)
    bool extinct() const { return noise_dominance_ok && noise_floor_ok; }
};

ExtinctionReport extinction_report(const ModelParameters& params, const NoiseIntensities& noise, double s_o);

double alpha_hat(const ModelParameters& params);
double rho1(const ModelParameters& params, double alpha);
double rho2(const ModelParameters& params, const NoiseIntensities& noise);

struct PersistenceReport {
    double alpha_hat = 0.0;
    double rho1_at_hat = 0.0;
    double rho2 = 0.0;
    double margin = 0.0;  // (rho1(alpha_hat) - rho2) / beta1, individuals
    bool persistent = false;
};

PersistenceReport persistence_report(const ModelParameters& params, const NoiseIntensities& noise);

/// Everything the analyze command prints for one convention.
struct AnalysisReport {
    DfeConvention convention;
    DiseaseFreeEquilibrium dfe;
    double r0 = 0.0;
    EndemicCoefficients coefficients;
    std::optional<State> endemic;
    double dfe_spectral_bound = 0.0;
    std::optional<ExtinctionReport> extinction;
    std::optional<PersistenceReport> persistence;
};

AnalysisReport analyze(const ModelParameters& params, const std::optional<NoiseIntensities>& noise,
                       const DfeConvention& convention);

}  // namespace sqeaihr
