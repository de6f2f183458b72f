#include "sqeaihr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace sqeaihr {

DfeConvention DfeConvention::override_value(double s_o) {
    if (!(std::isfinite(s_o) && s_o > 0.0)) throw ValidationError("dfe.override", "must be finite and > 0");
    DfeConvention c;
    c.override_ = s_o;
    return c;
}

DiseaseFreeEquilibrium compute_dfe(const ModelParameters& params) {
    const auto& v = params.values();
    const double capacity = v.lambda_in / v.mu;
    const double denom = v.mu + v.q + v.lam;
    DiseaseFreeEquilibrium dfe;
    dfe.s_o = capacity * (v.mu + v.lam) / denom;
    dfe.q_o = capacity * v.q / denom;
    dfe.full_state = State(dfe.s_o, dfe.q_o, 0, 0, 0, 0, 0);
    return dfe;
}

DiseaseFreeEquilibrium compute_dfe(const ModelParameters& params, const DfeConvention& convention) {
    if (!convention.is_override()) return compute_dfe(params);
    const auto& v = params.values();
    DiseaseFreeEquilibrium dfe;
    dfe.s_o = *convention.override_s_o();
    dfe.q_o = v.q * dfe.s_o / (v.mu + v.lam);
    dfe.full_state = State(dfe.s_o, dfe.q_o, 0, 0, 0, 0, 0);
    return dfe;
}

double compute_r0(const ModelParameters& params, double s_o) {
    if (!(s_o > 0.0)) throw DomainError("compute_r0: S° must be > 0");
    const auto& v = params.values();
    const double weight = v.theta * (1.0 - v.p) / params.exit_rate_a() + v.p / params.exit_rate_i();
    return weight * v.sigma * v.beta1 * s_o / (v.mu + v.sigma);
}

NextGeneration next_generation_matrices(const ModelParameters& params, double s_o) {
    if (!(s_o > 0.0)) throw DomainError("next_generation_matrices: S° must be > 0");
    const auto& v = params.values();
    NextGeneration ngm;
    ngm.f.setZero();
    ngm.f(0, 1) = v.theta * v.beta1 * s_o;
    ngm.f(0, 2) = v.beta1 * s_o;
    ngm.v << v.mu + v.sigma, 0.0, 0.0,
             -(1.0 - v.p) * v.sigma, params.exit_rate_a(), 0.0,
             -v.sigma * v.p, 0.0, params.exit_rate_i();
    return ngm;
}

double next_generation_spectral_radius(const NextGeneration& ngm) {
    Eigen::FullPivLU<Matrix3> lu(ngm.v);
    if (!lu.isInvertible()) throw NumericalError("next_generation_spectral_radius: V is singular");
    const Matrix3 k = ngm.f * lu.inverse();
    Eigen::EigenSolver<Matrix3> solver(k, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("next_generation_spectral_radius: eigen-solver failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

EndemicCoefficients endemic_coefficients(const ModelParameters& params, double s_o) {
    const auto& v = params.values();
    const double kA = params.exit_rate_a();
    const double kI = params.exit_rate_i();

    EndemicCoefficients ec;
    ec.c_prime = kI / (v.sigma * v.p);
    ec.m_prime = v.sigma * (1.0 - v.p) / kA;
    ec.c = v.q * s_o / (v.mu + v.lam);
    ec.m = v.q * (v.mu + v.sigma) / (v.mu * (v.mu + v.q + v.lam));

    // S* = S° - kappa I*; D is the force-of-infection level that balances E at equilibrium.
    const double kappa = (v.mu + v.sigma) * ec.c_prime * (v.mu + v.lam) / (v.mu * (v.mu + v.q + v.lam));
    const double d = (v.mu + v.sigma) * ec.c_prime / (1.0 + v.theta * ec.c_prime * ec.m_prime);

    ec.frak_a = (v.beta1 - v.beta2) * kappa;
    ec.frak_b = v.beta1 * v.b * kappa + d - (v.beta1 - v.beta2) * s_o;
    ec.frak_c = v.b * (d - v.beta1 * s_o);
    return ec;
}

std::optional<State> endemic_equilibrium(const ModelParameters& params, const DfeConvention& convention) {
    const auto& v = params.values();
    const auto dfe = compute_dfe(params, convention);
    const auto ec = endemic_coefficients(params, dfe.s_o);
    if (!(ec.frak_c < 0.0)) return std::nullopt;

    double i_star = 0.0;
    if (ec.frak_a == 0.0) {
        if (!(ec.frak_b > 0.0)) throw NumericalError("endemic_equilibrium: degenerate linear branch");
        i_star = -ec.frak_c / ec.frak_b;
    } else {
        const double disc = ec.frak_b * ec.frak_b - 4.0 * ec.frak_a * ec.frak_c;
        if (disc < 0.0) throw NumericalError("endemic_equilibrium: negative discriminant with C < 0");
        // Cancellation-free pair of roots; with C < 0 < A exactly one is positive.
        const double half = -0.5 * (ec.frak_b + std::copysign(std::sqrt(disc), ec.frak_b));
        i_star = std::max(half / ec.frak_a, ec.frak_c / half);
    }

    const double kappa = (v.mu + v.sigma) * ec.c_prime * (v.mu + v.lam) / (v.mu * (v.mu + v.q + v.lam));
    const double s = dfe.s_o - kappa * i_star;
    const double a = ec.c_prime * ec.m_prime * i_star;
    const double h = (v.eps_i + v.eps_a * ec.c_prime * ec.m_prime) * i_star / params.exit_rate_h();
    const double r = (v.gamma_a * a + v.gamma_i * i_star + v.gamma_h * h) / v.mu;
    return State(s, v.q * s / (v.mu + v.lam), ec.c_prime * i_star, a, i_star, h, r);
}

Matrix7 jacobian(const ModelParameters& params, const State& x) {
    const auto& v = params.values();
    const double g = effective_contact_rate(params, x.i());
    const double dg = -v.beta2 * v.b / ((v.b + x.i()) * (v.b + x.i()));
    const double force = x.i() + v.theta * x.a();
    const double d_s = g * force;
    const double d_a = g * x.s() * v.theta;
    const double d_i = dg * x.s() * force + g * x.s();

    Matrix7 j = Matrix7::Zero();
    j(0, 0) = -d_s - (v.mu + v.q);
    j(0, 1) = v.lam;
    j(0, 3) = -d_a;
    j(0, 4) = -d_i;

    j(1, 0) = v.q;
    j(1, 1) = -(v.mu + v.lam);

    j(2, 0) = d_s;
    j(2, 2) = -(v.mu + v.sigma);
    j(2, 3) = d_a;
    j(2, 4) = d_i;

    j(3, 2) = (1.0 - v.p) * v.sigma;
    j(3, 3) = -params.exit_rate_a();

    j(4, 2) = v.sigma * v.p;
    j(4, 4) = -params.exit_rate_i();

    j(5, 3) = v.eps_a;
    j(5, 4) = v.eps_i;
    j(5, 5) = -params.exit_rate_h();

    j(6, 3) = v.gamma_a;
    j(6, 4) = v.gamma_i;
    j(6, 5) = v.gamma_h;
    j(6, 6) = -v.mu;
    return j;
}

double spectral_bound(const Eigen::MatrixXd& matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
        throw DomainError("spectral_bound: matrix must be square and nonempty");
    if (!matrix.allFinite()) throw DomainError("spectral_bound: matrix has non-finite entries");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("spectral_bound: eigen-solver did not converge");
    return solver.eigenvalues().real().maxCoeff();
}

ExtinctionReport extinction_report(const ModelParameters& params, const NoiseIntensities& noise, double s_o) {
    if (!(s_o > 0.0)) throw DomainError("extinction_report: S° must be > 0");
    const auto& v = params.values();
    ExtinctionReport rep;
    double max_sq = 0.0;
    for (double s : noise.values()) max_sq = std::max(max_sq, s * s);
    rep.half_max_noise_sq = 0.5 * max_sq;
    rep.min_infected_noise_sq = std::min({noise[2] * noise[2], noise[3] * noise[3], noise[4] * noise[4]});
    rep.growth_term = v.beta1 * s_o - v.mu;
    rep.extinction_exponent = rep.growth_term - rep.min_infected_noise_sq / 6.0;
    rep.noise_dominance_ok = v.mu > rep.half_max_noise_sq;
    rep.noise_floor_ok = rep.min_infected_noise_sq > 6.0 * rep.growth_term;
    return rep;
}

double alpha_hat(const ModelParameters& params) {
    const auto& v = params.values();
    const double asym = std::sqrt(v.theta * (1.0 - v.p));
    return asym / (asym + std::sqrt(v.p));
}

double rho1(const ModelParameters& params, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("rho1: alpha must lie in (0, 1)");
    const auto& v = params.values();
    if (v.beta1 < v.beta2) throw DomainError("rho1: requires beta1 >= beta2");
    return 3.0 * std::cbrt(v.lambda_in * (v.beta1 - v.beta2) * v.sigma) *
           (std::cbrt(v.theta * (1.0 - v.p) * alpha) + std::cbrt(v.p * (1.0 - alpha)));
}

double rho2(const ModelParameters& params, const NoiseIntensities& noise) {
    const auto& v = params.values();
    double noise_sq = 0.0;
    for (double s : noise.values()) noise_sq += s * s;
    return 7.0 * v.mu + v.sigma + (v.eps_a + v.gamma_a + v.d_a) + (v.eps_i + v.gamma_i + v.d_i) +
           (v.d_h + v.gamma_h) + std::abs(v.lam - v.q) + 0.5 * noise_sq;
}

PersistenceReport persistence_report(const ModelParameters& params, const NoiseIntensities& noise) {
    PersistenceReport rep;
    rep.alpha_hat = alpha_hat(params);
    rep.rho1_at_hat = rho1(params, rep.alpha_hat);
    rep.rho2 = rho2(params, noise);
    const double beta1 = params->beta1;
    rep.margin = beta1 > 0.0 ? (rep.rho1_at_hat - rep.rho2) / beta1
                             : -std::numeric_limits<double>::infinity();
    rep.persistent = rep.margin > 0.0;
    return rep;
}

AnalysisReport analyze(const ModelParameters& params, const std::optional<NoiseIntensities>& noise,
                       const DfeConvention& convention) {
    AnalysisReport rep;
    rep.convention = convention;
    rep.dfe = compute_dfe(params, convention);
    rep.r0 = compute_r0(params, rep.dfe.s_o);
    rep.coefficients = endemic_coefficients(params, rep.dfe.s_o);
    rep.endemic = endemic_equilibrium(params, convention);
    rep.dfe_spectral_bound = spectral_bound(jacobian(params, rep.dfe.full_state));
    const NoiseIntensities sig = noise.value_or(NoiseIntensities{});
    rep.extinction = extinction_report(params, sig, rep.dfe.s_o);
    rep.persistence = persistence_report(params, sig);
    return rep;
}

}  // namespace sqeaihr
