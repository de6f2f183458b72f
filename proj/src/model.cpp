#include "sqeaihr/model.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "sqeaihr/analysis.hpp"

namespace sqeaihr {

namespace {

void require_rate(const char* name, double value) {
    if (!std::isfinite(value)) throw ValidationError(name, "must be finite");
    if (value < 0.0) throw ValidationError(name, "must be >= 0");
}

}  // namespace

ModelParameters::ModelParameters(const ParameterValues& values) : v_(values) {
    require_rate("lambda_in", v_.lambda_in);
    require_rate("beta1", v_.beta1);
    require_rate("beta2", v_.beta2);
    require_rate("b", v_.b);
    require_rate("theta", v_.theta);
    require_rate("q", v_.q);
    require_rate("lam", v_.lam);
    require_rate("mu", v_.mu);
    require_rate("sigma", v_.sigma);
    require_rate("p", v_.p);
    require_rate("eps_a", v_.eps_a);
    require_rate("gamma_a", v_.gamma_a);
    require_rate("d_a", v_.d_a);
    require_rate("eps_i", v_.eps_i);
    require_rate("gamma_i", v_.gamma_i);
    require_rate("d_i", v_.d_i);
    require_rate("gamma_h", v_.gamma_h);
    require_rate("d_h", v_.d_h);
    if (v_.beta2 > v_.beta1) throw ValidationError("beta2", "requires beta1 >= beta2");
    if (!(v_.theta > 0.0 && v_.theta < 1.0)) throw ValidationError("theta", "must lie in (0, 1)");
    if (!(v_.p > 0.0 && v_.p < 1.0)) throw ValidationError("p", "must lie in (0, 1)");
    if (!(v_.mu > 0.0)) throw ValidationError("mu", "must be > 0");
    if (!(v_.b > 0.0)) throw ValidationError("b", "must be > 0");
}

std::string ModelParameters::fingerprint() const {
    // FNV-1a over the IEEE-754 bit patterns, field order fixed.
    const double fields[] = {v_.lambda_in, v_.beta1, v_.beta2, v_.b,       v_.theta,   v_.q,
                             v_.lam,       v_.mu,    v_.sigma, v_.p,       v_.eps_a,   v_.gamma_a,
                             v_.d_a,       v_.eps_i, v_.gamma_i, v_.d_i,   v_.gamma_h, v_.d_h};
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (double f : fields) {
        auto bits = std::bit_cast<std::uint64_t>(f);
        for (int byte = 0; byte < 8; ++byte) {
            hash ^= (bits >> (8 * byte)) & 0xffU;
            hash *= 0x100000001b3ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

NoiseIntensities::NoiseIntensities(const Vector7& sig) : sig_(sig) {
    static constexpr const char* names[] = {"sig1", "sig2", "sig3", "sig4", "sig5", "sig6", "sig7"};
    for (std::size_t k = 0; k < kCompartments; ++k) {
        if (!std::isfinite(sig_[k])) throw ValidationError(std::string("noise.") + names[k], "must be finite");
        if (sig_[k] < 0.0) throw ValidationError(std::string("noise.") + names[k], "must be >= 0");
    }
}

bool NoiseIntensities::is_zero() const {
    for (double s : sig_)
        if (s != 0.0) return false;
    return true;
}

void require_nonnegative(const State& state, const char* what) {
    for (std::size_t k = 0; k < kCompartments; ++k) {
        if (!std::isfinite(state[k]) || state[k] < 0.0)
            throw DomainError(std::string(what) + ": component " + kCompartmentNames[k] +
                              " must be finite and >= 0");
    }
}

double effective_contact_rate(const ModelParameters& params, double i_count) {
    if (!(i_count >= 0.0)) throw DomainError("effective_contact_rate: infective count must be >= 0");
    const auto& v = params.values();
    return v.beta1 - v.beta2 * i_count / (v.b + i_count);
}

double incidence(const ModelParameters& params, const State& x) {
    return effective_contact_rate(params, x.i()) * x.s() * (x.i() + params->theta * x.a());
}

Vector7 drift(const ModelParameters& params, const State& x) {
    const auto& v = params.values();
    const double inf = incidence(params, x);
    return {
        v.lambda_in - inf + v.lam * x.q() - (v.mu + v.q) * x.s(),
        v.q * x.s() - (v.mu + v.lam) * x.q(),
        inf - (v.mu + v.sigma) * x.e(),
        (1.0 - v.p) * v.sigma * x.e() - params.exit_rate_a() * x.a(),
        v.sigma * v.p * x.e() - params.exit_rate_i() * x.i(),
        v.eps_i * x.i() + v.eps_a * x.a() - params.exit_rate_h() * x.h(),
        v.gamma_h * x.h() + v.gamma_i * x.i() + v.gamma_a * x.a() - v.mu * x.r(),
    };
}

Vector7 diffusion(const NoiseIntensities& noise, const State& x) {
    Vector7 g{};
    for (std::size_t k = 0; k < kCompartments; ++k) g[k] = noise[k] * x[k];
    return g;
}

double total_population(const State& x) {
    double n = 0.0;
    for (double c : x.values) n += c;
    return n;
}

double population_balance(const ModelParameters& params, const State& x) {
    const auto& v = params.values();
    return v.lambda_in - v.mu * total_population(x) - v.d_a * x.a() - v.d_i * x.i() - v.d_h * x.h();
}

RegionMembership region_membership(const State& state, const ModelParameters& params, const RegionSpec& spec) {
    if (!(spec.eta >= 0.0)) throw ValidationError("eta", "must be >= 0");
    if (!(spec.eta_prime >= 0.0)) throw ValidationError("eta_prime", "must be >= 0");
    require_nonnegative(state, "region_membership");
    const auto& v = params.values();
    const double n = total_population(state);
    const auto dfe = compute_dfe(params);

    RegionMembership m;
    m.in_upper = n <= v.lambda_in / v.mu + spec.eta;
    m.in_lower = n >= v.lambda_in / (v.mu + v.d_i + v.d_a + v.d_h) - spec.eta_prime;
    m.in_band = m.in_upper && m.in_lower;
    m.in_feasible = state.s() <= dfe.s_o && state.q() <= dfe.q_o;
    return m;
}

}  // namespace sqeaihr
