#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sqeaihr/analysis.hpp"
#include "sqeaihr/integrators.hpp"
#include "sqeaihr/philox.hpp"

using namespace sqeaihr;

namespace {

IntegratorConfig config(double t_end, double dt, std::int64_t record_every = 1) {
    IntegratorConfig cfg;
    cfg.t_end = t_end;
    cfg.dt = dt;
    cfg.record_every = record_every;
    return cfg;
}

/// Every rate zero except mu: each compartment decays independently.
ParameterValues pure_decay(double mu) {
    ParameterValues v;
    v.lambda_in = v.beta1 = v.beta2 = 0;
    v.q = v.lam = v.sigma = 0;
    v.eps_a = v.gamma_a = v.d_a = 0;
    v.eps_i = v.gamma_i = v.d_i = 0;
    v.gamma_h = v.d_h = 0;
    v.mu = mu;
    return v;
}

double max_relative_error(const State& got, const State& want) {
    double worst = 0;
    double scale = 0;
    for (std::size_t k = 0; k < kCompartments; ++k) scale = std::max(scale, std::abs(want[k]));
    for (std::size_t k = 0; k < kCompartments; ++k) worst = std::max(worst, std::abs(got[k] - want[k]) / scale);
    return worst;
}

}  // namespace

TEST(IntegratorConfig, StepCount) {
    EXPECT_EQ(config(350, 1e-2).step_count(), 35000);
    EXPECT_EQ(config(1, 0.1).step_count(), 10);
    EXPECT_THROW(config(1, 0.3).step_count(), ValidationError);
    EXPECT_THROW(config(1, 0).step_count(), ValidationError);
    EXPECT_THROW(config(0.01, 0.1).step_count(), ValidationError);
    EXPECT_THROW(config(1, 0.1, 0).step_count(), ValidationError);
}

TEST(IntegrateOde, DfeStaysPut) {
    const ModelParameters params(oracle::table1(3.97e-6, 0.6 * 3.97e-6));
    const auto dfe = compute_dfe(params);
    const auto traj = integrate_ode(params, dfe.full_state, config(1000, 1e-2, 100));
    for (const auto& x : traj.states)
        for (std::size_t k = 0; k < kCompartments; ++k) EXPECT_LE(std::abs(x[k] - dfe.full_state[k]), 1e-9 * dfe.s_o);
}

TEST(IntegrateOde, LinearDecay) {
    const ModelParameters params(pure_decay(0.3));
    const State init(1, 2, 3, 4, 5, 6, 7);
    const auto traj = integrate_ode(params, init, config(10, 0.01, 100));
    const double factor = std::exp(-0.3 * 10);
    for (std::size_t k = 0; k < kCompartments; ++k)
        EXPECT_NEAR(traj.back()[k], init[k] * factor, 1e-8 * init[k] * factor);
}

TEST(IntegrateOde, RecordingGrid) {
    const ModelParameters params;
    const auto traj = integrate_ode(params, oracle::kPaperInit, config(1.05, 0.01, 50));
    ASSERT_EQ(traj.size(), 4U);
    EXPECT_EQ(traj.times[0], 0.0);
    EXPECT_NEAR(traj.times[1], 0.5, 1e-15);
    EXPECT_NEAR(traj.times[2], 1.0, 1e-15);
    EXPECT_NEAR(traj.times[3], 1.05, 1e-15);
    EXPECT_EQ(traj.states[0], oracle::kPaperInit);
    EXPECT_EQ(traj.meta.integrator, "rk4");
    EXPECT_EQ(traj.meta.parameter_fingerprint, params.fingerprint());
    EXPECT_FALSE(traj.meta.seed.has_value());

    const auto single = integrate_ode(params, oracle::kPaperInit, config(0.01, 0.01, 100));
    EXPECT_EQ(single.size(), 2U);
}

TEST(IntegrateOde, RejectsNegativeStart) {
    EXPECT_THROW(integrate_ode(ModelParameters{}, State(-1, 0, 0, 0, 0, 0, 0), config(1, 0.1)), DomainError);
}

TEST(IntegrateOde, NonFiniteStateReportsStep) {
    ParameterValues v = pure_decay(1e300);
    try {
        integrate_ode(ModelParameters(v), State(1e10, 0, 0, 0, 0, 0, 0), config(1, 0.5));
        FAIL() << "expected an integration error";
    } catch (const IntegrationError& e) {
        EXPECT_EQ(e.step(), 1);
    }
}

TEST(IntegrateOde, AgreesWithAdaptiveReference) {
    const auto v = oracle::table1(5e-6, 3e-6);
    const ModelParameters params(v);
    for (double t_end : {20.0, 100.0, 350.0}) {
        const auto ours = integrate_ode(params, oracle::kPaperInit, config(t_end, 1e-2, 1000)).back();
        const auto ref = oracle::reference_solution(v, oracle::kPaperInit, t_end);
        EXPECT_LE(max_relative_error(ours, ref), 1e-7) << "t = " << t_end;
    }
}

TEST(IntegrateOde, FourthOrderConvergence) {
    const auto v = oracle::table1(5e-6, 3e-6);
    const ModelParameters params(v);
    const double t_end = 60;
    const auto ref = oracle::reference_solution(v, oracle::kPaperInit, t_end, 1e-12);
    const double coarse = max_relative_error(integrate_ode(params, oracle::kPaperInit, config(t_end, 0.1, 600)).back(), ref);
    const double fine = max_relative_error(integrate_ode(params, oracle::kPaperInit, config(t_end, 0.05, 1200)).back(), ref);
    EXPECT_GE(coarse / fine, 12.0) << "coarse " << coarse << " fine " << fine;
}

TEST(IntegrateOde, PositivityFloorOnlyAffectsRecords) {
    const ModelParameters params(oracle::table1(3.97e-6, 0.6 * 3.97e-6));
    auto cfg = config(350, 1e-2, 100);
    const auto raw = integrate_ode(params, oracle::kPaperInit, cfg);
    cfg.positivity_floor = 1e3;
    const auto floored = integrate_ode(params, oracle::kPaperInit, cfg);
    ASSERT_EQ(raw.size(), floored.size());
    for (std::size_t j = 0; j < raw.size(); ++j)
        for (std::size_t k = 0; k < kCompartments; ++k)
            EXPECT_EQ(floored.states[j][k], raw.states[j][k] < 1e3 ? 0.0 : raw.states[j][k]);
}

TEST(Philox, KnownAnswers) {
    using detail::philox4x32;
    const std::array<std::uint32_t, 4> zero_out = {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8};
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), zero_out);
    const std::array<std::uint32_t, 4> ones_out = {0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd};
    EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}), ones_out);
    const std::array<std::uint32_t, 4> pi_out = {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1};
    EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}), pi_out);
}

TEST(Philox, UnitIntervalIsOpen) {
    EXPECT_GT(detail::to_open_unit(0, 0), 0.0);
    EXPECT_LT(detail::to_open_unit(0xffffffff, 0xffffffff), 1.0);
}

TEST(WienerIncrements, PureFunctionOfInputs) {
    const SeedSpec seed{42, 7};
    EXPECT_EQ(wiener_increments(seed, 123, 0.01), wiener_increments(seed, 123, 0.01));
    EXPECT_NE(wiener_increments(seed, 123, 0.01), wiener_increments(seed, 124, 0.01));
    EXPECT_NE(wiener_increments(seed, 123, 0.01), wiener_increments(SeedSpec{42, 8}, 123, 0.01));
    EXPECT_NE(wiener_increments(seed, 123, 0.01), wiener_increments(SeedSpec{43, 7}, 123, 0.01));
    EXPECT_NE(wiener_increments(SeedSpec{1ULL << 32, 0}, 0, 0.01), wiener_increments(SeedSpec{0, 0}, 0, 0.01));
}

TEST(WienerIncrements, MomentsAndIndependence) {
    constexpr std::size_t n = 1'000'000;
    const double dt = 0.01;
    const SeedSpec seed{20210101, 3};
    std::array<double, 7> sum{}, sum_sq{};
    double cross = 0;
    for (std::size_t step = 0; step < n; ++step) {
        const auto dw = wiener_increments(seed, step, dt);
        for (std::size_t k = 0; k < kCompartments; ++k) {
            sum[k] += dw[k];
            sum_sq[k] += dw[k] * dw[k];
        }
        cross += dw[0] * dw[1];
    }
    for (std::size_t k = 0; k < kCompartments; ++k) {
        const double mean = sum[k] / n;
        const double var = sum_sq[k] / n - mean * mean;
        EXPECT_LE(std::abs(mean), 4 * std::sqrt(dt / n)) << "channel " << k + 1;
        EXPECT_NEAR(var, dt, 0.01 * dt) << "channel " << k + 1;
    }
    EXPECT_NEAR(sum_sq[2] / n - (sum[2] / n) * (sum[2] / n), 0.01, 1e-4);
    const double m0 = sum[0] / n, m1 = sum[1] / n;
    const double r = (cross / n - m0 * m1) / std::sqrt((sum_sq[0] / n - m0 * m0) * (sum_sq[1] / n - m1 * m1));
    EXPECT_LE(std::abs(r), 0.004);
}

TEST(IntegrateSde, SameSeedIsBitIdentical) {
    const ModelParameters params(oracle::table1(4.1e-3, 0.41e-3));
    const NoiseIntensities noise(oracle::kFig4Noise);
    const auto cfg = config(50, 1e-2, 10);
    const auto a = integrate_sde(params, noise, oracle::kPaperInit, cfg, SeedSpec{9, 4});
    const auto b = integrate_sde(params, noise, oracle::kPaperInit, cfg, SeedSpec{9, 4});
    const auto c = integrate_sde(params, noise, oracle::kPaperInit, cfg, SeedSpec{9, 5});
    EXPECT_EQ(a.states, b.states);
    EXPECT_NE(a.states, c.states);
    EXPECT_EQ(a.meta.integrator, "euler-maruyama");
    ASSERT_TRUE(a.meta.seed.has_value());
    EXPECT_EQ(*a.meta.seed, (SeedSpec{9, 4}));
}

TEST(IntegrateSde, ZeroNoiseIsExplicitEuler) {
    const auto v = oracle::table1(5e-6, 3e-6);
    const ModelParameters params(v);
    const auto cfg = config(50, 1e-3, 50000);
    const auto em = integrate_sde(params, NoiseIntensities{}, oracle::kPaperInit, cfg, SeedSpec{1, 0});

    State euler = oracle::kPaperInit;
    for (std::int64_t k = 0; k < cfg.step_count(); ++k) {
        const auto f = oracle::vector_field(v, euler.values);
        for (std::size_t c = 0; c < kCompartments; ++c) euler[c] += cfg.dt * f[c];
    }
    EXPECT_LE(max_relative_error(em.back(), euler), 1e-12);

    const auto rk = integrate_ode(params, oracle::kPaperInit, cfg).back();
    const double n_em = total_population(em.back());
    const double n_rk = total_population(rk);
    EXPECT_LE(std::abs(n_em - n_rk), 5e-2 * n_rk);
}

TEST(IntegrateSde, StrongOrderOnGeometricBrownianMotion) {
    // With every transfer rate zero each compartment is dX = -mu X dt + s X dW, solved exactly by
    // X(T) = X(0) exp((-mu - s^2/2) T + s W(T)) using the same increments the scheme consumed.
    const double mu = 0.5;
    const double s = 1.0;
    const ModelParameters params(pure_decay(mu));
    const NoiseIntensities noise({s, s, s, s, s, s, s});
    const State init(1, 1, 1, 1, 1, 1, 1);
    auto strong_error = [&](double dt) {
        const auto cfg = config(1.0, dt, 1'000'000);
        double err = 0;
        std::size_t samples = 0;
        for (std::uint64_t path = 0; path < 1000; ++path) {
            const SeedSpec seed{77, path};
            const auto traj = integrate_sde(params, noise, init, cfg, seed);
            Vector7 w{};
            for (std::int64_t k = 0; k < cfg.step_count(); ++k) {
                const auto dw = wiener_increments(seed, static_cast<std::uint64_t>(k), dt);
                for (std::size_t c = 0; c < kCompartments; ++c) w[c] += dw[c];
            }
            for (std::size_t c = 0; c < kCompartments; ++c) {
                err += std::abs(traj.back()[c] - std::exp((-mu - 0.5 * s * s) + s * w[c]));
                ++samples;
            }
        }
        return err / static_cast<double>(samples);
    };
    const double coarse = strong_error(0.02);
    const double fine = strong_error(0.01);
    EXPECT_GE(coarse / fine, 1.3) << "coarse " << coarse << " fine " << fine;
}

TEST(IntegrateSde, FullTruncationKeepsDriftWellDefined) {
    const ModelParameters params(oracle::table1(4.1e-3, 0.41e-3));
    const NoiseIntensities loud({0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
    auto cfg = config(20, 0.1, 1);
    const auto traj = integrate_sde(params, loud, State(100, 1, 1, 1, 1, 1, 1), cfg, SeedSpec{3, 0});
    for (const auto& x : traj.states)
        for (double c : x.values) EXPECT_GE(c, 0.0);
    EXPECT_TRUE(std::isfinite(traj.meta.min_unclamped));
}

TEST(OdeRegions, PositivityAbsorptionAndInvariance) {
    oracle::ParameterGenerator gen(31);
    const ModelParameters params(oracle::table1(5e-6, 3e-6));
    const auto& v = params.values();
    const double cap = v.lambda_in / v.mu;
    const double eta = 1e-6 * cap;
    const double lower = v.lambda_in / (v.mu + v.d_a + v.d_i + v.d_h) - eta;
    const double upper = cap + eta;
    const auto dfe = compute_dfe(params);

    for (int trial = 0; trial < 5; ++trial) {
        const State init = gen.positive_state(0.5 * cap);
        IntegratorConfig cfg = config(5000, 0.05, 20);
        const auto traj = integrate_ode(params, init, cfg);
        EXPECT_GE(traj.meta.min_unclamped, -1e-9 * total_population(init));
        bool inside = false;
        for (const auto& x : traj.states) {
            const double n = total_population(x);
            const bool now = n >= lower && n <= upper;
            if (inside) EXPECT_TRUE(now) << "left the band at N = " << n;
            inside = inside || now;
        }
        EXPECT_TRUE(inside);

        State feasible = init;
        feasible[Compartment::S] = gen.uniform(0, 1) * dfe.s_o;
        feasible[Compartment::Q] = gen.uniform(0, 1) * dfe.q_o;
        for (const auto& x : integrate_ode(params, feasible, config(500, 0.05, 20)).states) {
            EXPECT_LE(x.s(), dfe.s_o * (1 + 1e-9));
            EXPECT_LE(x.q(), dfe.q_o * (1 + 1e-9));
        }
    }
}
