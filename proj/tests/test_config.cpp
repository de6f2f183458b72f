#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sqeaihr/commands.hpp"
#include "sqeaihr/config.hpp"

using namespace sqeaihr;

namespace {

std::size_t parse_error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    ADD_FAILURE() << "accepted: " << text;
    return 0;
}

std::string validation_field(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.field();
    }
    ADD_FAILURE() << "accepted: " << text;
    return {};
}

}  // namespace

TEST(ParseConfig, EmptyTextGivesDefaults) {
    const auto cfg = parse_config("");
    EXPECT_EQ(cfg.parameters.values(), ParameterValues{});
    EXPECT_FALSE(cfg.noise.has_value());
    EXPECT_FALSE(cfg.sweep.has_value());
    EXPECT_FALSE(cfg.ensemble.has_value());
    EXPECT_FALSE(cfg.dfe_convention.is_override());
    EXPECT_EQ(cfg.initial_state, kPaperInitialState);
    EXPECT_EQ(cfg.integrator, IntegratorConfig{});
    EXPECT_EQ(parse_config("\n# only a comment\n   \n"), cfg);
}

TEST(ParseConfig, FullExample) {
    const auto cfg = parse_config(
        "# fig3-like\n"
        "beta1 = 2.08e-9\n"
        "beta2 = 1.248e-9   # 0.6 beta1\n"
        "noise.sig3 = 0.015\n"
        "init.s = 1000\n"
        "integrator.t_end = 200\n"
        "integrator.record_every = 10\n"
        "dfe.override = 155630\n"
        "ensemble.paths = 12\n"
        "ensemble.seed = 18446744073709551615\n"
        "sweep.q = 0.071, 0.2,0.4\n");
    EXPECT_EQ(cfg.parameters->beta1, 2.08e-9);
    EXPECT_EQ(cfg.parameters->beta2, 1.248e-9);
    ASSERT_TRUE(cfg.noise.has_value());
    EXPECT_EQ((*cfg.noise)[2], 0.015);
    EXPECT_EQ((*cfg.noise)[0], 0.0);
    EXPECT_EQ(cfg.initial_state.s(), 1000.0);
    EXPECT_EQ(cfg.initial_state.i(), kPaperInitialState.i());
    EXPECT_EQ(cfg.integrator.t_end, 200.0);
    EXPECT_EQ(cfg.integrator.record_every, 10);
    EXPECT_EQ(cfg.dfe_convention.override_s_o(), 155630.0);
    ASSERT_TRUE(cfg.ensemble.has_value());
    EXPECT_EQ(cfg.ensemble->n_paths, 12U);
    EXPECT_EQ(cfg.ensemble->master_seed, 18446744073709551615ULL);
    ASSERT_TRUE(cfg.sweep.has_value());
    EXPECT_EQ(cfg.sweep->target, SweepTarget::q);
    EXPECT_EQ(cfg.sweep->values, (std::vector<double>{0.071, 0.2, 0.4}));
}

TEST(ParseConfig, SingleContactRateIsFigureTwoStyle) {
    const auto cfg = parse_config("beta1 = 5e-6\n");
    EXPECT_EQ(cfg.parameters->beta1, 5e-6);
    EXPECT_FALSE(cfg.noise.has_value());
}

TEST(ParseConfig, SyntaxErrorsReportLine) {
    EXPECT_EQ(parse_error_line("beta1 = 5e-6\nbeta1 5e-6\n"), 2U);
    EXPECT_EQ(parse_error_line("\n\nBeta1 = 1\n"), 3U);
    EXPECT_EQ(parse_error_line("beta1 =\n"), 1U);
    EXPECT_EQ(parse_error_line("beta1 = 5e-6x\n"), 1U);
    EXPECT_EQ(parse_error_line("beta1 = nan\n"), 1U);
    EXPECT_EQ(parse_error_line("beta1 = 1,2\n"), 1U);
    EXPECT_EQ(parse_error_line("beta1 = true\n"), 1U);
    EXPECT_EQ(parse_error_line("sweep.q = 0.1,,0.2\n"), 1U);
    EXPECT_EQ(parse_error_line("ensemble.paths = 1.5\n"), 1U);
    EXPECT_EQ(parse_error_line("ensemble.seed = -1\n"), 1U);
}

TEST(ParseConfig, DuplicateAndUnknownKeys) {
    EXPECT_EQ(parse_error_line("mu = 0.1\nq = 0.2\nmu = 0.3\n"), 3U);
    EXPECT_EQ(parse_error_line("kappa = 1\n"), 1U);
    EXPECT_EQ(parse_error_line("noise.sig8 = 0.1\n"), 1U);
    EXPECT_EQ(parse_error_line("sweep.mu = 0.1\n"), 1U);
    EXPECT_EQ(parse_error_line("sweep.q = 0.1\nsweep.lam = 0.2\n"), 2U);
}

TEST(ParseConfig, InvariantViolationsNameTheField) {
    EXPECT_EQ(validation_field("beta2 = 9e-6\n"), "beta2");
    EXPECT_EQ(validation_field("theta = 1.5\n"), "theta");
    EXPECT_EQ(validation_field("mu = 0\n"), "mu");
    EXPECT_EQ(validation_field("noise.sig2 = -0.1\n"), "noise.sig2");
    EXPECT_EQ(validation_field("init.e = -1\n"), "init");
    EXPECT_EQ(validation_field("integrator.dt = 0.3\nintegrator.t_end = 1\n"), "integrator.t_end");
    EXPECT_EQ(validation_field("dfe.override = 0\n"), "dfe.override");
    EXPECT_EQ(validation_field("ensemble.paths = 0\n"), "ensemble.paths");
    EXPECT_EQ(validation_field("sweep.beta2 = 1e-6, 6e-6\n"), "sweep.beta2");
}

TEST(RenderConfig, RoundTripsFigureScenarios) {
    for (const auto& id : figure_ids()) {
        const auto cfg = figure_scenario(id).config;
        const auto text = render_config(cfg);
        EXPECT_EQ(parse_config(text), cfg) << id;
        EXPECT_EQ(render_config(parse_config(text)), text) << id;
    }
}

TEST(RenderConfig, RoundTripsRandomConfigs) {
    oracle::ParameterGenerator gen(51);
    for (int trial = 0; trial < 200; ++trial) {
        ScenarioConfig cfg;
        cfg.parameters = ModelParameters(gen.next());
        cfg.initial_state = gen.positive_state(1e6);
        if (trial % 2) {
            Vector7 sig;
            for (double& s : sig) s = gen.uniform(0, 0.05);
            cfg.noise = NoiseIntensities(sig);
            cfg.ensemble = EnsembleSpec{static_cast<std::size_t>(trial + 1), gen.engine()()};
        }
        if (trial % 3 == 0) cfg.dfe_convention = DfeConvention::override_value(gen.log_uniform(1, 1e6));
        if (trial % 5 == 0) cfg.sweep = SweepSpec{SweepTarget::lam, {gen.uniform(0, 1), gen.uniform(0, 1)}};
        cfg.integrator.dt = 0.01;
        cfg.integrator.t_end = 0.01 * static_cast<double>(1 + trial);
        cfg.integrator.record_every = trial + 1;
        const auto text = render_config(cfg);
        EXPECT_EQ(parse_config(text), cfg) << text;
    }
}

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(350), "350");
    EXPECT_EQ(format_double(5e-6), "5e-06");
    EXPECT_EQ(format_double(-0.0), "-0");
}

TEST(WithSweepValue, ReplacesOnlyTheTarget) {
    const ModelParameters base;
    const auto swept = with_sweep_value(base, SweepTarget::lam, 0.3);
    ParameterValues want = base.values();
    want.lam = 0.3;
    EXPECT_EQ(swept.values(), want);
    EXPECT_EQ(to_string(SweepTarget::beta2), "beta2");
    EXPECT_EQ(parse_sweep_target("lam"), SweepTarget::lam);
    EXPECT_FALSE(parse_sweep_target("mu").has_value());
}
