#include "sqeaihr/commands.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sqeaihr {

namespace {

const char* kStateColumns = "S,Q,E,A,I,H,R";

void write_state(const State& x, std::ostream& out) {
    for (std::size_t k = 0; k < kCompartments; ++k) out << ',' << format_double(x[k]);
}

double infected_total(const State& x) { return x.e() + x.a() + x.i(); }

std::string describe_convention(const DfeConvention& c) {
    if (const auto s_o = c.override_s_o()) return "override:" + format_double(*s_o);
    return "formula";
}

void write_analysis_block(const ModelParameters& params, const std::optional<NoiseIntensities>& noise,
                          const DfeConvention& convention, std::ostream& out) {
    const auto rep = analyze(params, noise, convention);
    const std::string pre = "[" + describe_convention(convention) + "] ";
    out << pre << "S_o = " << format_double(rep.dfe.s_o) << '\n';
    out << pre << "Q_o = " << format_double(rep.dfe.q_o) << '\n';
    out << pre << "R0 = " << format_double(rep.r0) << '\n';
    out << pre << "quadratic = " << format_double(rep.coefficients.frak_a) << ", "
        << format_double(rep.coefficients.frak_b) << ", " << format_double(rep.coefficients.frak_c) << '\n';
    out << pre << "endemic = ";
    if (rep.endemic) {
        for (std::size_t k = 0; k < kCompartments; ++k) out << (k ? ", " : "") << format_double((*rep.endemic)[k]);
    } else {
        out << "none";
    }
    out << '\n';
    out << pre << "dfe_spectral_bound = " << format_double(rep.dfe_spectral_bound) << '\n';
    out << pre << "dfe_stability = " << (rep.dfe_spectral_bound < 0.0 ? "stable" : "unstable") << '\n';
    const auto& ext = *rep.extinction;
    out << pre << "extinction.half_max_noise_sq = " << format_double(ext.half_max_noise_sq) << '\n';
    out << pre << "extinction.min_infected_noise_sq = " << format_double(ext.min_infected_noise_sq) << '\n';
    out << pre << "extinction.six_growth_term = " << format_double(6.0 * ext.growth_term) << '\n';
    out << pre << "extinction.exponent = " << format_double(ext.extinction_exponent) << '\n';
    out << pre << "extinction.noise_dominance_ok = " << (ext.noise_dominance_ok ? "true" : "false") << '\n';
    out << pre << "extinction.noise_floor_ok = " << (ext.noise_floor_ok ? "true" : "false") << '\n';
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << "time," << kStateColumns << '\n';
    for (std::size_t j = 0; j < traj.size(); ++j) {
        out << format_double(traj.times[j]);
        write_state(traj.states[j], out);
        out << '\n';
    }
}

void write_ensemble_csv(const EnsembleSummary& summary, std::ostream& out) {
    out << "time,stat," << kStateColumns << '\n';
    for (std::size_t j = 0; j < summary.grid.size(); ++j) {
        const std::string t = format_double(summary.grid[j]);
        out << t << ",mean";
        write_state(summary.mean_path[j], out);
        out << '\n' << t << ",q05";
        write_state(summary.q05[j], out);
        out << '\n' << t << ",q95";
        write_state(summary.q95[j], out);
        out << '\n';
    }
}

void write_sweep_header(std::ostream& out) { out << "sweep_param,sweep_value,time,I_total\n"; }

void write_sweep_rows(SweepTarget target, double value, const Trajectory& traj, std::ostream& out) {
    const std::string prefix = std::string(to_string(target)) + "," + format_double(value) + ",";
    for (std::size_t j = 0; j < traj.size(); ++j)
        out << prefix << format_double(traj.times[j]) << ',' << format_double(infected_total(traj.states[j])) << '\n';
}

Trajectory simulate(const ScenarioConfig& config) {
    if (!config.noise) return integrate_ode(config.parameters, config.initial_state, config.integrator);
    const std::uint64_t seed = config.ensemble ? config.ensemble->master_seed : 0;
    return integrate_sde(config.parameters, *config.noise, config.initial_state, config.integrator,
                         SeedSpec{seed, 0});
}

void cmd_analyze(const ScenarioConfig& config, std::ostream& out) {
    const auto& params = config.parameters;
    out << "parameters_fingerprint = " << params.fingerprint() << '\n';
    out << "convention = " << describe_convention(config.dfe_convention) << '\n';
    write_analysis_block(params, config.noise, config.dfe_convention, out);
    if (config.dfe_convention.is_override()) write_analysis_block(params, config.noise, DfeConvention::formula(), out);

    const auto per = persistence_report(params, config.noise.value_or(NoiseIntensities{}));
    out << "alpha_hat = " << format_double(per.alpha_hat) << '\n';
    out << "rho1_at_hat = " << format_double(per.rho1_at_hat) << '\n';
    out << "rho2 = " << format_double(per.rho2) << '\n';
    out << "persistence_margin = " << format_double(per.margin) << '\n';
    out << "persistence_verdict = " << (per.persistent ? "positive" : "negative") << '\n';
}

void cmd_simulate(const ScenarioConfig& config, std::ostream& out) { write_trajectory_csv(simulate(config), out); }

EnsembleSummary cmd_ensemble(const ScenarioConfig& config, const EnsembleRequest& request, std::ostream& csv,
                             std::ostream& metrics) {
    const NoiseIntensities noise = config.noise.value_or(NoiseIntensities{});
    EnsembleOptions options;
    options.threads = request.threads;
    const auto summary = run_ensemble(config.parameters, noise, config.initial_state, config.integrator,
                                      request.master_seed, request.n_paths, options);
    write_ensemble_csv(summary, csv);

    const auto dfe = compute_dfe(config.parameters, config.dfe_convention);
    const auto ext = extinction_report(config.parameters, noise, dfe.s_o);
    const auto per = persistence_report(config.parameters, noise);
    std::vector<double> sorted = summary.persistence;
    std::sort(sorted.begin(), sorted.end());
    const auto above = std::count_if(sorted.begin(), sorted.end(), [&](double v) { return v >= per.margin; });

    metrics << "n_paths = " << summary.n_paths << '\n'
            << "master_seed = " << request.master_seed << '\n'
            << "extinction_threshold = " << format_double(options.extinction_threshold) << '\n'
            << "extinction_fraction = " << format_double(summary.extinction_fraction) << '\n'
            << "extinction_exponent_bound = " << format_double(ext.extinction_exponent) << '\n'
            << "slope_mean = " << format_double(summary.slope_stats.mean) << '\n'
            << "slope_std = " << format_double(summary.slope_stats.stddev) << '\n'
            << "slope_paths = " << summary.slope_stats.n_finite << '\n'
            << "slope_already_extinct = " << summary.slope_stats.n_extinct << '\n'
            << "tail_fraction = " << format_double(options.tail_fraction) << '\n'
            << "persistence_min = " << format_double(sorted.front()) << '\n'
            << "persistence_median = " << format_double(nearest_rank_quantile(sorted, 0.5)) << '\n'
            << "persistence_margin = " << format_double(per.margin) << '\n'
            << "persistence_fraction_above_margin = "
            << format_double(static_cast<double>(above) / static_cast<double>(sorted.size())) << '\n';
    for (std::size_t k = 0; k < kCompartments; ++k)
        metrics << "terminal_time_average." << kCompartmentNames[k] << " = "
                << format_double(summary.mean_terminal_time_average[k]) << '\n';
    return summary;
}

void cmd_sweep(const ScenarioConfig& config, std::ostream& out) {
    if (!config.sweep) throw ValidationError("sweep", "config has no sweep");
    const auto& sweep = *config.sweep;
    std::vector<ModelParameters> variants;
    for (double v : sweep.values) variants.push_back(with_sweep_value(config.parameters, sweep.target, v));

    write_sweep_header(out);
    for (std::size_t j = 0; j < variants.size(); ++j) {
        ScenarioConfig run = config;
        run.parameters = variants[j];
        write_sweep_rows(sweep.target, sweep.values[j], simulate(run), out);
    }
}

// ---------------------------------------------------------------------------
// Figure scenarios

namespace {

constexpr Vector7 kFig3Noise = {0.024, 0.0235, 0.015, 0.0174, 0.019, 0.0213, 0.0238};
constexpr Vector7 kFig4Noise = {0.019, 0.0185, 0.014, 0.017, 0.0158, 0.0136, 0.0182};
constexpr std::uint64_t kFigureSeed = 20210101;
constexpr std::size_t kFigurePaths = 100;

ScenarioConfig deterministic_base(double beta1, double beta2_ratio) {
    ScenarioConfig cfg;
    ParameterValues v;
    v.beta1 = beta1;
    v.beta2 = beta2_ratio * beta1;
    v.p = 0.6201;
    cfg.parameters = ModelParameters(v);
    cfg.integrator.t_end = 350.0;
    cfg.dfe_convention = DfeConvention::override_value(kPublishedSusceptibleDfe);
    return cfg;
}

ScenarioConfig stochastic_base(double beta1, double beta2_ratio, const Vector7& noise) {
    ScenarioConfig cfg = deterministic_base(beta1, beta2_ratio);
    cfg.noise = NoiseIntensities(noise);
    cfg.integrator.t_end = 200.0;
    cfg.ensemble = EnsembleSpec{kFigurePaths, kFigureSeed};
    return cfg;
}

ScenarioConfig fig1() { return deterministic_base(3.97e-6, 0.6); }
ScenarioConfig fig2() { return deterministic_base(5e-6, 0.6); }
ScenarioConfig fig3() { return stochastic_base(2.08e-9, 0.6, kFig3Noise); }
ScenarioConfig fig4() { return stochastic_base(4.1e-3, 0.1, kFig4Noise); }

ScenarioConfig with_sweep(ScenarioConfig cfg, SweepTarget target, std::vector<double> values) {
    cfg.sweep = SweepSpec{target, std::move(values)};
    return cfg;
}

std::vector<double> beta2_fractions(const ScenarioConfig& cfg) {
    const double beta1 = cfg.parameters->beta1;
    return {0.0, 0.3 * beta1, 0.6 * beta1, 0.9 * beta1};
}

const std::vector<double> kQuarantineRates = {0.071, 0.2, 0.4, 0.6};
const std::vector<double> kReleaseRates = {0.1003, 0.05, 0.025, 0.0125};

}  // namespace

std::vector<std::string> figure_ids() { return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}; }

FigureScenario figure_scenario(std::string_view id) {
    if (id == "fig1") return {"fig1", "deterministic, beta1 = 3.97e-6, beta2 = 0.6 beta1, p = 0.6201", fig1()};
    if (id == "fig2") return {"fig2", "deterministic, beta1 = 5e-6, beta2 = 0.6 beta1, p = 0.6201", fig2()};
    if (id == "fig3") return {"fig3", "stochastic extinction, beta1 = 2.08e-9, beta2 = 0.6 beta1", fig3()};
    if (id == "fig4") return {"fig4", "stochastic persistence, beta1 = 4.1e-3, beta2 = 0.1 beta1", fig4()};
    if (id == "fig5")
        return {"fig5", "quarantine rate sweep on the fig2 scenario (also release-rate and fig4 variants)",
                with_sweep(fig2(), SweepTarget::q, kQuarantineRates)};
    if (id == "fig6") {
        auto base = fig2();
        return {"fig6", "media response beta2 sweep on the fig2 scenario (also fig1)",
                with_sweep(base, SweepTarget::beta2, beta2_fractions(base))};
    }
    if (id == "fig7") {
        auto base = fig4();
        return {"fig7", "stochastic media response beta2 sweep on the fig4 scenario (also fig3)",
                with_sweep(base, SweepTarget::beta2, beta2_fractions(base))};
    }
    throw std::out_of_range("unknown figure id '" + std::string(id) + "' (expected fig1..fig7)");
}

namespace {

struct Output {
    std::string file;
    ScenarioConfig config;
};

std::filesystem::path open_write(const std::filesystem::path& dir, const std::string& name, std::ofstream& out) {
    auto path = dir / name;
    out.open(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return path;
}

void write_stochastic_sweep_ensemble(const ScenarioConfig& cfg, unsigned threads, std::ostream& out) {
    const auto& sweep = *cfg.sweep;
    out << "sweep_param,sweep_value,time,stat,I_total\n";
    EnsembleOptions options;
    options.threads = threads;
    for (double value : sweep.values) {
        const auto params = with_sweep_value(cfg.parameters, sweep.target, value);
        const auto summary = run_ensemble(params, *cfg.noise, cfg.initial_state, cfg.integrator,
                                          cfg.ensemble->master_seed, cfg.ensemble->n_paths, options);
        const std::string prefix = std::string(to_string(sweep.target)) + "," + format_double(value) + ",";
        for (std::size_t j = 0; j < summary.grid.size(); ++j) {
            const std::string t = format_double(summary.grid[j]);
            out << prefix << t << ",mean," << format_double(infected_total(summary.mean_path[j])) << '\n';
            out << prefix << t << ",q05," << format_double(infected_total(summary.q05[j])) << '\n';
            out << prefix << t << ",q95," << format_double(infected_total(summary.q95[j])) << '\n';
        }
    }
}

}  // namespace

std::vector<std::filesystem::path> cmd_replicate(std::string_view figure_id, const std::filesystem::path& dir,
                                                 const std::optional<DfeConvention>& convention, unsigned threads) {
    const auto scenario = figure_scenario(figure_id);
    std::filesystem::create_directories(dir);
    const std::string id = scenario.id;

    auto apply = [&](ScenarioConfig cfg) {
        if (convention) cfg.dfe_convention = *convention;
        return cfg;
    };

    std::vector<Output> outputs;
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const ScenarioConfig& cfg, auto&& body) {
        std::ofstream out;
        written.push_back(open_write(dir, name, out));
        body(out);
        outputs.push_back({name, cfg});
    };

    if (id == "fig1" || id == "fig2") {
        const auto cfg = apply(scenario.config);
        emit(id + ".csv", cfg, [&](std::ostream& o) { cmd_simulate(cfg, o); });
    } else if (id == "fig3" || id == "fig4") {
        const auto cfg = apply(scenario.config);
        emit(id + "_path.csv", cfg, [&](std::ostream& o) { cmd_simulate(cfg, o); });
        std::ofstream metrics;
        written.push_back(open_write(dir, id + "_metrics.txt", metrics));
        emit(id + "_ensemble.csv", cfg, [&](std::ostream& o) {
            cmd_ensemble(cfg, {cfg.ensemble->n_paths, cfg.ensemble->master_seed, threads}, o, metrics);
        });
    } else if (id == "fig5") {
        const auto det_q = apply(scenario.config);
        const auto det_lam = apply(with_sweep(fig2(), SweepTarget::lam, kReleaseRates));
        const auto sto_q = apply(with_sweep(fig4(), SweepTarget::q, kQuarantineRates));
        const auto sto_lam = apply(with_sweep(fig4(), SweepTarget::lam, kReleaseRates));
        emit("fig5_q_deterministic.csv", det_q, [&](std::ostream& o) { cmd_sweep(det_q, o); });
        emit("fig5_lam_deterministic.csv", det_lam, [&](std::ostream& o) { cmd_sweep(det_lam, o); });
        emit("fig5_q_stochastic.csv", sto_q, [&](std::ostream& o) { cmd_sweep(sto_q, o); });
        emit("fig5_lam_stochastic.csv", sto_lam, [&](std::ostream& o) { cmd_sweep(sto_lam, o); });
    } else if (id == "fig6") {
        const auto on_fig2 = apply(scenario.config);
        const auto base1 = fig1();
        const auto on_fig1 = apply(with_sweep(base1, SweepTarget::beta2, beta2_fractions(base1)));
        emit("fig6_beta2_fig1.csv", on_fig1, [&](std::ostream& o) { cmd_sweep(on_fig1, o); });
        emit("fig6_beta2_fig2.csv", on_fig2, [&](std::ostream& o) { cmd_sweep(on_fig2, o); });
    } else {
        const auto on_fig4 = apply(scenario.config);
        const auto base3 = fig3();
        const auto on_fig3 = apply(with_sweep(base3, SweepTarget::beta2, beta2_fractions(base3)));
        emit("fig7_beta2_fig3.csv", on_fig3,
             [&](std::ostream& o) { write_stochastic_sweep_ensemble(on_fig3, threads, o); });
        emit("fig7_beta2_fig4.csv", on_fig4,
             [&](std::ostream& o) { write_stochastic_sweep_ensemble(on_fig4, threads, o); });
    }

    std::ofstream prov;
    written.push_back(open_write(dir, id + "_provenance.txt", prov));
    prov << "# figure: " << id << " (" << scenario.description << ")\n";
    for (const auto& output : outputs) {
        const auto& cfg = output.config;
        const auto closed = compute_dfe(cfg.parameters);
        prov << "\n# output: " << output.file << '\n';
        prov << "# dfe_convention: " << describe_convention(cfg.dfe_convention) << '\n';
        if (cfg.dfe_convention.is_override()) {
            const auto used = compute_dfe(cfg.parameters, cfg.dfe_convention);
            prov << "# note: the closed form gives S_o = " << format_double(closed.s_o)
                 << ", Q_o = " << format_double(closed.q_o) << "; thresholds here use S_o = "
                 << format_double(used.s_o) << " (published value), R0 = "
                 << format_double(compute_r0(cfg.parameters, used.s_o)) << " vs "
                 << format_double(compute_r0(cfg.parameters, closed.s_o)) << " under the closed form\n";
        }
        prov << render_config(cfg);
    }
    return written;
}

}  // namespace sqeaihr
