// Command-line front end: analyze, simulate, ensemble, sweep, replicate.
//
// Exit codes: 0 success, 2 usage/parse error, 3 validation error, 4 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sqeaihr/commands.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

sqeaihr::ScenarioConfig load_config(const std::string& path) {
    if (path.empty()) return sqeaihr::parse_config("");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sqeaihr::ParseError(0, "cannot read config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return sqeaihr::parse_config(text.str());
}

sqeaihr::DfeConvention parse_dfe_flag(const std::string& flag) {
    if (flag == "formula") return sqeaihr::DfeConvention::formula();
    const std::string prefix = "override:";
    if (flag.rfind(prefix, 0) == 0) {
        const std::string number = flag.substr(prefix.size());
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(number, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != number.size()) throw sqeaihr::ParseError(0, "--dfe: malformed value '" + flag + "'");
        return sqeaihr::DfeConvention::override_value(value);
    }
    throw sqeaihr::ParseError(0, "--dfe expects 'formula' or 'override:VALUE'");
}

std::vector<double> parse_values_flag(const std::string& flag) {
    // Reuse the config grammar for comma lists.
    const auto cfg = sqeaihr::parse_config("sweep.q = " + flag);
    return cfg.sweep->values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SQEAIHR epidemic model: analysis, simulation and figure replication"};
    app.require_subcommand(1);

    std::string config_path;
    std::string dfe_flag;
    std::string out_path;
    std::size_t paths = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string target;
    std::string values;
    std::string figure;
    std::string figure_dir = ".";

    auto* analyze = app.add_subcommand("analyze", "Equilibria, R0, stability and noise thresholds");
    analyze->add_option("--config", config_path, "Scenario config file");
    analyze->add_option("--dfe", dfe_flag, "formula | override:VALUE");

    auto* simulate = app.add_subcommand("simulate", "Trajectory CSV (ODE, or one SDE path when noise is set)");
    simulate->add_option("--config", config_path, "Scenario config file");
    simulate->add_option("--out", out_path, "Output file (default stdout)");

    auto* ensemble = app.add_subcommand("ensemble", "Monte Carlo summary of SDE paths");
    ensemble->add_option("--config", config_path, "Scenario config file");
    auto* paths_opt = ensemble->add_option("--paths", paths, "Number of paths")->check(CLI::PositiveNumber);
    auto* seed_opt = ensemble->add_option("--seed", seed, "Master seed");
    ensemble->add_option("--out", out_path, "Output directory (default: CSV to stdout, metrics to stderr)");
    ensemble->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* sweep = app.add_subcommand("sweep", "I_total(t) for each value of a control parameter");
    sweep->add_option("--config", config_path, "Scenario config file");
    sweep->add_option("--target", target, "beta2 | lam | q")->check(CLI::IsMember({"beta2", "lam", "q"}));
    sweep->add_option("--values", values, "Comma-separated values");
    sweep->add_option("--out", out_path, "Output file (default stdout)");

    auto* replicate = app.add_subcommand("replicate", "Write the data behind one published figure");
    replicate->add_option("figure", figure, "fig1..fig7")->required();
    replicate->add_option("--out", figure_dir, "Output directory")->capture_default_str();
    replicate->add_option("--dfe", dfe_flag, "formula | override:VALUE");
    replicate->add_option("--threads", threads, "Worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*analyze) {
            auto cfg = load_config(config_path);
            if (!dfe_flag.empty()) cfg.dfe_convention = parse_dfe_flag(dfe_flag);
            sqeaihr::cmd_analyze(cfg, std::cout);
        } else if (*simulate) {
            const auto cfg = load_config(config_path);
            if (out_path.empty()) {
                sqeaihr::cmd_simulate(cfg, std::cout);
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + out_path);
                sqeaihr::cmd_simulate(cfg, out);
            }
        } else if (*ensemble) {
            const auto cfg = load_config(config_path);
            sqeaihr::EnsembleRequest req;
            if (cfg.ensemble) {
                req.n_paths = cfg.ensemble->n_paths;
                req.master_seed = cfg.ensemble->master_seed;
            }
            if (paths_opt->count()) req.n_paths = paths;
            if (seed_opt->count()) req.master_seed = seed;
            req.threads = threads;
            if (out_path.empty()) {
                sqeaihr::cmd_ensemble(cfg, req, std::cout, std::cerr);
            } else {
                std::filesystem::create_directories(out_path);
                std::ofstream csv(std::filesystem::path(out_path) / "ensemble.csv", std::ios::binary);
                std::ofstream metrics(std::filesystem::path(out_path) / "metrics.txt", std::ios::binary);
                if (!csv || !metrics) throw std::runtime_error("cannot write into " + out_path);
                sqeaihr::cmd_ensemble(cfg, req, csv, metrics);
            }
        } else if (*sweep) {
            auto cfg = load_config(config_path);
            if (!target.empty() || !values.empty()) {
                if (target.empty() || values.empty())
                    throw sqeaihr::ParseError(0, "--target and --values must be given together");
                cfg.sweep = sqeaihr::SweepSpec{*sqeaihr::parse_sweep_target(target), parse_values_flag(values)};
            }
            if (!cfg.sweep) throw sqeaihr::ParseError(0, "no sweep: set sweep.<target> in the config or pass --target/--values");
            if (out_path.empty()) {
                sqeaihr::cmd_sweep(cfg, std::cout);
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + out_path);
                sqeaihr::cmd_sweep(cfg, out);
            }
        } else if (*replicate) {
            const auto ids = sqeaihr::figure_ids();
            if (std::find(ids.begin(), ids.end(), figure) == ids.end())
                throw sqeaihr::ParseError(0, "unknown figure '" + figure + "' (expected fig1..fig7)");
            std::optional<sqeaihr::DfeConvention> convention;
            if (!dfe_flag.empty()) convention = parse_dfe_flag(dfe_flag);
            for (const auto& path : sqeaihr::cmd_replicate(figure, figure_dir, convention, threads))
                std::cout << path.string() << '\n';
        }
    } catch (const sqeaihr::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const sqeaihr::ValidationError& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        return kExitValidation;
    } catch (const sqeaihr::DomainError& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        return kExitValidation;
    } catch (const sqeaihr::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
