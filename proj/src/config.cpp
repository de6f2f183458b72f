#include "sqeaihr/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <regex>
#include <sstream>
#include <variant>

namespace sqeaihr {

std::string_view to_string(SweepTarget target) {
    switch (target) {
        case SweepTarget::beta2: return "beta2";
        case SweepTarget::lam: return "lam";
        case SweepTarget::q: return "q";
    }
    return "?";
}

std::optional<SweepTarget> parse_sweep_target(std::string_view name) {
    if (name == "beta2") return SweepTarget::beta2;
    if (name == "lam") return SweepTarget::lam;
    if (name == "q") return SweepTarget::q;
    return std::nullopt;
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

ModelParameters with_sweep_value(const ModelParameters& params, SweepTarget target, double value) {
    ParameterValues v = params.values();
    switch (target) {
        case SweepTarget::beta2: v.beta2 = value; break;
        case SweepTarget::lam: v.lam = value; break;
        case SweepTarget::q: v.q = value; break;
    }
    try {
        return ModelParameters(v);
    } catch (const ValidationError& e) {
        throw ValidationError("sweep." + std::string(to_string(target)),
                              "value " + format_double(value) + " rejected (" + e.what() + ")");
    }
}

namespace {

using Scalar = std::variant<double, bool>;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view token) {
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::vector<Scalar> parse_value(std::string_view raw, std::size_t line) {
    std::vector<Scalar> items;
    std::size_t pos = 0;
    while (true) {
        const auto comma = raw.find(',', pos);
        const auto token = trim(raw.substr(pos, comma == std::string_view::npos ? raw.npos : comma - pos));
        if (token.empty()) throw ParseError(line, "empty value");
        if (token == "true") {
            items.emplace_back(true);
        } else if (token == "false") {
            items.emplace_back(false);
        } else if (auto num = parse_number(token)) {
            items.emplace_back(*num);
        } else {
            throw ParseError(line, "malformed value '" + std::string(token) + "'");
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return items;
}

struct Entry {
    std::string key;
    std::string raw;
    std::vector<Scalar> items;
    std::size_t line = 0;
};

double scalar_number(const Entry& e) {
    if (e.items.size() != 1) throw ParseError(e.line, e.key + " expects a single number");
    if (const auto* d = std::get_if<double>(&e.items[0])) return *d;
    throw ParseError(e.line, e.key + " expects a number, got a boolean");
}

std::uint64_t scalar_unsigned(const Entry& e) {
    const auto token = trim(e.raw);
    std::uint64_t value = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw ParseError(e.line, e.key + " expects a nonnegative integer");
    return value;
}

std::vector<double> number_list(const Entry& e) {
    std::vector<double> out;
    for (const auto& item : e.items) {
        if (const auto* d = std::get_if<double>(&item)) out.push_back(*d);
        else throw ParseError(e.line, e.key + " expects numbers, got a boolean");
    }
    return out;
}

// Keys naming rate constants, in rendering order.
const std::array<std::pair<const char*, double ParameterValues::*>, 18> kParameterKeys = {{
    {"lambda_in", &ParameterValues::lambda_in}, {"beta1", &ParameterValues::beta1},
    {"beta2", &ParameterValues::beta2},         {"b", &ParameterValues::b},
    {"theta", &ParameterValues::theta},         {"q", &ParameterValues::q},
    {"lam", &ParameterValues::lam},             {"mu", &ParameterValues::mu},
    {"sigma", &ParameterValues::sigma},         {"p", &ParameterValues::p},
    {"eps_a", &ParameterValues::eps_a},         {"gamma_a", &ParameterValues::gamma_a},
    {"d_a", &ParameterValues::d_a},             {"eps_i", &ParameterValues::eps_i},
    {"gamma_i", &ParameterValues::gamma_i},     {"d_i", &ParameterValues::d_i},
    {"gamma_h", &ParameterValues::gamma_h},     {"d_h", &ParameterValues::d_h},
}};

const std::array<const char*, kCompartments> kInitKeys = {"init.s", "init.q", "init.e", "init.a",
                                                          "init.i", "init.h", "init.r"};
const std::array<const char*, kCompartments> kNoiseKeys = {"noise.sig1", "noise.sig2", "noise.sig3", "noise.sig4",
                                                           "noise.sig5", "noise.sig6", "noise.sig7"};

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
    static const std::regex key_pattern(R"([a-z_][a-z_0-9]*(\.[a-z_0-9]+)*)");

    std::vector<Entry> entries;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const auto raw = trim(line.substr(eq + 1));
        if (!std::regex_match(key, key_pattern)) throw ParseError(line_no, "malformed key '" + key + "'");
        if (raw.empty()) throw ParseError(line_no, "missing value for '" + key + "'");
        if (!seen.insert(key).second) throw ParseError(line_no, "duplicate key '" + key + "'");
        entries.push_back(Entry{key, std::string(raw), parse_value(raw, line_no), line_no});
    }

    ParameterValues pv;
    Vector7 sig{};
    bool has_noise = false;
    ScenarioConfig cfg;
    std::optional<double> dfe_override;
    std::optional<EnsembleSpec> ensemble;
    std::optional<SweepSpec> sweep;

    for (const auto& entry : entries) {
        const std::string& key = entry.key;
        bool known = false;
        for (const auto& [name, field] : kParameterKeys) {
            if (key == name) {
                pv.*field = scalar_number(entry);
                known = true;
            }
        }
        for (std::size_t k = 0; k < kCompartments && !known; ++k) {
            if (key == kInitKeys[k]) {
                cfg.initial_state[k] = scalar_number(entry);
                known = true;
            } else if (key == kNoiseKeys[k]) {
                sig[k] = scalar_number(entry);
                has_noise = true;
                known = true;
            }
        }
        if (known) continue;

        if (key == "integrator.t_end") {
            cfg.integrator.t_end = scalar_number(entry);
        } else if (key == "integrator.dt") {
            cfg.integrator.dt = scalar_number(entry);
        } else if (key == "integrator.record_every") {
            cfg.integrator.record_every = static_cast<std::int64_t>(scalar_unsigned(entry));
        } else if (key == "integrator.positivity_floor") {
            cfg.integrator.positivity_floor = scalar_number(entry);
        } else if (key == "dfe.override") {
            dfe_override = scalar_number(entry);
        } else if (key == "ensemble.paths") {
            if (!ensemble) ensemble.emplace();
            ensemble->n_paths = static_cast<std::size_t>(scalar_unsigned(entry));
        } else if (key == "ensemble.seed") {
            if (!ensemble) ensemble.emplace();
            ensemble->master_seed = scalar_unsigned(entry);
        } else if (key.rfind("sweep.", 0) == 0) {
            const auto target = parse_sweep_target(std::string_view(key).substr(6));
            if (!target) throw ParseError(entry.line, "unknown sweep target '" + key + "' (beta2, lam or q)");
            if (sweep) throw ParseError(entry.line, "only one sweep key is allowed");
            sweep = SweepSpec{*target, number_list(entry)};
        } else {
            throw ParseError(entry.line, "unknown key '" + key + "'");
        }
    }

    cfg.parameters = ModelParameters(pv);
    if (has_noise) cfg.noise = NoiseIntensities(sig);
    try {
        require_nonnegative(cfg.initial_state, "init");
    } catch (const DomainError& e) {
        throw ValidationError("init", e.what());
    }
    cfg.integrator.step_count();
    if (dfe_override) cfg.dfe_convention = DfeConvention::override_value(*dfe_override);
    if (ensemble && ensemble->n_paths < 1) throw ValidationError("ensemble.paths", "must be >= 1");
    cfg.ensemble = ensemble;
    if (sweep) {
        if (sweep->values.empty()) throw ValidationError("sweep", "needs at least one value");
        for (double v : sweep->values) with_sweep_value(cfg.parameters, sweep->target, v);
    }
    cfg.sweep = sweep;
    return cfg;
}

std::string render_config(const ScenarioConfig& config) {
    std::ostringstream out;
    const auto& pv = config.parameters.values();
    for (const auto& [name, field] : kParameterKeys) out << name << " = " << format_double(pv.*field) << '\n';
    for (std::size_t k = 0; k < kCompartments; ++k)
        out << kInitKeys[k] << " = " << format_double(config.initial_state[k]) << '\n';
    if (config.noise) {
        for (std::size_t k = 0; k < kCompartments; ++k)
            out << kNoiseKeys[k] << " = " << format_double((*config.noise)[k]) << '\n';
    }
    out << "integrator.t_end = " << format_double(config.integrator.t_end) << '\n'
        << "integrator.dt = " << format_double(config.integrator.dt) << '\n'
        << "integrator.record_every = " << config.integrator.record_every << '\n'
        << "integrator.positivity_floor = " << format_double(config.integrator.positivity_floor) << '\n';
    if (const auto s_o = config.dfe_convention.override_s_o()) out << "dfe.override = " << format_double(*s_o) << '\n';
    if (config.ensemble) {
        out << "ensemble.paths = " << config.ensemble->n_paths << '\n'
            << "ensemble.seed = " << config.ensemble->master_seed << '\n';
    }
    if (config.sweep) {
        out << "sweep." << to_string(config.sweep->target) << " = ";
        for (std::size_t j = 0; j < config.sweep->values.size(); ++j)
            out << (j ? "," : "") << format_double(config.sweep->values[j]);
        out << '\n';
    }
    return out.str();
}

}  // namespace sqeaihr
