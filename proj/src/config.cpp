#include "uscprobe/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace uscprobe {

const std::vector<KeyValue>& known_keys() {
    static const std::vector<KeyValue> keys = {
        {"omega_c", "system"},        {"epsilon", "system"},          {"epsilon_prime", "system"},
        {"lambda", "system"},         {"lambda_prime", "system"},     {"eg_coupling_form", "system"},
        {"n_max", "system"},          {"configuration", "pulses"},    {"w_s", "pulses"},
        {"w_p", "pulses"},            {"w_p_over_w_s", "pulses"},     {"omega_p", "pulses"},
        {"omega_s", "pulses"},        {"T", "pulses"},                {"tau", "pulses"},
        {"tau_over_T", "pulses"},     {"auto_carriers", "pulses"},    {"doublet_target", "pulses"},
        {"kappa", "dissipation"},     {"gamma", "dissipation"},       {"rel_tol", "integrator"},
        {"abs_tol", "integrator"},    {"max_step", "integrator"},     {"samples", "integrator"},
        {"window_before", "integrator"}, {"window_after", "integrator"}, {"steps_per_period", "integrator"},
        {"method", "integrator"},
        {"omega_c_ghz", "units"},     {"angular_convention", "units"}, {"T_ns", "units"},
        {"tau_ns", "units"},          {"kappa_grid", "scan"},
    };
    return keys;
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

const std::string* section_of(const std::string& key) {
    for (const auto& [k, section] : known_keys()) {
        if (k == key) return &section;
    }
    return nullptr;
}

// Accepts "key" or "section.key" and returns the bare key.
std::string canonical_key(const std::string& raw, const std::string& current_section) {
    std::string key = raw;
    std::string section = current_section;
    if (const auto dot = raw.find('.'); dot != std::string::npos) {
        section = raw.substr(0, dot);
        key = raw.substr(dot + 1);
    }
    const std::string* expected = section_of(key);
    if (expected == nullptr) throw ConfigError(raw, "unknown key '" + raw + "'");
    if (!section.empty() && section != *expected) {
        throw ConfigError(raw, "key '" + key + "' belongs to section [" + *expected + "], not [" + section + "]");
    }
    return key;
}

double to_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto* begin = value.data();
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
        throw ConfigError(key, "key '" + key + "': '" + value + "' is not a finite number");
    }
    return out;
}

int to_int(const std::string& key, const std::string& value) {
    int out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(key, "key '" + key + "': '" + value + "' is not an integer");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(key, "key '" + key + "': '" + value + "' is not a boolean");
}

template <typename Fn>
auto wrap(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError(key, "key '" + key + "': " + ex.what());
    }
}

}  // namespace

std::vector<KeyValue> parse_config_text(const std::string& text, const std::string& origin) {
    std::vector<KeyValue> entries;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw ConfigError("", origin + ":" + std::to_string(line_no) + ": malformed section header");
            }
            section = trim(std::string_view(stripped).substr(1, stripped.size() - 2));
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("", origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string raw_key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        entries.emplace_back(canonical_key(raw_key, section), value);
    }
    return entries;
}

std::vector<KeyValue> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

KeyValue parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(text, "expected key=value, got '" + text + "'");
    const std::string raw_key = trim(std::string_view(text).substr(0, eq));
    return {canonical_key(raw_key, ""), trim(std::string_view(text).substr(eq + 1))};
}

std::vector<double> parse_kappa_grid(const std::string& text) {
    std::vector<double> grid;
    const std::string key = "kappa_grid";
    if (text.rfind("log:", 0) == 0) {
        std::vector<std::string> parts;
        std::stringstream ss(text.substr(4));
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(trim(part));
        if (parts.size() != 3) throw ConfigError(key, "kappa_grid: expected log:<min>:<max>:<count>");
        const double lo = to_double(key, parts[0]);
        const double hi = to_double(key, parts[1]);
        const int count = to_int(key, parts[2]);
        if (!(lo > 0.0) || !(hi > lo) || count < 2) {
            throw ConfigError(key, "kappa_grid: log grid needs 0 < min < max and count >= 2");
        }
        for (int i = 0; i < count; ++i) {
            grid.push_back(std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (count - 1)));
        }
    } else {
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ',');) {
            const std::string item = trim(part);
            if (!item.empty()) grid.push_back(to_double(key, item));
        }
    }
    if (grid.empty()) throw ConfigError(key, "kappa_grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0) throw ConfigError(key, "kappa_grid: rates must be >= 0");
        if (i > 0 && grid[i] < grid[i - 1]) throw ConfigError(key, "kappa_grid must be ascending");
    }
    return grid;
}

RunConfig parse_config(const std::optional<std::string>& preset_name, const std::vector<KeyValue>& entries) {
    RunConfig cfg;
    cfg.preset = preset_name;
    cfg.overrides = entries;

    std::map<std::string, std::string> values;
    for (const auto& [key, value] : entries) {
        if (section_of(key) == nullptr) throw ConfigError(key, "unknown key '" + key + "'");
        values[key] = value;
    }
    const auto has = [&](const char* key) { return values.count(key) > 0; };
    const auto num = [&](const char* key) { return to_double(key, values.at(key)); };

    ProtocolRun& r = cfg.run;
    std::optional<double> preset_tau_ratio;
    std::optional<double> preset_w_ratio;
    if (preset_name) {
        r = wrap("preset", [&] { return preset(*preset_name); });
        preset_tau_ratio = r.pulses.tau / r.pulses.width;
        preset_w_ratio = r.pulses.w_p_peak / r.pulses.w_s_peak;
        if (preset_is_scan(*preset_name)) cfg.kappa_grid = default_kappa_grid();
    } else {
        const std::vector<std::pair<std::vector<const char*>, const char*>> required = {
            {{"configuration"}, "configuration"},
            {{"epsilon"}, "epsilon"},
            {{"epsilon_prime"}, "epsilon_prime"},
            {{"lambda"}, "lambda"},
            {{"w_s"}, "w_s"},
            {{"w_p", "w_p_over_w_s"}, "w_p"},
            {{"T", "T_ns"}, "T"},
            {{"tau", "tau_over_T", "tau_ns"}, "tau"},
            {{"kappa"}, "kappa"},
            {{"gamma"}, "gamma"},
        };
        for (const auto& [alternatives, name] : required) {
            if (std::none_of(alternatives.begin(), alternatives.end(), [&](const char* k) { return has(k); })) {
                throw ConfigError(name, std::string("missing required key '") + name + "' (no preset given)");
            }
        }
    }

    if (has("configuration")) {
        r.config = wrap("configuration", [&] { return parse_configuration(values.at("configuration")); });
    }
    if (has("omega_c") && num("omega_c") != 1.0) {
        throw ConfigError("omega_c", "omega_c is the unit of frequency and must be 1; give other frequencies "
                                     "in units of omega_c or use the [units] keys");
    }
    if (has("epsilon")) r.system.epsilon = num("epsilon");
    if (has("epsilon_prime")) r.system.epsilon_prime = num("epsilon_prime");
    if (has("lambda")) r.system.lambda = num("lambda");
    if (has("lambda_prime")) r.system.lambda_prime = num("lambda_prime");
    if (has("eg_coupling_form")) {
        r.system.eg_coupling_form =
            wrap("eg_coupling_form", [&] { return parse_coupling_form(values.at("eg_coupling_form")); });
    }
    if (has("n_max")) r.system.n_max = to_int("n_max", values.at("n_max"));
    wrap("n_max", [&] { SpaceDef{r.system.n_max}; return 0; });
    if (r.system.lambda < 0.0) throw ConfigError("lambda", "lambda must be >= 0");
    if (r.system.lambda_prime < 0.0) throw ConfigError("lambda_prime", "lambda_prime must be >= 0");

    // Laboratory units.
    const bool lab_units = has("T_ns") || has("tau_ns");
    double omega_c_ghz = 0.0;
    FrequencyConvention convention = FrequencyConvention::cyclic;
    if (lab_units || has("omega_c_ghz") || has("angular_convention")) {
        if (!has("angular_convention")) {
            throw ConfigError("angular_convention",
                              "laboratory units require 'angular_convention' (angular|cyclic); no default is applied");
        }
        if (!has("omega_c_ghz")) throw ConfigError("omega_c_ghz", "laboratory units require 'omega_c_ghz'");
        convention = wrap("angular_convention",
                          [&] { return parse_frequency_convention(values.at("angular_convention")); });
        omega_c_ghz = num("omega_c_ghz");
        if (!(omega_c_ghz > 0.0)) throw ConfigError("omega_c_ghz", "omega_c_ghz must be > 0");
    }
    if (has("T") && has("T_ns")) throw ConfigError("T_ns", "give either 'T' or 'T_ns', not both");
    if (has("T")) r.pulses.width = num("T");
    if (has("T_ns")) r.pulses.width = time_to_internal(num("T_ns"), omega_c_ghz, convention);
    if (!(r.pulses.width > 0.0)) throw ConfigError(has("T_ns") ? "T_ns" : "T", "pulse width must be > 0");

    const int tau_sources = int(has("tau")) + int(has("tau_ns")) + int(has("tau_over_T"));
    if (tau_sources > 1) throw ConfigError("tau", "give only one of 'tau', 'tau_ns', 'tau_over_T'");
    if (has("tau")) r.pulses.tau = num("tau");
    else if (has("tau_ns")) r.pulses.tau = time_to_internal(num("tau_ns"), omega_c_ghz, convention);
    else if (has("tau_over_T")) r.pulses.tau = num("tau_over_T") * r.pulses.width;
    else if (preset_tau_ratio) r.pulses.tau = *preset_tau_ratio * r.pulses.width;
    if (!(r.pulses.tau > 0.0)) throw ConfigError("tau", "pulse delay tau must be > 0");

    if (has("w_s")) r.pulses.w_s_peak = num("w_s");
    if (has("w_p") && has("w_p_over_w_s")) throw ConfigError("w_p", "give either 'w_p' or 'w_p_over_w_s'");
    if (has("w_p")) r.pulses.w_p_peak = num("w_p");
    else if (has("w_p_over_w_s")) r.pulses.w_p_peak = num("w_p_over_w_s") * r.pulses.w_s_peak;
    else if (preset_w_ratio) r.pulses.w_p_peak = *preset_w_ratio * r.pulses.w_s_peak;

    if (has("auto_carriers")) r.auto_carriers = to_bool("auto_carriers", values.at("auto_carriers"));
    if (has("omega_p")) r.pulses.omega_p = num("omega_p");
    if (has("omega_s")) r.pulses.omega_s = num("omega_s");
    if (r.auto_carriers && (has("omega_p") || has("omega_s"))) {
        throw ConfigError(has("omega_p") ? "omega_p" : "omega_s",
                          "explicit carriers need 'auto_carriers = false'");
    }
    if (!r.auto_carriers && !(has("omega_p") && has("omega_s"))) {
        throw ConfigError(has("omega_p") ? "omega_s" : "omega_p",
                          "auto_carriers = false requires both 'omega_p' and 'omega_s'");
    }
    if (has("doublet_target")) {
        r.doublet_target = wrap("doublet_target", [&] { return parse_doublet_target(values.at("doublet_target")); });
    } else if (!preset_name) {
        r.doublet_target = default_doublet_target(r.config);
    }

    if (has("kappa")) r.dissipation.kappa = num("kappa");
    if (has("gamma")) r.dissipation.gamma = num("gamma");
    if (r.dissipation.kappa < 0.0) throw ConfigError("kappa", "kappa must be >= 0");
    if (r.dissipation.gamma < 0.0) throw ConfigError("gamma", "gamma must be >= 0");

    if (has("method")) {
        r.integrator.method = wrap("method", [&] { return parse_integrator_method(values.at("method")); });
    }
    if (has("rel_tol")) r.integrator.rel_tol = num("rel_tol");
    if (has("abs_tol")) r.integrator.abs_tol = num("abs_tol");
    if (!(r.integrator.rel_tol > 0.0)) throw ConfigError("rel_tol", "rel_tol must be > 0");
    if (!(r.integrator.abs_tol > 0.0)) throw ConfigError("abs_tol", "abs_tol must be > 0");
    if (has("max_step")) r.integrator.max_step = num("max_step");
    if (has("samples")) r.samples = to_int("samples", values.at("samples"));
    if (r.samples < 2) throw ConfigError("samples", "samples must be >= 2");
    if (has("window_before")) r.window_before = num("window_before");
    if (has("window_after")) r.window_after = num("window_after");
    if (has("steps_per_period")) r.steps_per_period = num("steps_per_period");
    if (!(r.steps_per_period > 0.0)) throw ConfigError("steps_per_period", "steps_per_period must be > 0");

    if (has("kappa_grid")) cfg.kappa_grid = parse_kappa_grid(values.at("kappa_grid"));

    r.sync_configuration();
    wrap("configuration", [&] { r.validate(); return 0; });
    return cfg;
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::vector<KeyValue> RunConfig::echo() const {
    const ProtocolRun& r = run;
    std::vector<KeyValue> out = {
        {"configuration", std::string(to_string(r.config))},
        {"omega_c", format_number(r.system.omega_c)},
        {"epsilon", format_number(r.system.epsilon)},
        {"epsilon_prime", format_number(r.system.epsilon_prime)},
        {"lambda", format_number(r.system.lambda)},
        {"lambda_prime", format_number(r.system.lambda_prime)},
        {"eg_coupling_form", std::string(to_string(r.system.eg_coupling_form))},
        {"n_max", std::to_string(r.system.n_max)},
        {"w_s", format_number(r.pulses.w_s_peak)},
        {"w_p", format_number(r.pulses.w_p_peak)},
        {"T", format_number(r.pulses.width)},
        {"tau", format_number(r.pulses.tau)},
        {"auto_carriers", r.auto_carriers ? "true" : "false"},
    };
    if (!r.auto_carriers) {
        out.emplace_back("omega_p", format_number(r.pulses.omega_p));
        out.emplace_back("omega_s", format_number(r.pulses.omega_s));
    }
    out.insert(out.end(), {
                              {"doublet_target", std::string(to_string(r.doublet_target))},
                              {"kappa", format_number(r.dissipation.kappa)},
                              {"gamma", format_number(r.dissipation.gamma)},
                              {"method", to_string(r.integrator.method)},
                              {"rel_tol", format_number(r.integrator.rel_tol)},
                              {"abs_tol", format_number(r.integrator.abs_tol)},
                              {"max_step", format_number(r.integrator.max_step)},
                              {"samples", std::to_string(r.samples)},
                              {"window_before", format_number(r.window_before)},
                              {"window_after", format_number(r.window_after)},
                              {"steps_per_period", format_number(r.steps_per_period)},
                          });
    if (!kappa_grid.empty()) {
        std::string grid;
        for (std::size_t i = 0; i < kappa_grid.size(); ++i) {
            if (i) grid += ",";
            grid += format_number(kappa_grid[i]);
        }
        out.emplace_back("kappa_grid", grid);
    }
    return out;
}

void write_metadata(std::ostream& out, const RunConfig& config) {
    out << "# uscprobe parameters (frequencies and rates in units of omega_c, times in 1/omega_c)\n";
    if (config.preset) out << "# preset: " << *config.preset << "\n";
    for (const auto& [key, value] : config.echo()) out << "# " << key << " = " << value << "\n";
}

void write_history_csv(std::ostream& out, const RunConfig& config, const PopulationHistory& h) {
    write_metadata(out, config);
    out << "# derived: omega_p " << format_number(h.carriers.omega_p) << ", omega_s "
        << format_number(h.carriers.omega_s) << "\n";
    for (const auto& w : h.warnings) out << "# warning: " << w << "\n";

    const bool lambda = h.config == Configuration::Lambda;
    const int fock_columns = std::min<int>(csv_fock_columns, static_cast<int>(h.fock_populations.size()));
    out << "time,p_0u,p_2u," << (lambda ? "p_phi0" : "p_doublet");
    for (int n = 0; n < fock_columns; ++n) out << ",p_fock_" << n;
    out << ",trace,purity,min_eig\n";
    const auto& middle = lambda ? h.p_phi0 : h.p_doublet;
    for (std::size_t i = 0; i < h.times.size(); ++i) {
        out << format_number(h.times[i]) << ',' << format_number(h.p_0u[i]) << ',' << format_number(h.p_2u[i])
            << ',' << format_number(middle[i]);
        for (int n = 0; n < fock_columns; ++n) out << ',' << format_number(h.fock_populations[n][i]);
        out << ',' << format_number(h.trace[i]) << ',' << format_number(h.purity[i]) << ','
            << format_number(h.min_eig[i]) << '\n';
    }
}

void write_scan_csv(std::ostream& out, const RunConfig& config, const std::vector<ScanPoint>& points) {
    write_metadata(out, config);
    out << "kappa_over_omega_c,efficiency,error\n";
    for (const auto& p : points) {
        std::string error = p.error.value_or("");
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        out << format_number(p.kappa) << ',' << (p.error ? "nan" : format_number(p.efficiency)) << ',' << error
            << '\n';
    }
}

void write_spectrum_csv(std::ostream& out, const RunConfig& config, const EigenSystem& es) {
    write_metadata(out, config);
    out << "# c_gN = <N g|state> with the first nonzero amplitude real positive (states are real)\n";
    const int amplitude_columns = std::min(csv_fock_columns, es.space.n_max());
    out << "index,energy,kind,label,u_population";
    for (int n = 0; n < amplitude_columns; ++n) out << ",c_g" << n;
    out << '\n';
    for (int k = 0; k < es.size(); ++k) {
        const StateLabel& label = es.labels[k];
        const char* kind = label.kind == StateLabel::Kind::rabi      ? "rabi"
                           : label.kind == StateLabel::Kind::ancilla ? "ancilla"
                                                                     : "mixed";
        out << k << ',' << format_number(es.energies(k)) << ',' << kind << ',' << label.index << ','
            << format_number(es.states.col(k).head(es.space.n_max()).squaredNorm());
        for (int n = 0; n < amplitude_columns; ++n) {
            out << ',' << format_number(es.states(es.space.index(AtomLevel::g, n), k).real());
        }
        out << '\n';
    }
}

void write_stray_csv(std::ostream& out, const RunConfig& config, const StrayReport& report) {
    write_metadata(out, config);
    out << "# summary: " << report.summary << "\n";
    out << "case,lambda,lambda_prime,eg_coupling_form,efficiency\n";
    for (const auto& c : report.cases) {
        out << c.label << ',' << format_number(c.lambda) << ',' << format_number(c.lambda_prime) << ','
            << to_string(c.form) << ',' << format_number(c.efficiency) << '\n';
    }
}

}  // namespace uscprobe
