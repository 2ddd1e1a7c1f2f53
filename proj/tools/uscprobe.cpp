// uscprobe: command-line front end.
//   run       population histories (CSV)
//   scan      efficiency against kappa (CSV)
//   spectrum  eigenvalues and virtual-photon amplitudes of the static Hamiltonian
//   falsify   stray-coupling comparison
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

#include "uscprobe/config.hpp"
#include "uscprobe/dynamics.hpp"
#include "uscprobe/protocol.hpp"
#include "uscprobe/spectrum.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace uscprobe;

constexpr int exit_usage = 1;
constexpr int exit_numerical = 2;

struct Options {
    std::string preset;
    std::string config_path;
    std::string out_path;
    std::vector<std::string> assignments;
    int jobs = 1;
    std::string configuration;  // falsify only
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig load(const Options& opt) {
    std::vector<KeyValue> entries;
    if (!opt.config_path.empty()) entries = read_config_file(opt.config_path);
    for (const auto& a : opt.assignments) entries.push_back(parse_assignment(a));
    std::optional<std::string> preset;
    if (!opt.preset.empty()) preset = opt.preset;
    RunConfig cfg = parse_config(preset, entries);
    cfg.output_path = opt.out_path;
    return cfg;
}

// Writes through a sibling ".partial" file that is renamed on success, so a
// failed run never leaves a truncated CSV under the requested name.
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    const std::string partial = path + ".partial";
    try {
        {
            std::ofstream out(partial, std::ios::trunc);
            if (!out) throw UsageError("cannot open '" + partial + "' for writing");
            body(out);
            out.flush();
            if (!out) throw std::runtime_error("write to '" + partial + "' failed");
        }
        std::filesystem::rename(partial, path);
    } catch (...) {
        std::error_code ignored;
        std::filesystem::remove(partial, ignored);
        throw;
    }
}

void report_history(const PopulationHistory& h) {
    std::cerr << "efficiency " << format_number(efficiency(h)) << " (" << h.accepted_steps << " steps, "
              << h.rejected_steps << " rejected)\n";
    for (const auto& w : h.warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_run(const Options& opt) {
    const RunConfig cfg = load(opt);
    PopulationHistory h;
    emit(cfg.output_path, [&](std::ostream& out) {
        h = run(cfg.run);
        write_history_csv(out, cfg, h);
    });
    report_history(h);
    return 0;
}

int cmd_scan(const Options& opt) {
    RunConfig cfg = load(opt);
    if (cfg.kappa_grid.empty()) cfg.kappa_grid = default_kappa_grid();
    bool failed = false;
    emit(cfg.output_path, [&](std::ostream& out) {
        const auto points = kappa_scan(cfg.run, cfg.kappa_grid, opt.jobs);
        for (const auto& p : points) {
            if (p.error) {
                failed = true;
                std::cerr << "kappa " << format_number(p.kappa) << ": " << *p.error << "\n";
            }
        }
        write_scan_csv(out, cfg, points);
    });
    return failed ? exit_numerical : 0;
}

int cmd_spectrum(const Options& opt) {
    const RunConfig cfg = load(opt);
    const SystemParams& sys = cfg.run.system;
    emit(cfg.output_path, [&](std::ostream& out) {
        const EigenSystem es = diagonalize(assemble_static(sys) + assemble_stray(sys), sys.space());
        write_spectrum_csv(out, cfg, es);
    });
    return 0;
}

int cmd_falsify(const Options& opt) {
    std::optional<ProtocolRun> base;
    RunConfig cfg;
    Configuration config = Configuration::Lambda;
    const bool configured = !opt.preset.empty() || !opt.config_path.empty() || !opt.assignments.empty();
    if (configured) {
        cfg = load(opt);
        base = cfg.run;
        config = cfg.run.config;
        if (!opt.configuration.empty() && parse_configuration(opt.configuration) != config) {
            throw UsageError("--configuration disagrees with the preset/config");
        }
    } else {
        if (!opt.configuration.empty()) config = parse_configuration(opt.configuration);
        cfg = parse_config(config == Configuration::Lambda ? "fig1b" : "fig3a", {});
        cfg.output_path = opt.out_path;
    }
    StrayReport report;
    emit(opt.out_path, [&](std::ostream& out) {
        report = stray_falsification(config, base, opt.jobs);
        write_stray_csv(out, cfg, report);
    });
    std::cerr << report.summary << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Driven three-level atom in an ultrastrongly coupled cavity: STIRAP simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "uscprobe 0.1.0");

    Options opt;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--preset", opt.preset, "Named parameter preset")
            ->check(CLI::IsMember(preset_names()));
        sub->add_option("--config", opt.config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_path, "Output CSV path (default: stdout)");
        sub->add_option("--set", opt.assignments, "Override one key, key=value (repeatable)")
            ->expected(1)
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        sub->add_option("--jobs", opt.jobs, "Concurrent runs for scan/falsify")->check(CLI::PositiveNumber);
    };

    auto* run_cmd = app.add_subcommand("run", "Integrate one protocol and write population histories");
    auto* scan_cmd = app.add_subcommand("scan", "Efficiency against cavity loss rate");
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Eigenvalues and c_0n amplitudes of the static Hamiltonian");
    auto* falsify_cmd = app.add_subcommand("falsify", "Compare the USC channel against stray couplings");
    for (auto* sub : {run_cmd, scan_cmd, spectrum_cmd, falsify_cmd}) add_common(sub);
    falsify_cmd->add_option("--configuration", opt.configuration, "lambda or vee when no preset is given")
        ->check(CLI::IsMember({"lambda", "vee"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Error& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (*run_cmd) return cmd_run(opt);
        if (*scan_cmd) return cmd_scan(opt);
        if (*spectrum_cmd) return cmd_spectrum(opt);
        if (*falsify_cmd) return cmd_falsify(opt);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error";
        if (!e.key().empty()) std::cerr << " [" << e.key() << "]";
        std::cerr << ": " << e.what() << "\n";
        return exit_usage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const IntegrationError& e) {
        std::cerr << "numerical failure at t = " << e.time() << ": " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
    return exit_usage;
}
