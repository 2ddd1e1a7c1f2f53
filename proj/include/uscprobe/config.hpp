#pragma once

// Run configuration (presets, key = value files, --set overrides) and the
// CSV formats written by the command-line tool.

#include "uscprobe/protocol.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uscprobe {

// Raised for unknown keys, malformed values, missing required fields and
// unit-convention violations. key() names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& message)
        : std::invalid_argument(message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

using KeyValue = std::pair<std::string, std::string>;

struct RunConfig {
    std::optional<std::string> preset;
    std::vector<KeyValue> overrides;   // in application order, file entries first
    std::string output_path;

    ProtocolRun run;
    std::vector<double> kappa_grid;    // empty unless given or implied by a scan preset

    // Every physical parameter in omega_c-normalized units, as (key, value) pairs.
    std::vector<KeyValue> echo() const;
};

// Every key accepted in files and --set, with its section.
const std::vector<KeyValue>& known_keys();

// Reads `key = value` lines with optional [section] headers and # comments.
std::vector<KeyValue> read_config_file(const std::string& path);
std::vector<KeyValue> parse_config_text(const std::string& text, const std::string& origin = "<config>");

// Splits "key=value" as given to --set.
KeyValue parse_assignment(const std::string& text);

// Builds the run: preset (if any) first, then `entries` in order. Without a
// preset every required key must be present.
RunConfig parse_config(const std::optional<std::string>& preset, const std::vector<KeyValue>& entries);

// "1e-4,2e-3" or "log:1e-5:1e-2:13"; must be ascending.
std::vector<double> parse_kappa_grid(const std::string& text);

// %.12g
std::string format_number(double value);

void write_metadata(std::ostream& out, const RunConfig& config);
void write_history_csv(std::ostream& out, const RunConfig& config, const PopulationHistory& history);
void write_scan_csv(std::ostream& out, const RunConfig& config, const std::vector<ScanPoint>& points);
void write_spectrum_csv(std::ostream& out, const RunConfig& config, const EigenSystem& es);
void write_stray_csv(std::ostream& out, const RunConfig& config, const StrayReport& report);

// Number of Fock columns in the history CSV (p_fock_0 .. p_fock_4).
inline constexpr int csv_fock_columns = 5;

}  // namespace uscprobe
