#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intertwine/verify.hpp"

namespace itw {

// Raised for anything wrong with a scenario config: malformed JSON, unknown
// keys, missing keys, bad types, out-of-range values, or a check attached to
// a family that cannot serve it. Carries the offending key and a line number
// into the original text so the CLI can point at the problem.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, std::string key, const std::string& what_arg);

    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

struct ScenarioResult {
    std::string name;
    std::vector<VerificationReport> reports;
    // Labelled field series produced along the way (source, mapped image,
    // propagated packet, density, ...), in production order.
    std::vector<std::pair<std::string, Snapshots>> fields;

    bool passed() const;
};

// Parses and runs a scenario. `source_name` labels diagnostics (a file path
// or a builtin name). `tol_override`, when set, replaces the tolerance of
// every check in the config.
ScenarioResult run_scenario(const std::string& json_text, const std::string& source_name,
                            std::optional<double> tol_override = std::nullopt);

const std::vector<std::string>& builtin_scenario_names();
bool is_builtin_scenario(const std::string& name);
std::string builtin_scenario_text(const std::string& name);
std::string builtin_scenario_summary(const std::string& name);

// One CSV per field series: header "x,t,re,im", row-major over stored times
// then grid points, 17 significant digits.
void write_field_csv(const Snapshots& s, std::ostream& os);

// Single JSON document mirroring the verification reports.
void write_report_json(const ScenarioResult& r, std::ostream& os);

// gnuplot script that plots the final stored snapshot of each series from
// the CSVs written next to it. Never invokes gnuplot.
void write_plot_script(const ScenarioResult& r, std::ostream& os);

} // namespace itw
