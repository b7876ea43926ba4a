// SPDX-License-Identifier: Apache-2.0
//
// Configuration-driven sweeps over one scenario parameter, figure presets,
// and the closed-form / quadrature / Monte-Carlo validation report.
//
// Config files are JSON with units in the key names (avg_snr_db,
// epsilon0_bits). dB values are converted to linear exactly once, when a
// sweep point is resolved into a ScenarioConfig.
#pragma once

#include "rissec/monte_carlo.hpp"
#include "rissec/secrecy.hpp"
#include "rissec/water_table.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rissec {

double db_to_linear(double db);
double linear_to_db(double linear);

enum class MetricKind { Asc, SopExact, SopLower, Spsc };

std::string to_string(MetricKind m);

struct RisTemplate {
    double m_hop1 = 2.0;
    double m_hop2 = 2.0;
    double omega_hop1 = 1.0;
    double omega_hop2 = 1.0;
    unsigned elements = 2;
    double avg_snr_db = 0.0;

    bool operator==(const RisTemplate&) const = default;
};

struct UowcTemplate {
    /// Row of the water-condition table; may be empty when every turbulence
    /// parameter is given explicitly.
    std::string water_label;
    Detection detection = Detection::Heterodyne;
    double avg_snr_db = 10.0;
    // Explicit values win over the table row.
    std::optional<double> lambda, sigma, p, q, r, im_scale;

    bool operator==(const UowcTemplate&) const = default;
};

struct ScenarioTemplate {
    Scenario scenario = Scenario::I;
    double epsilon0_bits = 0.0;
    RisTemplate relay;
    RisTemplate eve;
    UowcTemplate uowc;

    bool operator==(const ScenarioTemplate&) const = default;
};

using ParamValue = std::variant<double, std::string>;

/// Sets a parameter by dotted path (see parameter_paths()). Throws
/// ConfigError(field) for unknown paths or ill-typed values.
void set_parameter(ScenarioTemplate& t, const std::string& path, const ParamValue& value,
                   const std::string& field = "");
const std::vector<std::string>& parameter_paths();

struct Axis {
    std::string path = "relay.avg_snr_db";
    /// Set to the same value as `path` (for example both element counts).
    std::vector<std::string> tied_paths;
    double start = 0.0;
    double stop = 30.0;
    unsigned points = 7;

    bool operator==(const Axis&) const = default;
};

struct Curve {
    std::string label;
    std::map<std::string, ParamValue> set;

    bool operator==(const Curve&) const = default;
};

struct McSettings {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    SamplingModel model = SamplingModel::Fitted;
    unsigned batches = 64;

    bool operator==(const McSettings&) const = default;
};

struct SweepConfig {
    std::string name;
    std::string description;
    std::vector<std::string> notes;
    ScenarioTemplate base;
    Axis axis;
    /// Empty means a single curve labelled "base".
    std::vector<Curve> curves;
    std::vector<MetricKind> metrics;
    std::vector<Method> methods;
    McSettings mc;
    unsigned max_terms = 200;
    bool experimental_exact_series = false;
    /// Empty: caller decides (stdout for the CLI).
    std::string output;
    /// Multiplies Psi of both optical branches on the analytic paths only.
    /// Fault injection for the validation report; 1 in real runs.
    double debug_psi_scale = 1.0;

    /// Throws ConfigError with the offending field path.
    void validate() const;
    bool operator==(const SweepConfig&) const = default;
};

SweepConfig parse_sweep_config(const std::string& json_text);
SweepConfig load_sweep_config(const std::filesystem::path& path);
std::string to_json(const SweepConfig& config);

std::vector<double> axis_grid(const Axis& axis);

struct SweepOptions {
    /// Required when any point names a water label.
    const WaterTable* table = nullptr;
    /// Placeholder table rows are refused unless this is set.
    bool allow_placeholder = false;
    /// 0 picks hardware concurrency.
    unsigned threads = 0;
};

/// Turns a template into a validated ScenarioConfig (dB to linear here).
ScenarioConfig resolve_scenario(const ScenarioTemplate& t, const SweepOptions& options);

struct CellResult {
    MetricKind metric = MetricKind::Asc;
    Method method = Method::Quadrature;
    MetricEstimate estimate;
    /// MC only: harmonic-form estimate.
    std::optional<McMetric> harmonic;
    /// Set when the computation threw or was disabled.
    std::string error;
    bool skipped = false;
};

struct PointResult {
    std::size_t curve_index = 0;
    std::string curve;
    double axis_value = 0.0;
    std::string water_source;
    std::vector<CellResult> cells;
    std::string error;
};

struct SweepResult {
    SweepConfig config;
    std::vector<PointResult> points;
    std::string generator;
};

/// Points run in parallel and are stored in (curve, axis) order.
SweepResult run_sweep(const SweepConfig& config, const SweepOptions& options);

void write_csv(const SweepResult& result, std::ostream& out);

std::vector<std::string> preset_names();
/// Throws ConfigError("preset") for unknown names.
SweepConfig figure_preset(const std::string& name);

struct ToleranceProfile {
    std::string name = "default";
    /// MC agreement band: k_sigma standard errors plus floor_events / n.
    double k_sigma = 3.0;
    double floor_events = 3.0;
    /// Closed form against quadrature, absolute.
    double closed_abs_tol = 1e-3;

    bool operator==(const ToleranceProfile&) const = default;
};

/// "default", "strict" or "loose"; throws ConfigError("profile") otherwise.
ToleranceProfile tolerance_profile(const std::string& name);

struct ValidationRow {
    std::string curve;
    double axis_value = 0.0;
    MetricKind metric = MetricKind::Asc;
    /// "closed", "quadrature" (against MC) or "closed_vs_quadrature".
    std::string comparison;
    double value = 0.0;
    double reference = 0.0;
    double deviation = 0.0;
    double allowed = 0.0;
    std::string status;  // pass, fail, skipped
    std::string reason;
};

struct ValidationReport {
    std::string config_name;
    ToleranceProfile profile;
    std::string generator;
    std::uint64_t seed = 0;
    std::vector<ValidationRow> rows;
    unsigned passed = 0;
    unsigned failed = 0;
    unsigned skipped = 0;

    bool ok() const { return failed == 0; }
    std::string to_json() const;
};

/// Runs the sweep with MC and quadrature forced on, then compares.
ValidationReport validate_sweep(const SweepConfig& config, const ToleranceProfile& profile,
                                const SweepOptions& options);

}  // namespace rissec
