// SPDX-License-Identifier: Apache-2.0
//
// rissec: sweeps, figure presets, validation reports and Monte-Carlo runs.
//
// Exit status: 0 ok, 1 validation failure, 2 configuration or usage error,
// 3 unexpected runtime error.
#include "rissec/errors.hpp"
#include "rissec/monte_carlo.hpp"
#include "rissec/sweep.hpp"
#include "rissec/water_table.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

namespace {

using namespace rissec;

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Common {
    std::string water_table;
    bool allow_placeholder = false;
    unsigned threads = 0;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--water-table", c.water_table, "water-condition JSON (default: $RISSEC_WATER_TABLE or the shipped file)");
    cmd->add_flag("--allow-placeholder", c.allow_placeholder, "accept placeholder rows of the water table");
    cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
    cmd->add_option("--samples", c.samples, "override mc.samples");
    cmd->add_option("--seed", c.seed, "override mc.seed");
}

// Keeps the table alive for SweepOptions. A missing default file is not an
// error until some point actually needs a water label.
struct Context {
    std::optional<WaterTable> table;
    SweepOptions options;

    explicit Context(const Common& c) {
        if (!c.water_table.empty()) {
            table = WaterTable::load(c.water_table);
        } else {
            const auto path = WaterTable::default_path();
            if (std::filesystem::exists(path)) table = WaterTable::load(path);
        }
        options.table = table ? &*table : nullptr;
        options.allow_placeholder = c.allow_placeholder;
        options.threads = c.threads;
    }
};

SweepConfig load_config(const std::string& arg, const Common& c) {
    SweepConfig cfg;
    if (std::filesystem::exists(arg)) {
        cfg = load_sweep_config(arg);
    } else {
        const auto names = preset_names();
        if (std::find(names.begin(), names.end(), arg) == names.end()) {
            throw ConfigError("", "no config file or preset named \"" + arg + "\"");
        }
        cfg = figure_preset(arg);
    }
    if (c.samples) cfg.mc.samples = *c.samples;
    if (c.seed) cfg.mc.seed = *c.seed;
    cfg.validate();
    return cfg;
}

// Writes to `path` only after the content exists, so failures leave no file.
void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output", "cannot open " + path + " for writing");
    out << text;
}

std::string sweep_csv(const SweepConfig& cfg, const SweepOptions& opt) {
    const SweepResult r = run_sweep(cfg, opt);
    std::ostringstream ss;
    write_csv(r, ss);
    return ss.str();
}

std::string mc_report_json(const McReport& r, const ScenarioConfig& s) {
    using nlohmann::ordered_json;
    auto metrics = [](const McMetrics& m) {
        auto one = [](const McMetric& x) { return ordered_json{{"mean", x.mean}, {"std_error", x.std_error}}; };
        return ordered_json{{"asc_nats", one(m.asc)},
                            {"asc_bits", {{"mean", m.asc.mean / std::numbers::ln2},
                                          {"std_error", m.asc.std_error / std::numbers::ln2}}},
                            {"sop_exact", one(m.sop_exact)},
                            {"sop_lower", one(m.sop_lower)},
                            {"spsc", one(m.spsc)}};
    };
    ordered_json j;
    j["generator"] = r.generator;
    j["seed"] = r.seed;
    j["samples"] = r.samples;
    j["batches"] = r.batches;
    j["scenario"] = to_string(r.scenario);
    j["model"] = to_string(r.model);
    j["epsilon0_bits"] = s.epsilon0_bits;
    j["min_form"] = metrics(r.min_form);
    j["harmonic_form"] = metrics(r.harmonic_form);
    j["harmonic_minus_min"] = {{"asc_nats", r.harmonic_form.asc.mean - r.min_form.asc.mean},
                               {"sop_exact", r.harmonic_form.sop_exact.mean - r.min_form.sop_exact.mean},
                               {"sop_lower", r.harmonic_form.sop_lower.mean - r.min_form.sop_lower.mean},
                               {"spsc", r.harmonic_form.spsc.mean - r.min_form.spsc.mean}};
    return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secrecy metrics of RIS-aided RF / underwater optical links"};
    app.require_subcommand(1);

    Common common;
    std::string config_arg, out_path, preset_name, profile = "default";
    bool emit_config = false;
    bool physical = false;

    auto* sweep = app.add_subcommand("sweep", "run a sweep config and write CSV");
    sweep->add_option("config", config_arg, "config file (or preset name)")->required();
    sweep->add_option("--out", out_path, "CSV path (default: config output, else stdout)");
    add_common(sweep, common);

    auto* preset = app.add_subcommand("preset", "run (or print) a figure preset");
    preset->add_option("name", preset_name, "fig2 ... fig13, asc_s1_s2, spsc_gm1")->required();
    preset->add_option("--out", out_path, "output path (default stdout)");
    preset->add_flag("--emit-config", emit_config, "print the preset config instead of running it");
    add_common(preset, common);

    auto* validate = app.add_subcommand("validate", "compare closed form and quadrature against MC");
    validate->add_option("config", config_arg, "config file (or preset name)")->required();
    validate->add_option("--profile", profile, "tolerance profile: default, strict, loose");
    validate->add_option("--out", out_path, "report path (default stdout)");
    add_common(validate, common);

    auto* mc = app.add_subcommand("mc", "Monte-Carlo estimate at the config template point");
    mc->add_option("config", config_arg, "config file (or preset name)")->required();
    mc->add_flag("--physical", physical, "sample the physical element sums instead of the fitted law");
    mc->add_option("--out", out_path, "report path (default stdout)");
    add_common(mc, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (preset->parsed()) {
            SweepConfig cfg = figure_preset(preset_name);
            if (common.samples) cfg.mc.samples = *common.samples;
            if (common.seed) cfg.mc.seed = *common.seed;
            if (emit_config) {
                emit(to_json(cfg), out_path);
                return kOk;
            }
            Context ctx(common);
            emit(sweep_csv(cfg, ctx.options), out_path);
            return kOk;
        }
        if (sweep->parsed()) {
            const SweepConfig cfg = load_config(config_arg, common);
            Context ctx(common);
            emit(sweep_csv(cfg, ctx.options), out_path.empty() ? cfg.output : out_path);
            return kOk;
        }
        if (validate->parsed()) {
            const SweepConfig cfg = load_config(config_arg, common);
            const ToleranceProfile tp = tolerance_profile(profile);
            Context ctx(common);
            const ValidationReport rep = validate_sweep(cfg, tp, ctx.options);
            emit(rep.to_json(), out_path);
            std::cerr << "validate " << cfg.name << ": " << rep.passed << " pass, " << rep.failed << " fail, "
                      << rep.skipped << " skipped\n";
            for (const ValidationRow& r : rep.rows) {
                if (r.status == "fail") {
                    std::cerr << "  FAIL " << to_string(r.metric) << " " << r.comparison << " curve \"" << r.curve
                              << "\" at " << r.axis_value << ": deviation " << r.deviation << " (allowed "
                              << r.allowed << ") " << r.reason << "\n";
                }
            }
            return rep.ok() ? kOk : kValidationFailed;
        }
        if (mc->parsed()) {
            SweepConfig cfg = load_config(config_arg, common);
            Context ctx(common);
            ScenarioConfig s = resolve_scenario(cfg.base, ctx.options);
            s.samples = cfg.mc.samples;
            s.seed = cfg.mc.seed;
            s.batches = cfg.mc.batches;
            s.model = physical ? SamplingModel::Physical : cfg.mc.model;
            s.threads = common.threads;
            try {
                s.validate();
            } catch (const DomainError& e) {
                throw ConfigError("mc.model", e.what());
            }
            emit(mc_report_json(estimate_metrics(s), s), out_path);
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kConfigError;
}
