// SPDX-License-Identifier: Apache-2.0
#include "rissec/sweep.hpp"

#include "rissec/errors.hpp"
#include "rissec/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace rissec {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

std::string to_string(MetricKind m) {
    switch (m) {
        case MetricKind::Asc: return "asc";
        case MetricKind::SopExact: return "sop_exact";
        case MetricKind::SopLower: return "sop_lower";
        case MetricKind::Spsc: return "spsc";
    }
    return "unknown";
}

namespace {

constexpr const char* kSchema = "rissec-sweep/1";

MetricKind metric_from_string(const std::string& s, const std::string& field) {
    for (MetricKind m : {MetricKind::Asc, MetricKind::SopExact, MetricKind::SopLower, MetricKind::Spsc}) {
        if (to_string(m) == s) return m;
    }
    throw ConfigError(field, "unknown metric \"" + s + "\" (asc, sop_exact, sop_lower, spsc)");
}

Method method_from_string(const std::string& s, const std::string& field) {
    for (Method m : {Method::ClosedForm, Method::Quadrature, Method::MonteCarlo}) {
        if (to_string(m) == s) return m;
    }
    throw ConfigError(field, "unknown method \"" + s + "\" (closed, quadrature, mc)");
}

Scenario scenario_from_string(const std::string& s, const std::string& field) {
    if (s == "I") return Scenario::I;
    if (s == "II") return Scenario::II;
    throw ConfigError(field, "expected \"I\" or \"II\"");
}

SamplingModel model_from_string(const std::string& s, const std::string& field) {
    if (s == "physical") return SamplingModel::Physical;
    if (s == "fitted") return SamplingModel::Fitted;
    throw ConfigError(field, "expected \"physical\" or \"fitted\"");
}

std::string to_string(Detection d) { return d == Detection::Heterodyne ? "HD" : "IM/DD"; }

Detection detection_from_value(const ParamValue& v, const std::string& field) {
    if (const auto* s = std::get_if<std::string>(&v)) {
        if (*s == "HD") return Detection::Heterodyne;
        if (*s == "IM/DD") return Detection::IntensityModulation;
    } else {
        const double d = std::get<double>(v);
        if (d == 1.0) return Detection::Heterodyne;
        if (d == 2.0) return Detection::IntensityModulation;
    }
    throw ConfigError(field, "detection must be \"HD\" (s = 1) or \"IM/DD\" (s = 2)");
}

std::string join_field(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

double as_number(const ParamValue& v, const std::string& field) {
    if (const auto* d = std::get_if<double>(&v)) {
        if (!std::isfinite(*d)) throw ConfigError(field, "must be finite");
        return *d;
    }
    throw ConfigError(field, "expected a number");
}

const std::string& as_string(const ParamValue& v, const std::string& field) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigError(field, "expected a string");
}

unsigned as_count(const ParamValue& v, const std::string& field) {
    const double d = as_number(v, field);
    if (d < 1.0 || d != std::floor(d) || d > 1e6) throw ConfigError(field, "expected a positive integer");
    return static_cast<unsigned>(d);
}

bool set_ris(RisTemplate& r, const std::string& key, const ParamValue& v, const std::string& field) {
    if (key == "m_hop1") r.m_hop1 = as_number(v, field);
    else if (key == "m_hop2") r.m_hop2 = as_number(v, field);
    else if (key == "omega_hop1") r.omega_hop1 = as_number(v, field);
    else if (key == "omega_hop2") r.omega_hop2 = as_number(v, field);
    else if (key == "elements") r.elements = as_count(v, field);
    else if (key == "avg_snr_db") r.avg_snr_db = as_number(v, field);
    else return false;
    return true;
}

bool set_uowc(UowcTemplate& u, const std::string& key, const ParamValue& v, const std::string& field) {
    if (key == "water_label") u.water_label = as_string(v, field);
    else if (key == "detection") u.detection = detection_from_value(v, field);
    else if (key == "avg_snr_db") u.avg_snr_db = as_number(v, field);
    else if (key == "lambda") u.lambda = as_number(v, field);
    else if (key == "sigma") u.sigma = as_number(v, field);
    else if (key == "p") u.p = as_number(v, field);
    else if (key == "q") u.q = as_number(v, field);
    else if (key == "r") u.r = as_number(v, field);
    else if (key == "im_scale") u.im_scale = as_number(v, field);
    else return false;
    return true;
}

// ---------------------------------------------------------------------------
// strict JSON reading

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return join_field(path_, key); }

    const json* get(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = get(key);
        if (v == nullptr) return fallback;
        if (!v->is_number()) throw ConfigError(field(key), "expected a number");
        const double d = v->get<double>();
        if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
        return d;
    }

    std::optional<double> optional_number(const std::string& key) {
        if (j_.find(key) == j_.end()) {
            seen_.insert(key);
            return std::nullopt;
        }
        return number(key, 0.0);
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) {
        const json* v = get(key);
        if (v == nullptr) return fallback;
        if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
            throw ConfigError(field(key), "expected a non-negative integer");
        }
        return v->get<std::uint64_t>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = get(key);
        if (v == nullptr) return fallback;
        if (!v->is_string()) throw ConfigError(field(key), "expected a string");
        return v->get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = get(key);
        if (v == nullptr) return fallback;
        if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
        return v->get<bool>();
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) {
                throw ConfigError(field(item.key()), "unknown key (units belong in key names, e.g. avg_snr_db)");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

ParamValue param_from_json(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    throw ConfigError(field, "expected a number or a string");
}

RisTemplate read_ris(const json& j, const std::string& path) {
    Reader r(j, path);
    RisTemplate t;
    t.m_hop1 = r.number("m_hop1", t.m_hop1);
    t.m_hop2 = r.number("m_hop2", t.m_hop2);
    t.omega_hop1 = r.number("omega_hop1", t.omega_hop1);
    t.omega_hop2 = r.number("omega_hop2", t.omega_hop2);
    const std::uint64_t s = r.count("elements", t.elements);
    if (s < 1 || s > 1000000) throw ConfigError(r.field("elements"), "expected a positive integer");
    t.elements = static_cast<unsigned>(s);
    t.avg_snr_db = r.number("avg_snr_db", t.avg_snr_db);
    r.finish();
    return t;
}

UowcTemplate read_uowc(const json& j, const std::string& path) {
    Reader r(j, path);
    UowcTemplate t;
    t.water_label = r.string("water_label", "");
    if (const json* d = r.get("detection")) t.detection = detection_from_value(param_from_json(*d, r.field("detection")), r.field("detection"));
    t.avg_snr_db = r.number("avg_snr_db", t.avg_snr_db);
    t.lambda = r.optional_number("lambda");
    t.sigma = r.optional_number("sigma");
    t.p = r.optional_number("p");
    t.q = r.optional_number("q");
    t.r = r.optional_number("r");
    t.im_scale = r.optional_number("im_scale");
    r.finish();
    return t;
}

ScenarioTemplate read_template(const json& j, const std::string& path) {
    Reader r(j, path);
    ScenarioTemplate t;
    t.scenario = scenario_from_string(r.string("scenario", "I"), r.field("scenario"));
    t.epsilon0_bits = r.number("epsilon0_bits", 0.0);
    if (const json* v = r.get("relay")) t.relay = read_ris(*v, r.field("relay"));
    if (const json* v = r.get("eve")) t.eve = read_ris(*v, r.field("eve"));
    if (const json* v = r.get("uowc")) t.uowc = read_uowc(*v, r.field("uowc"));
    r.finish();
    return t;
}

ojson ris_to_json(const RisTemplate& t) {
    ojson j;
    j["m_hop1"] = t.m_hop1;
    j["m_hop2"] = t.m_hop2;
    j["omega_hop1"] = t.omega_hop1;
    j["omega_hop2"] = t.omega_hop2;
    j["elements"] = t.elements;
    j["avg_snr_db"] = t.avg_snr_db;
    return j;
}

ojson uowc_to_json(const UowcTemplate& t) {
    ojson j;
    if (!t.water_label.empty()) j["water_label"] = t.water_label;
    j["detection"] = to_string(t.detection);
    j["avg_snr_db"] = t.avg_snr_db;
    auto opt = [&](const char* k, const std::optional<double>& v) {
        if (v) j[k] = *v;
    };
    opt("lambda", t.lambda);
    opt("sigma", t.sigma);
    opt("p", t.p);
    opt("q", t.q);
    opt("r", t.r);
    opt("im_scale", t.im_scale);
    return j;
}

ojson param_to_json(const ParamValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::get<std::string>(v);
}

// ---------------------------------------------------------------------------

bool is_db_path(const std::string& path) { return path.size() > 3 && path.ends_with("_db"); }

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// splitmix64 finalizer; decorrelates per-point MC seeds.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t curve, std::size_t point) {
    return mix(seed ^ mix((static_cast<std::uint64_t>(curve) << 32) | point));
}

struct Resolved {
    ScenarioConfig scenario;
    std::string water_source;
};

Resolved resolve(const ScenarioTemplate& t, const SweepOptions& options) {
    Resolved out;
    ScenarioConfig& s = out.scenario;
    s.scenario = t.scenario;
    s.epsilon0_bits = t.epsilon0_bits;
    auto ris = [](const RisTemplate& r) {
        return RisLinkSpec{r.m_hop1, r.m_hop2, r.omega_hop1, r.omega_hop2, r.elements, db_to_linear(r.avg_snr_db)};
    };
    s.relay_link = ris(t.relay);
    s.eve_link = ris(t.eve);

    const UowcTemplate& u = t.uowc;
    UowcLinkSpec spec;
    const bool all_explicit = u.lambda && u.sigma && u.p && u.q && u.r;
    if (!u.water_label.empty()) {
        if (options.table == nullptr) throw ConfigError("uowc.water_label", "no water-condition table loaded");
        const WaterRecord* rec = nullptr;
        try {
            rec = &options.table->find(u.water_label);
        } catch (const ConfigError& e) {
            throw ConfigError("uowc.water_label", e.message());
        }
        if (rec->placeholder() && !all_explicit && !options.allow_placeholder) {
            throw ConfigError("uowc.water_label",
                              "row \"" + rec->label + "\" of " + options.table->origin() +
                                  " holds placeholder values; requires external table values: transcribe the "
                                  "measured mEGG parameters into that file (or set RISSEC_WATER_TABLE to a "
                                  "transcribed copy), or opt in to placeholders explicitly");
        }
        spec = with_water(spec, *rec);
        out.water_source = all_explicit ? "explicit" : rec->source;
    } else if (all_explicit) {
        out.water_source = "explicit";
    } else {
        throw ConfigError("uowc", "give water_label or all of lambda, sigma, p, q, r");
    }
    if (u.lambda) spec.lambda = *u.lambda;
    if (u.sigma) spec.sigma = *u.sigma;
    if (u.p) spec.p = *u.p;
    if (u.q) spec.q = *u.q;
    if (u.r) spec.r = *u.r;
    spec.im_scale = u.im_scale;
    spec.detection = u.detection;
    spec.avg_snr = db_to_linear(u.avg_snr_db);
    s.uowc_link = spec;
    // The analytic paths treat the hops as independent in both scenarios;
    // the shared-first-hop check only binds physical sampling (run_sweep).
    s.model = SamplingModel::Fitted;
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw ConfigError("template", e.what());
    }
    return out;
}

ScenarioTemplate point_template(const SweepConfig& cfg, std::size_t curve, double x) {
    ScenarioTemplate t = cfg.base;
    if (!cfg.curves.empty()) {
        const std::string f = "curves[" + std::to_string(curve) + "].set";
        for (const auto& [path, value] : cfg.curves[curve].set) set_parameter(t, path, value, join_field(f, path));
    }
    set_parameter(t, cfg.axis.path, x, "axis.path");
    for (const std::string& p : cfg.axis.tied_paths) set_parameter(t, p, x, "axis.tied_paths");
    return t;
}

MetricEstimate mc_estimate(const McMetric& m) {
    MetricEstimate e;
    e.method = Method::MonteCarlo;
    e.value = m.mean;
    e.std_error = m.std_error;
    return e;
}

const McMetric& pick(const McMetrics& f, MetricKind k) {
    switch (k) {
        case MetricKind::Asc: return f.asc;
        case MetricKind::SopExact: return f.sop_exact;
        case MetricKind::SopLower: return f.sop_lower;
        case MetricKind::Spsc: return f.spsc;
    }
    return f.asc;
}

MetricEstimate analytic(MetricKind metric, Method method, const RisCoefficients& R, const UowcCoefficients& U,
                        const EveCoefficients& E, const SecrecyQuery& q, bool experimental) {
    if (method == Method::Quadrature) {
        switch (metric) {
            case MetricKind::Asc: return asc_quadrature(R, U, E);
            case MetricKind::SopExact: return sop_exact_quadrature(R, U, E, q);
            case MetricKind::SopLower: return sop_lower_quadrature(R, U, E, q);
            case MetricKind::Spsc: return spsc(R, U, E);
        }
    }
    switch (metric) {
        case MetricKind::Asc: return asc_closed(R, U, E, q);
        case MetricKind::SopExact: return sop_exact_series(R, U, E, q, experimental);
        case MetricKind::SopLower: return sop_lower_closed(R, U, E, q);
        case MetricKind::Spsc: return spsc_closed(R, U, E, q);
    }
    throw DomainError("unreachable metric");
}

PointResult evaluate(const SweepConfig& cfg, const Resolved& res, std::size_t curve, std::size_t k, double x) {
    PointResult p;
    p.curve_index = curve;
    p.curve = cfg.curves.empty() ? "base" : cfg.curves[curve].label;
    p.axis_value = x;
    p.water_source = res.water_source;
    const ScenarioConfig& sc = res.scenario;

    const bool want_mc = std::find(cfg.methods.begin(), cfg.methods.end(), Method::MonteCarlo) != cfg.methods.end();
    std::optional<McReport> mc;
    std::string mc_error;
    if (want_mc) {
        ScenarioConfig m = sc;
        m.samples = cfg.mc.samples;
        m.seed = point_seed(cfg.mc.seed, curve, k);
        m.model = cfg.mc.model;
        m.batches = cfg.mc.batches;
        m.threads = 1;
        try {
            mc = estimate_metrics(m);
        } catch (const std::exception& e) {
            mc_error = e.what();
        }
    }

    RisCoefficients R, E;
    UowcCoefficients U;
    std::string coef_error;
    try {
        R = ris_coefficients(sc.relay_link);
        E = ris_coefficients(sc.eve_link);
        U = uowc_coefficients(sc.uowc_link);
        for (UowcBranch& b : U.branch) b.Psi *= cfg.debug_psi_scale;
    } catch (const std::exception& e) {
        coef_error = e.what();
    }
    SecrecyQuery q;
    q.epsilon0_bits = sc.epsilon0_bits;
    q.max_terms = cfg.max_terms;

    for (MetricKind metric : cfg.metrics) {
        for (Method method : cfg.methods) {
            CellResult c;
            c.metric = metric;
            c.method = method;
            c.estimate.method = method;
            if (method == Method::MonteCarlo) {
                if (mc) {
                    c.estimate = mc_estimate(pick(mc->min_form, metric));
                    c.harmonic = pick(mc->harmonic_form, metric);
                } else {
                    c.error = mc_error;
                }
            } else if (!coef_error.empty()) {
                c.error = coef_error;
            } else if (method == Method::ClosedForm && metric == MetricKind::SopExact && !cfg.experimental_exact_series) {
                c.skipped = true;
                c.error = "exact-SOP series disabled (experimental)";
            } else {
                try {
                    c.estimate = analytic(metric, method, R, U, E, q, cfg.experimental_exact_series);
                } catch (const std::exception& e) {
                    c.error = e.what();
                }
            }
            if (!c.error.empty()) {
                c.estimate.value = std::numeric_limits<double>::quiet_NaN();
                c.estimate.converged = false;
            }
            p.cells.push_back(std::move(c));
        }
    }
    return p;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& parameter_paths() {
    static const std::vector<std::string> paths = [] {
        std::vector<std::string> v{"scenario", "epsilon0_bits"};
        for (const char* link : {"relay", "eve"}) {
            for (const char* k : {"m_hop1", "m_hop2", "omega_hop1", "omega_hop2", "elements", "avg_snr_db"}) {
                v.push_back(std::string(link) + "." + k);
            }
        }
        for (const char* k : {"water_label", "detection", "avg_snr_db", "lambda", "sigma", "p", "q", "r", "im_scale"}) {
            v.push_back(std::string("uowc.") + k);
        }
        return v;
    }();
    return paths;
}

void set_parameter(ScenarioTemplate& t, const std::string& path, const ParamValue& value, const std::string& field) {
    const std::string f = field.empty() ? path : field;
    if (path == "scenario") {
        t.scenario = scenario_from_string(as_string(value, f), f);
        return;
    }
    if (path == "epsilon0_bits") {
        t.epsilon0_bits = as_number(value, f);
        return;
    }
    const auto dot = path.find('.');
    if (dot != std::string::npos) {
        const std::string head = path.substr(0, dot);
        const std::string key = path.substr(dot + 1);
        if (head == "relay" && set_ris(t.relay, key, value, f)) return;
        if (head == "eve" && set_ris(t.eve, key, value, f)) return;
        if (head == "uowc" && set_uowc(t.uowc, key, value, f)) return;
    }
    throw ConfigError(f, "unknown parameter path \"" + path + "\"");
}

void SweepConfig::validate() const {
    if (metrics.empty()) throw ConfigError("metrics", "at least one metric is required");
    if (methods.empty()) throw ConfigError("methods", "at least one method is required");
    if (axis.points < 2) throw ConfigError("axis.points", "need at least 2 grid points");
    if (!std::isfinite(axis.start) || !std::isfinite(axis.stop) || axis.start == axis.stop) {
        throw ConfigError("axis", "start and stop must be finite and distinct");
    }
    const auto& paths = parameter_paths();
    auto known = [&](const std::string& p) { return std::find(paths.begin(), paths.end(), p) != paths.end(); };
    if (!known(axis.path)) throw ConfigError("axis.path", "unknown parameter path \"" + axis.path + "\"");
    // The axis carries numbers only.
    for (const char* s : {"scenario", "uowc.water_label", "uowc.detection"}) {
        if (axis.path == s) throw ConfigError("axis.path", "axis must be a numeric parameter");
    }
    for (std::size_t i = 0; i < axis.tied_paths.size(); ++i) {
        if (!known(axis.tied_paths[i])) {
            throw ConfigError("axis.tied_paths[" + std::to_string(i) + "]", "unknown parameter path");
        }
    }
    std::set<std::string> labels;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const std::string f = "curves[" + std::to_string(i) + "]";
        if (curves[i].label.empty()) throw ConfigError(f + ".label", "curve label is required");
        if (!labels.insert(curves[i].label).second) throw ConfigError(f + ".label", "duplicate curve label");
        ScenarioTemplate scratch = base;
        for (const auto& [path, value] : curves[i].set) set_parameter(scratch, path, value, f + ".set." + path);
    }
    {
        ScenarioTemplate scratch = base;
        set_parameter(scratch, axis.path, axis.start, "axis.path");
    }
    if (mc.samples < 1) throw ConfigError("mc.samples", "must be positive");
    if (mc.batches < 2) throw ConfigError("mc.batches", "need at least 2 batches for a standard error");
    if (max_terms < 1) throw ConfigError("series.max_terms", "must be positive");
    if (!(debug_psi_scale > 0.0) || !std::isfinite(debug_psi_scale)) {
        throw ConfigError("debug.psi_scale", "must be positive");
    }
    if (!(base.epsilon0_bits >= 0.0)) throw ConfigError("template.epsilon0_bits", "must be non-negative");
}

SweepConfig parse_sweep_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    Reader r(doc, "");
    SweepConfig c;
    const std::string schema = r.string("schema", kSchema);
    if (schema != kSchema) throw ConfigError("schema", "expected \"" + std::string(kSchema) + "\"");
    c.name = r.string("name", "");
    c.description = r.string("description", "");
    if (const json* n = r.get("notes")) {
        if (!n->is_array()) throw ConfigError("notes", "expected an array of strings");
        for (const auto& s : *n) {
            if (!s.is_string()) throw ConfigError("notes", "expected an array of strings");
            c.notes.push_back(s.get<std::string>());
        }
    }
    const json* tmpl = r.get("template");
    if (tmpl == nullptr) throw ConfigError("template", "missing scenario template");
    c.base = read_template(*tmpl, "template");

    const json* ax = r.get("axis");
    if (ax == nullptr) throw ConfigError("axis", "missing sweep axis");
    {
        Reader a(*ax, "axis");
        c.axis.path = a.string("path", "");
        if (c.axis.path.empty()) throw ConfigError("axis.path", "missing parameter path");
        if (const json* t = a.get("tied_paths")) {
            if (!t->is_array()) throw ConfigError("axis.tied_paths", "expected an array of paths");
            for (const auto& p : *t) {
                if (!p.is_string()) throw ConfigError("axis.tied_paths", "expected an array of paths");
                c.axis.tied_paths.push_back(p.get<std::string>());
            }
        }
        if (a.get("start") == nullptr) throw ConfigError("axis.start", "missing number");
        if (a.get("stop") == nullptr) throw ConfigError("axis.stop", "missing number");
        c.axis.start = a.number("start", 0.0);
        c.axis.stop = a.number("stop", 0.0);
        const std::uint64_t pts = a.count("points", 0);
        if (pts > 100000) throw ConfigError("axis.points", "too many points");
        c.axis.points = static_cast<unsigned>(pts);
        a.finish();
    }

    if (const json* cv = r.get("curves")) {
        if (!cv->is_array()) throw ConfigError("curves", "expected an array");
        for (std::size_t i = 0; i < cv->size(); ++i) {
            const std::string f = "curves[" + std::to_string(i) + "]";
            Reader cr((*cv)[i], f);
            Curve curve;
            curve.label = cr.string("label", "");
            if (const json* s = cr.get("set")) {
                if (!s->is_object()) throw ConfigError(f + ".set", "expected an object of path: value");
                for (const auto& item : s->items()) {
                    curve.set[item.key()] = param_from_json(item.value(), f + ".set." + item.key());
                }
            }
            cr.finish();
            c.curves.push_back(std::move(curve));
        }
    }

    auto string_list = [&](const char* key) {
        std::vector<std::string> out;
        const json* v = r.get(key);
        if (v == nullptr) return out;
        if (!v->is_array()) throw ConfigError(key, "expected an array of strings");
        for (const auto& s : *v) {
            if (!s.is_string()) throw ConfigError(key, "expected an array of strings");
            out.push_back(s.get<std::string>());
        }
        return out;
    };
    const auto metrics = string_list("metrics");
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        c.metrics.push_back(metric_from_string(metrics[i], "metrics[" + std::to_string(i) + "]"));
    }
    const auto methods = string_list("methods");
    for (std::size_t i = 0; i < methods.size(); ++i) {
        c.methods.push_back(method_from_string(methods[i], "methods[" + std::to_string(i) + "]"));
    }

    if (const json* m = r.get("mc")) {
        Reader mr(*m, "mc");
        c.mc.samples = mr.count("samples", c.mc.samples);
        c.mc.seed = mr.count("seed", c.mc.seed);
        c.mc.model = model_from_string(mr.string("model", "fitted"), "mc.model");
        const std::uint64_t b = mr.count("batches", c.mc.batches);
        if (b > 1'000'000) throw ConfigError("mc.batches", "too many batches");
        c.mc.batches = static_cast<unsigned>(b);
        mr.finish();
    }
    if (const json* s = r.get("series")) {
        Reader sr(*s, "series");
        const std::uint64_t n = sr.count("max_terms", c.max_terms);
        if (n > 100000) throw ConfigError("series.max_terms", "too many terms");
        c.max_terms = static_cast<unsigned>(n);
        c.experimental_exact_series = sr.boolean("experimental_exact_series", false);
        sr.finish();
    }
    c.output = r.string("output", "");
    if (const json* d = r.get("debug")) {
        Reader dr(*d, "debug");
        c.debug_psi_scale = dr.number("psi_scale", 1.0);
        dr.finish();
    }
    r.finish();
    c.validate();
    return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sweep_config(ss.str());
}

std::string to_json(const SweepConfig& c) {
    ojson j;
    j["schema"] = kSchema;
    j["name"] = c.name;
    j["description"] = c.description;
    j["notes"] = c.notes;
    ojson t;
    t["scenario"] = to_string(c.base.scenario);
    t["epsilon0_bits"] = c.base.epsilon0_bits;
    t["relay"] = ris_to_json(c.base.relay);
    t["eve"] = ris_to_json(c.base.eve);
    t["uowc"] = uowc_to_json(c.base.uowc);
    j["template"] = t;
    ojson ax;
    ax["path"] = c.axis.path;
    if (!c.axis.tied_paths.empty()) ax["tied_paths"] = c.axis.tied_paths;
    ax["start"] = c.axis.start;
    ax["stop"] = c.axis.stop;
    ax["points"] = c.axis.points;
    j["axis"] = ax;
    ojson curves = ojson::array();
    for (const Curve& cv : c.curves) {
        ojson o;
        o["label"] = cv.label;
        ojson s = ojson::object();
        for (const auto& [k, v] : cv.set) s[k] = param_to_json(v);
        o["set"] = s;
        curves.push_back(o);
    }
    j["curves"] = curves;
    ojson metrics = ojson::array();
    for (MetricKind m : c.metrics) metrics.push_back(to_string(m));
    j["metrics"] = metrics;
    ojson methods = ojson::array();
    for (Method m : c.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["mc"] = {{"samples", c.mc.samples}, {"seed", c.mc.seed}, {"model", to_string(c.mc.model)}, {"batches", c.mc.batches}};
    j["series"] = {{"max_terms", c.max_terms}, {"experimental_exact_series", c.experimental_exact_series}};
    if (!c.output.empty()) j["output"] = c.output;
    if (c.debug_psi_scale != 1.0) j["debug"] = {{"psi_scale", c.debug_psi_scale}};
    return j.dump(2) + "\n";
}

std::vector<double> axis_grid(const Axis& a) {
    if (a.points < 2) throw ConfigError("axis.points", "need at least 2 grid points");
    std::vector<double> g(a.points);
    const double step = (a.stop - a.start) / (a.points - 1);
    for (unsigned i = 0; i < a.points; ++i) g[i] = a.start + step * i;
    g.back() = a.stop;
    return g;
}

ScenarioConfig resolve_scenario(const ScenarioTemplate& t, const SweepOptions& options) {
    return resolve(t, options).scenario;
}

SweepResult run_sweep(const SweepConfig& config, const SweepOptions& options) {
    config.validate();
    const std::vector<double> grid = axis_grid(config.axis);
    const std::size_t C = std::max<std::size_t>(1, config.curves.size());
    const std::size_t P = grid.size();

    // Resolve everything first so configuration problems surface before any
    // expensive work.
    const bool physical_mc =
        config.mc.model == SamplingModel::Physical &&
        std::find(config.methods.begin(), config.methods.end(), Method::MonteCarlo) != config.methods.end();
    std::vector<Resolved> resolved;
    resolved.reserve(C * P);
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t k = 0; k < P; ++k) {
            const ScenarioTemplate t = point_template(config, c, grid[k]);
            try {
                resolved.push_back(resolve(t, options));
                if (physical_mc) {
                    ScenarioConfig probe = resolved.back().scenario;
                    probe.model = SamplingModel::Physical;
                    try {
                        probe.validate();
                    } catch (const DomainError& e) {
                        throw ConfigError("mc.model", e.what());
                    }
                }
            } catch (const ConfigError& e) {
                const std::string where = config.curves.empty() ? "" : "curves[" + std::to_string(c) + "] ";
                throw ConfigError(e.field(), where + "at axis value " + fmt(grid[k]) + ": " + e.message());
            }
        }
    }

    SweepResult result;
    result.config = config;
    result.generator = generator_name();
    result.points.resize(C * P);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < C * P; i = next++) {
            result.points[i] = evaluate(config, resolved[i], i / P, i % P, grid[i % P]);
        }
    };
    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, C * P));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
    const SweepConfig& cfg = result.config;
    const bool db_axis = is_db_path(cfg.axis.path);

    struct Column {
        std::string name;
        std::function<std::string(const CellResult&)> get;
    };
    struct Group {
        std::size_t cell;
        std::vector<Column> cols;
    };
    std::vector<Group> groups;
    std::size_t idx = 0;
    for (MetricKind metric : cfg.metrics) {
        for (Method method : cfg.methods) {
            Group g{idx++, {}};
            const std::string m = to_string(method);
            std::vector<std::pair<std::string, double>> units{{to_string(metric), 1.0}};
            if (metric == MetricKind::Asc) units = {{"asc_nats", 1.0}, {"asc_bits", 1.0 / std::numbers::ln2}};
            for (const auto& [base, f] : units) {
                const double scale = f;
                g.cols.push_back({base + "_" + m, [scale](const CellResult& c) { return fmt(c.estimate.value * scale); }});
                if (method == Method::MonteCarlo) {
                    g.cols.push_back({base + "_mc_stderr", [scale](const CellResult& c) {
                                          return fmt(c.estimate.std_error.value_or(NAN) * scale);
                                      }});
                    g.cols.push_back({base + "_mc_harmonic", [scale](const CellResult& c) {
                                          return c.harmonic ? fmt(c.harmonic->mean * scale) : "nan";
                                      }});
                    g.cols.push_back({base + "_mc_harmonic_stderr", [scale](const CellResult& c) {
                                          return c.harmonic ? fmt(c.harmonic->std_error * scale) : "nan";
                                      }});
                }
            }
            const std::string stem = to_string(metric) + "_" + m;
            if (method == Method::ClosedForm) {
                g.cols.push_back({stem + "_converged", [](const CellResult& c) {
                                      return std::string(c.error.empty() && c.estimate.converged ? "1" : "0");
                                  }});
                g.cols.push_back({stem + "_terms", [](const CellResult& c) { return std::to_string(c.estimate.terms); }});
            }
            if (method == Method::Quadrature) {
                g.cols.push_back({stem + "_error", [](const CellResult& c) { return fmt(c.estimate.error_estimate); }});
            }
            groups.push_back(std::move(g));
        }
    }

    out << "curve,";
    if (db_axis) {
        out << cfg.axis.path << "," << cfg.axis.path.substr(0, cfg.axis.path.size() - 3) << "_linear";
    } else {
        out << cfg.axis.path;
    }
    out << ",water_source";
    for (const Group& g : groups) {
        for (const Column& c : g.cols) out << "," << c.name;
    }
    out << ",notes\n";

    for (const PointResult& p : result.points) {
        out << csv_quote(p.curve) << "," << fmt(p.axis_value);
        if (db_axis) out << "," << fmt(db_to_linear(p.axis_value));
        out << "," << p.water_source;
        std::string notes = p.error;
        for (const Group& g : groups) {
            const CellResult& cell = p.cells[g.cell];
            for (const Column& c : g.cols) out << "," << c.get(cell);
            std::string n = cell.error.empty() ? cell.estimate.note : cell.error;
            if (cell.error.empty() && cell.method == Method::ClosedForm && !cell.estimate.converged) {
                n = n.empty() ? "not converged, value is a partial sum" : n + ", not converged (partial sum)";
            }
            if (!n.empty()) {
                if (!notes.empty()) notes += "; ";
                notes += to_string(cell.metric) + "/" + to_string(cell.method) + ": " + n;
            }
        }
        out << "," << csv_quote(notes) << "\n";
    }
}

// ---------------------------------------------------------------------------
// presets

namespace {

struct PresetBuilder {
    SweepConfig c;

    explicit PresetBuilder(std::string name) {
        c.name = std::move(name);
        c.base.relay = {2.0, 2.0, 1.0, 1.0, 2, 10.0};
        c.base.eve = {2.0, 2.0, 1.0, 1.0, 2, 0.0};
        c.base.uowc.water_label = "tg_h2.4_l0.05";
        c.base.uowc.detection = Detection::Heterodyne;
        c.base.uowc.avg_snr_db = 10.0;
        c.axis = {"relay.avg_snr_db", {}, -10.0, 30.0, 9};
        c.methods = {Method::ClosedForm, Method::Quadrature, Method::MonteCarlo};
        c.notes.push_back("curve families are illustrative where the caption says \"specific values\"");
        c.notes.push_back("detection: caption r = 1 is HD (s = 1), r = 2 is IM/DD (s = 2)");
    }

    PresetBuilder& describe(std::string d) {
        c.description = std::move(d);
        return *this;
    }
    PresetBuilder& metric(MetricKind m) {
        c.metrics.push_back(m);
        return *this;
    }
    PresetBuilder& curve(std::string label, std::map<std::string, ParamValue> set) {
        c.curves.push_back({std::move(label), std::move(set)});
        return *this;
    }
    SweepConfig done() {
        std::set<std::string> labels;
        if (!c.base.uowc.water_label.empty()) labels.insert(c.base.uowc.water_label);
        for (const Curve& cv : c.curves) {
            const auto it = cv.set.find("uowc.water_label");
            if (it != cv.set.end()) labels.insert(std::get<std::string>(it->second));
        }
        std::string l;
        for (const std::string& s : labels) l += (l.empty() ? "" : ", ") + s;
        c.notes.push_back("requires external table values: measured mEGG parameters for " + l);
        c.output = c.name + ".csv";
        return c;
    }
};

using Set = std::map<std::string, ParamValue>;

Set both_m(const char* link, double m) {
    return {{std::string(link) + ".m_hop1", m}, {std::string(link) + ".m_hop2", m}};
}

Set merge(Set a, const Set& b) {
    a.insert(b.begin(), b.end());
    return a;
}

SweepConfig make_preset(const std::string& name) {
    if (name == "fig2") {
        return PresetBuilder(name)
            .describe("ASC vs gamma_m1 for several m_r1 = m_r2 and gamma_m2; m_e = S1 = S2 = 2, Omega = 1, HD, "
                      "gamma_mu = 10 dB, h = 2.4, l = 0.05")
            .metric(MetricKind::Asc)
            .curve("m_r=1 gamma_m2=0dB", both_m("relay", 1.0))
            .curve("m_r=2 gamma_m2=0dB", both_m("relay", 2.0))
            .curve("m_r=4 gamma_m2=0dB", both_m("relay", 4.0))
            .curve("m_r=2 gamma_m2=5dB", merge(both_m("relay", 2.0), {{"eve.avg_snr_db", 5.0}}))
            .done();
    }
    if (name == "fig3") {
        PresetBuilder b(name);
        b.c.base.epsilon0_bits = 0.01;
        b.c.base.uowc.avg_snr_db = 15.0;
        return b.describe("Lower-bound SOP vs gamma_m1 for two m_e1 = m_e2 values; m_r = S1 = S2 = 2, Omega = 1, "
                          "HD, gamma_m2 = 0 dB, gamma_mu = 15 dB, eps0 = 0.01, h = 2.4, l = 0.05")
            .metric(MetricKind::SopLower)
            .curve("m_e=1", both_m("eve", 1.0))
            .curve("m_e=3", both_m("eve", 3.0))
            .done();
    }
    if (name == "fig4") {
        PresetBuilder b(name);
        b.c.base.scenario = Scenario::II;
        b.c.notes.push_back("scenario II: relay and eavesdropper share the first hop");
        return b.describe("ASC vs gamma_m1 for several m_r2 and m_e2 (scenario II); m_r1 = m_e1 = S1 = S2 = 2, "
                          "Omega = 1, gamma_m2 = 0 dB, HD, gamma_mu = 10 dB, h = 2.4, l = 0.05")
            .metric(MetricKind::Asc)
            .curve("m_r2=1 m_e2=2", {{"relay.m_hop2", 1.0}})
            .curve("m_r2=3 m_e2=2", {{"relay.m_hop2", 3.0}})
            .curve("m_r2=2 m_e2=1", {{"eve.m_hop2", 1.0}})
            .curve("m_r2=2 m_e2=3", {{"eve.m_hop2", 3.0}})
            .done();
    }
    if (name == "fig5") {
        PresetBuilder b(name);
        b.c.base.scenario = Scenario::II;
        b.c.base.relay = {2.0, 4.0, 4.0, 2.0, 2, 10.0};
        b.c.base.eve = {2.0, 2.0, 1.0, 1.0, 2, 3.0};
        b.c.base.uowc.avg_snr_db = -5.0;
        b.c.base.epsilon0_bits = 0.5;
        b.c.notes.push_back("scenario II with Omega_r1 = 4 but Omega_e1 = 1: the shared first hop is ill-defined "
                            "for physical MC, so the preset uses fitted MC (independent draws)");
        auto S = [](double s) { return Set{{"relay.elements", s}, {"eve.elements", s}}; };
        return b.describe("Exact SOP vs gamma_m1 for S1 = S2 values (scenario II); m_r1 = Omega_r2 = 2, "
                          "m_r2 = Omega_r1 = 4, m_e = 2, Omega_e = 1, HD, gamma_m2 = 3 dB, gamma_mu = -5 dB, "
                          "eps0 = 0.5, h = 2.4, l = 0.05")
            .metric(MetricKind::SopExact)
            .curve("S=1", S(1))
            .curve("S=2", S(2))
            .curve("S=4", S(4))
            .done();
    }
    if (name == "fig6") {
        auto om = [](const char* link, double o) {
            return Set{{std::string(link) + ".omega_hop1", o}, {std::string(link) + ".omega_hop2", o}};
        };
        return PresetBuilder(name)
            .describe("ASC vs gamma_m1 for several Omega_r, Omega_e and gamma_m2; m = S = 2, HD, gamma_mu = 10 dB, "
                      "h = 2.4, l = 0.05")
            .metric(MetricKind::Asc)
            .curve("Omega_r=1 Omega_e=1", {})
            .curve("Omega_r=2 Omega_e=1", om("relay", 2.0))
            .curve("Omega_r=1 Omega_e=0.5", om("eve", 0.5))
            .curve("Omega_r=1 Omega_e=1 gamma_m2=5dB", {{"eve.avg_snr_db", 5.0}})
            .done();
    }
    if (name == "fig7") {
        PresetBuilder b(name);
        b.c.base.scenario = Scenario::II;
        b.c.notes.push_back("scenario II: relay and eavesdropper share the first hop");
        return b.describe("SPSC vs gamma_m1 for several Omega_r2, Omega_e2 and gamma_m2 (scenario II); m = S = 2, "
                          "Omega_r1 = Omega_e1 = 1, HD, gamma_mu = 10 dB, h = 2.4, l = 0.05")
            .metric(MetricKind::Spsc)
            .curve("Omega_r2=1 Omega_e2=1", {})
            .curve("Omega_r2=2 Omega_e2=1", {{"relay.omega_hop2", 2.0}})
            .curve("Omega_r2=1 Omega_e2=0.5", {{"eve.omega_hop2", 0.5}})
            .curve("Omega_r2=1 Omega_e2=1 gamma_m2=5dB", {{"eve.avg_snr_db", 5.0}})
            .done();
    }
    if (name == "fig8") {
        PresetBuilder b(name);
        b.c.base.epsilon0_bits = 0.01;
        return b.describe("Lower-bound SOP vs gamma_m1 under thermal-gradient turbulence; m = S = 2, Omega = 1, "
                          "gamma_m2 = 0 dB, HD, gamma_mu = 10 dB, eps0 = 0.01")
            .metric(MetricKind::SopLower)
            .curve("h=2.4 l=0.05", {{"uowc.water_label", std::string("tg_h2.4_l0.05")}})
            .curve("h=4.7 l=0.05", {{"uowc.water_label", std::string("tg_h4.7_l0.05")}})
            .curve("h=4.7 l=0.10", {{"uowc.water_label", std::string("tg_h4.7_l0.10")}})
            .done();
    }
    if (name == "fig9") {
        PresetBuilder b(name);
        b.c.base.epsilon0_bits = 0.5;
        b.c.base.uowc.avg_snr_db = 30.0;
        return b.describe("Exact SOP vs gamma_m1 for several h in fresh and salty thermally uniform water; m = S = 2, "
                          "Omega = 1, gamma_m2 = 0 dB, HD, gamma_mu = 30 dB, eps0 = 0.5")
            .metric(MetricKind::SopExact)
            .curve("fresh h=2.4", {{"uowc.water_label", std::string("tu_fresh_h2.4")}})
            .curve("fresh h=4.7", {{"uowc.water_label", std::string("tu_fresh_h4.7")}})
            .curve("salty h=2.4", {{"uowc.water_label", std::string("tu_salty_h2.4")}})
            .curve("salty h=4.7", {{"uowc.water_label", std::string("tu_salty_h4.7")}})
            .done();
    }
    if (name == "fig10" || name == "fig11") {
        const std::string water = name == "fig10" ? "fresh" : "salty";
        PresetBuilder b(name);
        b.c.base.epsilon0_bits = 0.01;
        b.c.base.uowc.avg_snr_db = 20.0;
        for (const char* h : {"2.4", "4.7"}) {
            const std::string label = "tu_" + water + "_h" + h;
            b.curve(std::string("h=") + h + " HD",
                    {{"uowc.water_label", label}, {"uowc.detection", std::string("HD")}});
            b.curve(std::string("h=") + h + " IM/DD",
                    {{"uowc.water_label", label}, {"uowc.detection", std::string("IM/DD")}});
        }
        return b.describe("Lower-bound SOP vs gamma_m1, HD against IM/DD in " + water +
                          " water; m = S = 2, Omega = 1, gamma_m2 = 0 dB, gamma_mu = 20 dB, eps0 = 0.01")
            .metric(MetricKind::SopLower)
            .done();
    }
    if (name == "fig12") {
        PresetBuilder b(name);
        b.c.base.uowc.detection = Detection::IntensityModulation;
        b.c.axis.path = "uowc.avg_snr_db";
        b.c.base.relay.avg_snr_db = 10.0;
        return b.describe("Exact SOP vs gamma_mu for several eps0; m = S = 2, Omega = 1, IM/DD, gamma_m1 = 10 dB, "
                          "gamma_m2 = 0 dB, h = 2.4, l = 0.05")
            .metric(MetricKind::SopExact)
            .curve("eps0=0.01", {{"epsilon0_bits", 0.01}})
            .curve("eps0=0.5", {{"epsilon0_bits", 0.5}})
            .curve("eps0=1", {{"epsilon0_bits", 1.0}})
            .curve("eps0=2", {{"epsilon0_bits", 2.0}})
            .done();
    }
    if (name == "fig13") {
        PresetBuilder b(name);
        b.c.base.uowc.water_label = "tg_h4.7_l0.10";
        b.c.base.epsilon0_bits = 0.01;
        b.c.axis.path = "uowc.avg_snr_db";
        b.c.notes.push_back("axis eta_s is given through gamma_mu (HD: eta_1 = gamma_mu)");
        for (double g : {-8.0, -5.0, -2.0, 0.0, 2.0}) {
            b.curve("gamma_m2=" + fmt(g) + "dB", {{"eve.avg_snr_db", g}});
        }
        return b.describe("SPSC vs eta_s for several gamma_m2; m = S = 2, Omega = 1, HD, eps0 = 0.01, "
                          "gamma_m1 = 10 dB, h = 4.7, l = 0.1")
            .metric(MetricKind::Spsc)
            .done();
    }
    if (name == "asc_s1_s2") {
        return PresetBuilder(name)
            .describe("ASC vs gamma_m1 for several S1, S2 and gamma_m2; m = 2, Omega = 1, HD, gamma_mu = 10 dB, "
                      "h = 2.4, l = 0.05")
            .metric(MetricKind::Asc)
            .curve("S1=2 S2=2", {})
            .curve("S1=4 S2=2", {{"relay.elements", 4.0}})
            .curve("S1=2 S2=4", {{"eve.elements", 4.0}})
            .curve("S1=2 S2=2 gamma_m2=5dB", {{"eve.avg_snr_db", 5.0}})
            .done();
    }
    if (name == "spsc_gm1") {
        PresetBuilder b(name);
        b.c.base.uowc.water_label = "tg_h4.7_l0.10";
        b.c.base.epsilon0_bits = 0.01;
        return b.describe("SPSC vs gamma_m1; m = S = 2, Omega = 1, HD, eps0 = 0.01, gamma_mu = 10 dB, "
                          "gamma_m2 = 0 dB, h = 4.7, l = 0.1")
            .metric(MetricKind::Spsc)
            .done();
    }
    throw ConfigError("preset", "unknown preset \"" + name + "\"");
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13",
            "asc_s1_s2", "spsc_gm1"};
}

SweepConfig figure_preset(const std::string& name) {
    SweepConfig c = make_preset(name);
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// validation

ToleranceProfile tolerance_profile(const std::string& name) {
    ToleranceProfile p;
    p.name = name;
    if (name == "default") return p;
    if (name == "strict") {
        p.k_sigma = 2.0;
        p.floor_events = 1.0;
        p.closed_abs_tol = 1e-6;
        return p;
    }
    if (name == "loose") {
        p.k_sigma = 5.0;
        p.floor_events = 10.0;
        p.closed_abs_tol = 1e-2;
        return p;
    }
    throw ConfigError("profile", "unknown tolerance profile \"" + name + "\" (default, strict, loose)");
}

ValidationReport validate_sweep(const SweepConfig& config, const ToleranceProfile& profile,
                                const SweepOptions& options) {
    SweepConfig c = config;
    for (Method m : {Method::Quadrature, Method::MonteCarlo}) {
        if (std::find(c.methods.begin(), c.methods.end(), m) == c.methods.end()) c.methods.push_back(m);
    }
    const SweepResult res = run_sweep(c, options);

    ValidationReport rep;
    rep.config_name = c.name;
    rep.profile = profile;
    rep.generator = res.generator;
    rep.seed = c.mc.seed;
    const double floor = profile.floor_events / static_cast<double>(c.mc.samples);

    auto add = [&](ValidationRow row) {
        if (row.status == "pass") ++rep.passed;
        else if (row.status == "fail") ++rep.failed;
        else ++rep.skipped;
        rep.rows.push_back(std::move(row));
    };

    for (const PointResult& p : res.points) {
        for (MetricKind metric : c.metrics) {
            auto find = [&](Method m) -> const CellResult* {
                for (const CellResult& cell : p.cells) {
                    if (cell.metric == metric && cell.method == m) return &cell;
                }
                return nullptr;
            };
            const CellResult* mc = find(Method::MonteCarlo);
            const CellResult* quad = find(Method::Quadrature);
            const CellResult* closed = find(Method::ClosedForm);

            auto against_mc = [&](const CellResult* cell, const std::string& name) {
                ValidationRow row;
                row.curve = p.curve;
                row.axis_value = p.axis_value;
                row.metric = metric;
                row.comparison = name;
                row.value = cell->estimate.value;
                row.reference = mc->estimate.value;
                if (cell->skipped) {
                    row.status = "skipped";
                    row.reason = cell->error;
                } else if (!cell->error.empty() || !mc->error.empty()) {
                    row.status = "fail";
                    row.reason = "error: " + (cell->error.empty() ? mc->error : cell->error);
                } else if (cell->method == Method::ClosedForm && !cell->estimate.converged) {
                    row.status = "skipped";
                    row.reason = "skipped: not converged";
                } else {
                    row.deviation = row.value - row.reference;
                    row.allowed = profile.k_sigma * mc->estimate.std_error.value_or(0.0) + floor +
                                  cell->estimate.error_estimate;
                    const bool ok = std::abs(row.deviation) <= row.allowed;
                    row.status = ok ? "pass" : "fail";
                    if (!ok) row.reason = "deviation exceeds band";
                }
                add(std::move(row));
            };
            if (mc == nullptr) continue;
            if (quad != nullptr) against_mc(quad, "quadrature");
            if (closed != nullptr) {
                against_mc(closed, "closed");
                if (quad != nullptr) {
                    ValidationRow row;
                    row.curve = p.curve;
                    row.axis_value = p.axis_value;
                    row.metric = metric;
                    row.comparison = "closed_vs_quadrature";
                    row.value = closed->estimate.value;
                    row.reference = quad->estimate.value;
                    row.allowed = profile.closed_abs_tol;
                    if (closed->skipped) {
                        row.status = "skipped";
                        row.reason = closed->error;
                    } else if (!closed->error.empty() || !quad->error.empty()) {
                        row.status = "fail";
                        row.reason = "error: " + (closed->error.empty() ? quad->error : closed->error);
                    } else if (!closed->estimate.converged) {
                        row.status = "skipped";
                        row.reason = "skipped: not converged";
                    } else {
                        row.deviation = row.value - row.reference;
                        row.status = std::abs(row.deviation) <= row.allowed ? "pass" : "fail";
                        if (row.status == "fail") row.reason = "deviation exceeds tolerance";
                    }
                    add(std::move(row));
                }
            }
        }
    }
    return rep;
}

std::string ValidationReport::to_json() const {
    ojson j;
    j["config"] = config_name;
    j["profile"] = {{"name", profile.name},
                    {"k_sigma", profile.k_sigma},
                    {"floor_events", profile.floor_events},
                    {"closed_abs_tol", profile.closed_abs_tol}};
    j["generator"] = generator;
    j["seed"] = seed;
    j["passed"] = passed;
    j["failed"] = failed;
    j["skipped"] = skipped;
    j["ok"] = ok();
    ojson rows = ojson::array();
    auto num = [](double v) -> ojson {
        if (std::isfinite(v)) return v;
        return nullptr;
    };
    for (const ValidationRow& r : this->rows) {
        ojson o;
        o["curve"] = r.curve;
        o["axis_value"] = num(r.axis_value);
        o["metric"] = to_string(r.metric);
        o["comparison"] = r.comparison;
        o["value"] = num(r.value);
        o["reference"] = num(r.reference);
        o["deviation"] = num(r.deviation);
        o["allowed"] = num(r.allowed);
        o["status"] = r.status;
        if (!r.reason.empty()) o["reason"] = r.reason;
        rows.push_back(o);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

}  // namespace rissec
