// SPDX-License-Identifier: Apache-2.0
#include "rissec/water_table.hpp"

#include "rissec/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef RISSEC_SOURCE_DATA_FILE
#define RISSEC_SOURCE_DATA_FILE ""
#endif
#ifndef RISSEC_INSTALL_DATA_FILE
#define RISSEC_INSTALL_DATA_FILE ""
#endif

namespace rissec {

using nlohmann::json;

std::string to_string(Salinity s) { return s == Salinity::Fresh ? "fresh" : "salty"; }

Salinity salinity_from_string(const std::string& s) {
    if (s == "fresh") return Salinity::Fresh;
    if (s == "salty") return Salinity::Salty;
    throw ConfigError("salinity", "expected \"fresh\" or \"salty\", got \"" + s + "\"");
}

namespace {

double positive(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(where + "." + key, "missing number");
    const double v = j.at(key).get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where + "." + key, "must be positive");
    return v;
}

double non_negative(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(where + "." + key, "missing number");
    const double v = j.at(key).get<double>();
    if (!(v >= 0.0)) throw ConfigError(where + "." + key, "must be non-negative");
    return v;
}

}  // namespace

WaterTable WaterTable::parse(const std::string& text, std::string origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", origin + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array()) {
        throw ConfigError("records", origin + ": expected an object with a \"records\" array");
    }
    WaterTable table;
    table.origin_ = std::move(origin);
    std::size_t i = 0;
    for (const auto& r : doc["records"]) {
        const std::string where = "records[" + std::to_string(i++) + "]";
        if (!r.is_object()) throw ConfigError(where, "expected an object");
        WaterRecord rec;
        if (!r.contains("label") || !r["label"].is_string()) throw ConfigError(where + ".label", "missing string");
        rec.label = r["label"].get<std::string>();
        rec.h_lpm = non_negative(r, where, "h_lpm");
        rec.l_degC_per_cm = non_negative(r, where, "l_degC_per_cm");
        if (!r.contains("salinity") || !r["salinity"].is_string()) {
            throw ConfigError(where + ".salinity", "missing string");
        }
        try {
            rec.salinity = salinity_from_string(r["salinity"].get<std::string>());
        } catch (const ConfigError& e) {
            throw ConfigError(where + ".salinity", e.message());
        }
        rec.lambda = positive(r, where, "lambda");
        if (!(rec.lambda < 1.0)) throw ConfigError(where + ".lambda", "must lie in (0, 1)");
        rec.sigma = positive(r, where, "sigma");
        rec.p = positive(r, where, "p");
        rec.q = positive(r, where, "q");
        rec.r = positive(r, where, "r");
        rec.source = r.value("source", std::string("placeholder"));
        for (const auto& other : table.records_) {
            if (other.label == rec.label) throw ConfigError(where + ".label", "duplicate label " + rec.label);
        }
        table.records_.push_back(std::move(rec));
    }
    return table;
}

WaterTable WaterTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("water_table", "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::filesystem::path WaterTable::default_path() {
    if (const char* env = std::getenv("RISSEC_WATER_TABLE"); env && *env) return env;
    const std::filesystem::path source = RISSEC_SOURCE_DATA_FILE;
    std::error_code ec;
    if (!source.empty() && std::filesystem::exists(source, ec)) return source;
    return RISSEC_INSTALL_DATA_FILE;
}

const WaterRecord& WaterTable::find(const std::string& label) const {
    for (const auto& r : records_) {
        if (r.label == label) return r;
    }
    throw ConfigError("water_label", "unknown water condition \"" + label + "\" in " + origin_);
}

std::optional<WaterRecord> WaterTable::match(double h, double l, Salinity s) const {
    for (const auto& r : records_) {
        if (std::abs(r.h_lpm - h) < 1e-9 && std::abs(r.l_degC_per_cm - l) < 1e-9 && r.salinity == s) return r;
    }
    return std::nullopt;
}

UowcLinkSpec with_water(UowcLinkSpec spec, const WaterRecord& rec) {
    spec.lambda = rec.lambda;
    spec.sigma = rec.sigma;
    spec.p = rec.p;
    spec.q = rec.q;
    spec.r = rec.r;
    spec.water = rec.condition();
    return spec;
}

}  // namespace rissec
