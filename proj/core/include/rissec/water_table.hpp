// SPDX-License-Identifier: Apache-2.0
//
// mEGG turbulence parameters per water condition, loaded from a JSON file
// (see data/water_conditions.json for the schema). The shipped file holds
// placeholders; records whose `source` is "placeholder" are flagged so that
// callers can refuse to present them as measured data.
#pragma once

#include "rissec/channel.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rissec {

struct WaterRecord {
    std::string label;
    double h_lpm = 0.0;
    double l_degC_per_cm = 0.0;
    Salinity salinity = Salinity::Fresh;
    double lambda = 0.0;
    double sigma = 0.0;
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;
    std::string source;

    bool placeholder() const { return source == "placeholder"; }
    WaterCondition condition() const { return {label, h_lpm, l_degC_per_cm, salinity}; }
};

class WaterTable {
public:
    /// Throws ConfigError on I/O, JSON or schema problems.
    static WaterTable load(const std::filesystem::path& path);
    static WaterTable parse(const std::string& json_text, std::string origin = "<memory>");

    /// $RISSEC_WATER_TABLE, else the file next to the sources, else the
    /// installed copy.
    static std::filesystem::path default_path();
    static WaterTable load_default() { return load(default_path()); }

    const std::vector<WaterRecord>& records() const noexcept { return records_; }
    const std::string& origin() const noexcept { return origin_; }

    /// Throws ConfigError when the label is unknown.
    const WaterRecord& find(const std::string& label) const;
    /// First record matching h, l (to 1e-9) and salinity.
    std::optional<WaterRecord> match(double h_lpm, double l_degC_per_cm, Salinity salinity) const;

private:
    std::vector<WaterRecord> records_;
    std::string origin_;
};

/// Fills the turbulence fields of `spec` from `rec`, keeping detection and SNR.
UowcLinkSpec with_water(UowcLinkSpec spec, const WaterRecord& rec);

std::string to_string(Salinity s);
Salinity salinity_from_string(const std::string& s);

}  // namespace rissec
