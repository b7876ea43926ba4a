#include "rissec/errors.hpp"
#include "rissec/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace rissec;
using doctest::Approx;

namespace {

// Explicit turbulence parameters so no water table is needed.
const char* kSmall = R"({
  "schema": "rissec-sweep/1",
  "name": "small",
  "template": {
    "epsilon0_bits": 0.5,
    "relay": {"m_hop1": 2, "m_hop2": 2, "omega_hop1": 1, "omega_hop2": 1, "elements": 2, "avg_snr_db": 10},
    "eve": {"m_hop1": 2, "m_hop2": 2, "omega_hop1": 1, "omega_hop2": 1, "elements": 2, "avg_snr_db": 0},
    "uowc": {"detection": "HD", "avg_snr_db": 10, "lambda": 0.2, "sigma": 0.35, "p": 1.4, "q": 1.1647, "r": 1}
  },
  "axis": {"path": "relay.avg_snr_db", "start": 5, "stop": 20, "points": 2},
  "metrics": ["asc", "sop_exact", "sop_lower", "spsc"],
  "methods": ["closed", "quadrature", "mc"],
  "mc": {"samples": 40000, "seed": 3, "batches": 40}
})";

std::string field_of(const std::string& text) {
    try {
        parse_sweep_config(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

const char* kTable = R"({"records": [
  {"label": "ph", "h_lpm": 2.4, "l_degC_per_cm": 0.05, "salinity": "fresh",
   "lambda": 0.2, "sigma": 0.35, "p": 1.4, "q": 1.1647, "r": 1, "source": "placeholder"},
  {"label": "real", "h_lpm": 2.4, "l_degC_per_cm": 0.05, "salinity": "fresh",
   "lambda": 0.2, "sigma": 0.35, "p": 1.4, "q": 1.1647, "r": 1, "source": "transcribed"}]})";

std::string csv_of(const SweepConfig& c, unsigned threads) {
    SweepOptions o;
    o.threads = threads;
    std::ostringstream ss;
    write_csv(run_sweep(c, o), ss);
    return ss.str();
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("dB conversion round-trips") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-60.0, 60.0);
    for (int i = 0; i < 1000; ++i) {
        const double d = u(gen);
        REQUIRE(linear_to_db(db_to_linear(d)) == Approx(d).epsilon(1e-12));
    }
    CHECK(db_to_linear(10.0) == 10.0);
    CHECK(db_to_linear(0.0) == 1.0);
}

TEST_CASE("dB values are converted exactly once when a point is resolved") {
    ScenarioTemplate t;
    t.relay.avg_snr_db = 20.0;
    t.eve.avg_snr_db = -3.0;
    t.uowc.avg_snr_db = 13.0;
    t.uowc.lambda = 0.3;
    t.uowc.sigma = 0.4;
    t.uowc.p = 1.0;
    t.uowc.q = 1.0;
    t.uowc.r = 1.0;
    const ScenarioConfig s = resolve_scenario(t, {});
    CHECK(s.relay_link.avg_snr == 100.0);
    CHECK(s.eve_link.avg_snr == db_to_linear(-3.0));
    CHECK(s.uowc_link.avg_snr == db_to_linear(13.0));
}

TEST_CASE("every preset round-trips through JSON") {
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        const SweepConfig p = figure_preset(name);
        const SweepConfig back = parse_sweep_config(to_json(p));
        CHECK(back == p);
        CHECK(to_json(back) == to_json(p));
        bool flagged = false;
        for (const std::string& n : p.notes) flagged = flagged || n.find("requires external table values") == 0;
        CHECK(flagged);
    }
    CHECK_THROWS_AS(figure_preset("fig99"), ConfigError);
}

TEST_CASE("preset contents follow the captions") {
    const SweepConfig f3 = figure_preset("fig3");
    CHECK(f3.curves.size() == 2);
    CHECK(f3.metrics == std::vector<MetricKind>{MetricKind::SopLower});
    CHECK(f3.base.uowc.avg_snr_db == 15.0);
    CHECK(f3.base.epsilon0_bits == 0.01);

    const SweepConfig f5 = figure_preset("fig5");
    CHECK(f5.base.relay.m_hop1 == 2.0);
    CHECK(f5.base.relay.omega_hop2 == 2.0);
    CHECK(f5.base.relay.m_hop2 == 4.0);
    CHECK(f5.base.relay.omega_hop1 == 4.0);
    CHECK(f5.base.uowc.avg_snr_db == -5.0);
    CHECK(f5.base.epsilon0_bits == 0.5);
    CHECK(f5.base.scenario == Scenario::II);
    for (const Curve& c : f5.curves) CHECK(c.set.at("relay.elements") == c.set.at("eve.elements"));

    for (const char* name : {"fig10", "fig11"}) {
        const SweepConfig f = figure_preset(name);
        int hd = 0, im = 0;
        for (const Curve& c : f.curves) {
            const std::string d = std::get<std::string>(c.set.at("uowc.detection"));
            hd += d == "HD";
            im += d == "IM/DD";
        }
        CHECK(hd == 2);
        CHECK(im == 2);
    }

    const SweepConfig f12 = figure_preset("fig12");
    CHECK(f12.axis.path == "uowc.avg_snr_db");
    CHECK(f12.metrics == std::vector<MetricKind>{MetricKind::SopExact});
    CHECK(f12.curves.size() == 4);
    CHECK(f12.base.uowc.detection == Detection::IntensityModulation);
}

TEST_CASE("config errors carry field paths") {
    CHECK(field_of(kSmall) == "<no error>");
    CHECK(field_of(replace(kSmall, R"("metrics": ["asc", "sop_exact", "sop_lower", "spsc"])", R"("metrics": [])")) ==
          "metrics");
    CHECK(field_of(replace(kSmall, R"("points": 2)", R"("points": 1)")) == "axis.points");
    CHECK(field_of(replace(kSmall, R"("path": "relay.avg_snr_db")", R"("path": "relay.snr")")) == "axis.path");
    CHECK(field_of(replace(kSmall, R"("m_hop1": 2, "m_hop2": 2, "omega_hop1": 1, "omega_hop2": 1, "elements": 2, "avg_snr_db": 10)",
                           R"("m_hop1": 2, "m_hopx": 2)")) == "template.relay.m_hopx");
    CHECK(field_of(replace(kSmall, R"("closed", "quadrature", "mc")", R"("closed", "magic")")) == "methods[1]");
    CHECK(field_of(replace(kSmall, R"("batches": 40)", R"("batches": 40, "threads": 2)")) == "mc.threads");
    CHECK(field_of(replace(kSmall, R"("schema": "rissec-sweep/1")", R"("schema": "other/2")")) == "schema");
    CHECK(field_of(replace(kSmall, R"("detection": "HD")", R"("detection": "coherent")")) == "template.uowc.detection");
}

TEST_CASE("unknown curve parameters are rejected with their path") {
    const std::string bad = replace(kSmall, R"("metrics")",
                                    R"("curves": [{"label": "x", "set": {"relay.nope": 1}}], "metrics")");
    CHECK(field_of(bad) == "curves[0].set.relay.nope");
}

TEST_CASE("water labels: placeholders are refused unless allowed") {
    const WaterTable table = WaterTable::parse(kTable);
    ScenarioTemplate t;
    t.uowc.water_label = "ph";
    SweepOptions o;
    CHECK_THROWS_AS(resolve_scenario(t, o), ConfigError);  // no table at all
    o.table = &table;
    try {
        resolve_scenario(t, o);
        FAIL("placeholder row accepted");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "uowc.water_label");
        CHECK(std::string(e.what()).find("requires external table values") != std::string::npos);
    }
    o.allow_placeholder = true;
    CHECK_NOTHROW(resolve_scenario(t, o));
    o.allow_placeholder = false;
    t.uowc.water_label = "real";
    CHECK(resolve_scenario(t, o).uowc_link.lambda == 0.2);
    t.uowc.water_label = "missing";
    CHECK_THROWS_AS(resolve_scenario(t, o), ConfigError);
}

TEST_CASE("CSV layout and byte-identical reruns") {
    const SweepConfig c = parse_sweep_config(kSmall);
    const std::string a = csv_of(c, 1);
    CHECK(a == csv_of(c, 1));
    CHECK(a == csv_of(c, 2));
    std::istringstream in(a);
    std::string header;
    std::getline(in, header);
    for (const char* col : {"curve,relay.avg_snr_db,relay.avg_snr_linear,water_source", "asc_nats_closed",
                            "asc_bits_quadrature", "asc_nats_mc_stderr", "asc_closed_converged", "asc_closed_terms",
                            "sop_exact_quadrature_error", "sop_lower_mc_harmonic", "spsc_mc_harmonic_stderr"}) {
        CAPTURE(col);
        CHECK(header.find(col) != std::string::npos);
    }
    CHECK(header.ends_with(",notes"));
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("quadrature and MC agree on every row") {
    const SweepConfig c = parse_sweep_config(kSmall);
    const SweepResult r = run_sweep(c, {});
    REQUIRE(r.points.size() == 2);
    for (const PointResult& p : r.points) {
        CHECK(p.water_source == "explicit");
        for (MetricKind m : c.metrics) {
            const CellResult *q = nullptr, *mc = nullptr;
            for (const CellResult& cell : p.cells) {
                if (cell.metric != m) continue;
                if (cell.method == Method::Quadrature) q = &cell;
                if (cell.method == Method::MonteCarlo) mc = &cell;
            }
            REQUIRE(q != nullptr);
            REQUIRE(mc != nullptr);
            CHECK(std::abs(q->estimate.value - mc->estimate.value) <= 3.0 * *mc->estimate.std_error + 3.0 / 40000);
        }
        // Exact-SOP series is off by default and marked as skipped.
        for (const CellResult& cell : p.cells) {
            if (cell.metric == MetricKind::SopExact && cell.method == Method::ClosedForm) CHECK(cell.skipped);
        }
    }
}

TEST_CASE("validation: baseline passes, non-converged series are skipped") {
    const SweepConfig c = parse_sweep_config(kSmall);
    const ValidationReport rep = validate_sweep(c, tolerance_profile("default"), {});
    CHECK(rep.ok());
    CHECK(rep.passed > 0);
    bool asc_skipped = false;
    for (const ValidationRow& r : rep.rows) {
        if (r.metric == MetricKind::Asc && r.comparison == "closed") {
            CHECK(r.status == "skipped");
            asc_skipped = asc_skipped || r.reason == "skipped: not converged";
        }
    }
    CHECK(asc_skipped);
    CHECK(rep.to_json().find("\"ok\": true") != std::string::npos);
}

TEST_CASE("validation: a mis-scaled Psi is caught and located") {
    SweepConfig c = parse_sweep_config(kSmall);
    c.debug_psi_scale = 3.0;
    const ValidationReport rep = validate_sweep(c, tolerance_profile("default"), {});
    CHECK_FALSE(rep.ok());
    bool located = false;
    for (const ValidationRow& r : rep.rows) {
        if (r.status == "fail" && r.comparison == "quadrature") {
            located = true;
            CHECK(std::abs(r.deviation) > r.allowed);
            CHECK(r.curve == "base");
        }
    }
    CHECK(located);
}

TEST_CASE("tolerance profiles") {
    CHECK(tolerance_profile("strict").k_sigma < tolerance_profile("default").k_sigma);
    CHECK(tolerance_profile("loose").k_sigma > tolerance_profile("default").k_sigma);
    CHECK_THROWS_AS(tolerance_profile("lenient"), ConfigError);
}

TEST_CASE("axis grid and tied paths") {
    const auto g = axis_grid({"relay.avg_snr_db", {}, -10.0, 30.0, 9});
    REQUIRE(g.size() == 9);
    CHECK(g.front() == -10.0);
    CHECK(g[4] == 10.0);
    CHECK(g.back() == 30.0);

    SweepConfig c = parse_sweep_config(kSmall);
    c.axis = {"relay.elements", {"eve.elements"}, 1.0, 3.0, 3};
    c.methods = {Method::Quadrature};
    c.metrics = {MetricKind::Spsc};
    const SweepResult r = run_sweep(c, {});
    REQUIRE(r.points.size() == 3);
    // Equal S on both links keeps the two RIS laws in step; SPSC moves anyway
    // because the optical hop caps the main link.
    CHECK(r.points[0].cells[0].estimate.value != r.points[2].cells[0].estimate.value);
}

}  // TEST_SUITE
