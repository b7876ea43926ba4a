// Acceptance suite. One line per criterion: "criterion N: PASS|FAIL|SKIP ...".
// Exit status is nonzero when any criterion fails.
#include "rissec/channel.hpp"
#include "rissec/meijer_g.hpp"
#include "rissec/monte_carlo.hpp"
#include "rissec/quadrature.hpp"
#include "rissec/secrecy.hpp"
#include "rissec/specfun.hpp"
#include "rissec/sweep.hpp"
#include "rissec/water_table.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace rissec;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status = Status::Pass;
    std::string detail;
};

// Collects the worst offender so a FAIL line says where it happened.
struct Tally {
    unsigned checks = 0, failures = 0;
    std::string first_failure;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            if (failures == 0) first_failure = what;
            ++failures;
        }
    }
    Outcome outcome(const std::string& summary) const {
        std::ostringstream s;
        s << summary << "; " << checks << " checks";
        if (failures == 0) return {Status::Pass, s.str()};
        s << ", " << failures << " failed, first: " << first_failure;
        return {Status::Fail, s.str()};
    }
};

std::string num(double x, int prec = 6) {
    std::ostringstream s;
    s.precision(prec);
    s << x;
    return s.str();
}

double rel_err(double got, double want) {
    return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
}

std::vector<double> log_points(double lo, double hi, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return x;
}

const WaterTable& shipped_table() {
    static const WaterTable t = WaterTable::load(WaterTable::default_path());
    return t;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Tally t;
    double worst = 0.0;
    const auto xs = log_points(1e-3, 1e2, 50);
    auto check = [&](const MeijerGSpec& g, const std::function<double(double)>& want, const std::string& name) {
        for (double x : xs) {
            const double e = rel_err(meijer_g(g, x), want(x));
            worst = std::max(worst, e);
            t.expect(e <= 1e-8, name + " at x=" + num(x) + " rel " + num(e, 3));
        }
    };
    check({{}, {0.0}, 1, 0}, [](double x) { return std::exp(-x); }, "exp");
    check({{0.0}, {0.0}, 1, 1}, [](double x) { return 1.0 / (1.0 + x); }, "1/(1+x)");
    for (double p : {0.7, 2.5}) {
        check({{1.0}, {p, 0.0}, 1, 1}, [p](double x) { return boost::math::tgamma_lower(p, x); },
              "lower gamma p=" + num(p));
    }
    const double b = beta_ac(1.5, -0.5);
    t.expect(std::abs(b + std::numbers::pi) <= 1e-12, "beta_ac(1.5,-0.5) = " + num(b, 17));
    return t.outcome("worst Meijer-G rel err " + num(worst, 3) + ", beta_ac(1.5,-0.5)+pi = " +
                     num(b + std::numbers::pi, 3));
}

Outcome criterion2() {
    Tally t;
    struct Set {
        Detection d;
        double r, lambda, sigma, p, q, snr_db;
    };
    const std::vector<Set> sets = {
        {Detection::Heterodyne, 1.0, 0.2, 0.35, 1.4, 1.1647, 10.0},
        {Detection::Heterodyne, 2.0, 0.45, 0.35, 1.0, 1.5602, 0.0},
        {Detection::IntensityModulation, 1.0, 0.25, 0.3, 1.2, 1.2509, 20.0},
        {Detection::IntensityModulation, 2.0, 0.5, 0.3, 0.9, 1.7415, 5.0},
        {Detection::Heterodyne, 1.0, 0.1, 0.6, 2.5, 0.8, 15.0},
        {Detection::IntensityModulation, 2.0, 0.15, 0.4, 1.5, 1.05, 12.0},
    };
    const std::size_t n = 1'000'000;
    const double band = dkw_epsilon(n, 0.99);
    double worst_ks = 0.0, worst_path = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const Set& s = sets[i];
        UowcLinkSpec spec;
        spec.detection = s.d;
        spec.r = s.r;
        spec.lambda = s.lambda;
        spec.sigma = s.sigma;
        spec.p = s.p;
        spec.q = s.q;
        spec.avg_snr = std::pow(10.0, s.snr_db / 10.0);
        const UowcCoefficients c = uowc_coefficients(spec);
        auto g = sample_uowc_snr(spec, n, 1000 + i);
        const double d = ks_distance(g, [&](double x) { return cdf_snr_uowc(c, x); });
        worst_ks = std::max(worst_ks, d);
        t.expect(d < band, "set " + std::to_string(i) + " KS " + num(d, 3));

        // g is sorted now: compare the two CDF paths across the sample range.
        for (int k = 1; k < 40; ++k) {
            const double x = g[std::size_t(double(k) / 40.0 * n)];
            const double e = rel_err(cdf_snr_uowc_meijer(c, x), cdf_snr_uowc(c, x));
            worst_path = std::max(worst_path, e);
            t.expect(e <= 1e-8, "set " + std::to_string(i) + " Meijer path at " + num(x) + " rel " + num(e, 3));
        }
    }
    return t.outcome(std::to_string(sets.size()) + " sets at 1e6, worst KS " + num(worst_ks, 3) + " vs DKW " +
                     num(band, 3) + ", worst path rel err " + num(worst_path, 3));
}

Outcome criterion3() {
    Tally t;
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> m(0.5, 4.0), om(0.3, 3.0);
    std::uniform_int_distribution<unsigned> S(1, 8);
    const std::size_t n = 1'000'000;
    double worst_mean = 0.0, worst_var = 0.0;
    for (int i = 0; i < 10; ++i) {
        const RisLinkSpec spec{m(gen), m(gen), om(gen), om(gen), S(gen), 1.0};
        const RisCoefficients c = ris_coefficients(spec);
        const auto g = sample_ris_snr(spec, n, 500 + i);
        double s1 = 0.0;
        for (double v : g) s1 += std::sqrt(v);
        const double mean = s1 / n;
        double m2 = 0.0, m4 = 0.0;
        for (double v : g) {
            const double d = std::sqrt(v) - mean;
            m2 += d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m4 /= n;
        const double se_mean = std::sqrt(m2 / n), se_var = std::sqrt((m4 - m2 * m2) / n);
        const double zm = std::abs(mean - (c.a + 1.0) * c.b) / se_mean;
        const double zv = std::abs(m2 - (c.a + 1.0) * c.b * c.b) / se_var;
        worst_mean = std::max(worst_mean, zm);
        worst_var = std::max(worst_var, zv);
        const std::string tag = "spec " + std::to_string(i) + " (S=" + std::to_string(spec.elements) + ")";
        t.expect(zm < 3.0, tag + " mean off by " + num(zm, 3) + " se");
        t.expect(zv < 5.0, tag + " variance off by " + num(zv, 3) + " se");
    }
    return t.outcome("10 random specs at 1e6, worst |z| mean " + num(worst_mean, 3) + ", variance " +
                     num(worst_var, 3));
}

const CellResult* find_cell(const PointResult& p, MetricKind m, Method method) {
    for (const CellResult& c : p.cells) {
        if (c.metric == m && c.method == method) return &c;
    }
    return nullptr;
}

Outcome criterion4() {
    Tally t;
    SweepOptions opt;
    opt.table = &shipped_table();
    opt.allow_placeholder = true;
    opt.threads = 1;
    double worst_z = 0.0, worst_closed = 0.0;
    unsigned closed_checked = 0, closed_unconverged = 0;
    bool placeholder = false;
    for (const char* name : {"fig2", "fig3", "fig5"}) {
        SweepConfig cfg = figure_preset(name);
        cfg.axis.start = -10.0;
        cfg.axis.stop = 30.0;
        cfg.axis.points = 5;
        cfg.metrics = {MetricKind::Asc, MetricKind::SopExact, MetricKind::SopLower, MetricKind::Spsc};
        cfg.methods = {Method::Quadrature, Method::MonteCarlo};
        cfg.mc.samples = 1'000'000;
        cfg.mc.model = SamplingModel::Fitted;
        const SweepResult r = run_sweep(cfg, opt);
        // Only the SOP_L series is under test; the ASC double series is slow
        // to declare divergence and is not part of this criterion.
        SweepConfig closed = cfg;
        closed.metrics = {MetricKind::SopLower};
        closed.methods = {Method::ClosedForm};
        const SweepResult rc = run_sweep(closed, opt);
        for (std::size_t i = 0; i < r.points.size(); ++i) {
            const PointResult& p = r.points[i];
            placeholder = placeholder || p.water_source == "placeholder";
            const std::string where = std::string(name) + " \"" + p.curve + "\" at " + num(p.axis_value) + " dB";
            for (MetricKind m : cfg.metrics) {
                const CellResult* q = find_cell(p, m, Method::Quadrature);
                const CellResult* mc = find_cell(p, m, Method::MonteCarlo);
                const bool ok = q && mc && q->error.empty() && mc->error.empty();
                t.expect(ok, where + " " + to_string(m) + " missing: " + (q ? q->error : "") + (mc ? mc->error : ""));
                if (!ok) continue;
                const double se = *mc->estimate.std_error;
                const double dev = std::abs(q->estimate.value - mc->estimate.value);
                // A zero stderr means every sample agreed; allow one sample's worth.
                const double allowed = se > 0.0 ? 3.0 * se : 1.0 / double(cfg.mc.samples);
                if (se > 0.0) worst_z = std::max(worst_z, dev / se);
                t.expect(dev <= allowed, where + " " + to_string(m) + " quadrature " + num(q->estimate.value, 8) +
                                             " vs MC " + num(mc->estimate.value, 8) + " (se " + num(se, 3) + ")");
            }
            const CellResult* cl = find_cell(rc.points[i], MetricKind::SopLower, Method::ClosedForm);
            const CellResult* q = find_cell(p, MetricKind::SopLower, Method::Quadrature);
            if (cl && q && cl->error.empty() && cl->estimate.converged) {
                ++closed_checked;
                const double dev = std::abs(cl->estimate.value - q->estimate.value);
                worst_closed = std::max(worst_closed, dev);
                t.expect(dev <= 1e-3, where + " closed SOP_L " + num(cl->estimate.value, 8) + " vs quadrature " +
                                          num(q->estimate.value, 8));
            } else if (cl) {
                ++closed_unconverged;
            }
        }
    }
    return t.outcome(std::string("worst quadrature-MC |z| ") + num(worst_z, 3) + "; closed SOP_L checked at " +
                     std::to_string(closed_checked) + " points (" + std::to_string(closed_unconverged) +
                     " not converged), worst |dev| " + num(worst_closed, 3) +
                     (placeholder ? "; water rows are placeholders (internal consistency only)" : ""));
}

Outcome criterion5() {
    Tally t;
    SweepOptions opt;
    opt.table = &shipped_table();
    opt.allow_placeholder = true;
    const SweepConfig cfg = figure_preset("fig12");
    const std::vector<double> eps = {0.0, 0.01, 0.5, 1.0, 2.0};
    double worst_identity = 0.0;
    for (double x : axis_grid(cfg.axis)) {
        ScenarioTemplate tmpl = cfg.base;
        set_parameter(tmpl, cfg.axis.path, x);
        const ScenarioConfig sc = resolve_scenario(tmpl, opt);
        const RisCoefficients R = ris_coefficients(sc.relay_link), E = ris_coefficients(sc.eve_link);
        const UowcCoefficients U = uowc_coefficients(sc.uowc_link);
        const std::string where = "gamma_mu " + num(x) + " dB";

        std::vector<double> sop_e;
        for (double e0 : eps) {
            SecrecyQuery q;
            q.epsilon0_bits = e0;
            const double se = sop_exact_quadrature(R, U, E, q).value;
            const double sl = sop_lower_quadrature(R, U, E, q).value;
            t.expect(sl <= se, where + " eps0 " + num(e0) + ": SOP_L " + num(sl, 17) + " > SOP_E " + num(se, 17));
            if (!sop_e.empty()) {
                t.expect(se >= sop_e.back(), where + ": SOP_E decreases at eps0 " + num(e0));
            }
            sop_e.push_back(se);
            if (e0 == 0.0) {
                const double d = std::abs(spsc(R, U, E).value + se - 1.0);
                t.expect(d <= 1e-9, where + ": SPSC + SOP_E - 1 = " + num(d, 3));
                // SPSC integrated on its own over the survival side, so the
                // identity is not a restatement of the library definition.
                const double mean_e = (E.a + 1.0) * (E.a + 2.0) * E.b * E.b * E.avg_snr;
                std::vector<double> bp;
                for (double f : {1e-6, 1e-4, 1e-2, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0}) bp.push_back(f * mean_e);
                QuadraturePolicy pol;
                pol.abs_tol = 1e-12;
                pol.rel_tol = 1e-11;
                const double direct =
                    integrate_partitioned([&](double g) { return pdf_snr_ris(E, g) * sf_snr_equivalent(R, U, g); },
                                          bp, pol)
                        .value;
                const double di = std::abs(direct + se - 1.0);
                worst_identity = std::max(worst_identity, di);
                t.expect(di <= 1e-9, where + ": direct SPSC + SOP_E - 1 = " + num(di, 3));
                const double dc = std::abs(spsc_closed(R, U, E, q).value + sop_lower_closed(R, U, E, q).value - 1.0);
                t.expect(dc <= 1e-9, where + ": closed SPSC + SOP - 1 = " + num(dc, 3));
            }
        }

        // The same identities hold sample by sample on the MC path.
        for (double e0 : eps) {
            ScenarioConfig m = sc;
            m.epsilon0_bits = e0;
            m.samples = 100000;
            m.batches = 20;
            m.threads = 1;
            const McReport r = estimate_metrics(m);
            for (const McMetrics* f : {&r.min_form, &r.harmonic_form}) {
                t.expect(f->sop_lower.mean <= f->sop_exact.mean, where + " MC SOP_L > SOP_E");
                if (e0 == 0.0) {
                    t.expect(std::abs(f->spsc.mean + f->sop_exact.mean - 1.0) <= 1e-9, where + " MC identity");
                }
            }
        }
    }
    return t.outcome("fig12 grid x eps0 {0, 0.01, 0.5, 1, 2}, worst |direct SPSC + SOP_E - 1| " + num(worst_identity, 3));
}

Outcome criterion6() {
    const WaterTable& table = shipped_table();
    struct Target {
        const char* label;
        double value;
    };
    const std::vector<Target> targets = {
        {"tg_h2.4_l0.05", 0.09076}, {"tg_h4.7_l0.05", 0.20344}, {"tg_h4.7_l0.10", 0.23833}};
    for (const Target& g : targets) {
        if (table.find(g.label).placeholder()) {
            return {Status::Skip, std::string("water table row ") + g.label + " in " + table.origin() +
                                      " is a placeholder; requires external table values"};
        }
    }
    Tally t;
    SweepOptions opt;
    opt.table = &table;
    const SweepConfig cfg = figure_preset("fig8");
    std::string got;
    for (const Target& g : targets) {
        ScenarioTemplate tmpl = cfg.base;
        tmpl.relay.avg_snr_db = 20.0;
        tmpl.uowc.water_label = g.label;
        const ScenarioConfig sc = resolve_scenario(tmpl, opt);
        SecrecyQuery q;
        q.epsilon0_bits = sc.epsilon0_bits;
        const double v = sop_lower_quadrature(ris_coefficients(sc.relay_link), uowc_coefficients(sc.uowc_link),
                                              ris_coefficients(sc.eve_link), q)
                             .value;
        got += std::string(got.empty() ? "" : ", ") + g.label + " " + num(v, 5);
        t.expect(rel_err(v, g.value) <= 0.02, std::string(g.label) + " gives " + num(v, 6) + " vs " + num(g.value));
    }
    return t.outcome(got);
}

Outcome criterion7() {
    Tally t;
    SweepOptions opt;
    opt.table = &shipped_table();
    opt.allow_placeholder = true;
    opt.threads = 1;
    auto run = [&](const char* name) {
        SweepConfig cfg = figure_preset(name);
        cfg.axis.start = -10.0;
        cfg.axis.stop = 30.0;
        cfg.axis.points = 5;
        cfg.methods = {Method::Quadrature};
        return run_sweep(cfg, opt);
    };
    const SweepResult fresh = run("fig10"), salty = run("fig11");
    bool placeholder = false;
    auto value = [](const PointResult& p) { return p.cells.at(0).estimate.value; };
    for (std::size_t i = 0; i < fresh.points.size(); ++i) {
        const PointResult& f = fresh.points[i];
        const PointResult& s = salty.points[i];
        placeholder = placeholder || f.water_source == "placeholder" || s.water_source == "placeholder";
        const std::string where = "\"" + f.curve + "\" at " + num(f.axis_value) + " dB";
        t.expect(f.curve == s.curve && f.axis_value == s.axis_value, where + " grids differ");
        t.expect(value(f) <= value(s), where + ": fresh " + num(value(f), 8) + " > salty " + num(value(s), 8));
    }
    // Curves come in (HD, IM/DD) pairs per bubble level.
    for (const SweepResult* r : {&fresh, &salty}) {
        const std::size_t P = r->config.axis.points;
        for (std::size_t c = 0; c + 1 < r->config.curves.size(); c += 2) {
            for (std::size_t k = 0; k < P; ++k) {
                const PointResult& hd = r->points[c * P + k];
                const PointResult& im = r->points[(c + 1) * P + k];
                t.expect(value(hd) <= value(im), r->config.name + " \"" + hd.curve + "\" at " + num(hd.axis_value) +
                                                     ": HD " + num(value(hd), 8) + " > IM/DD " + num(value(im), 8));
            }
        }
    }
    return t.outcome(std::string("fig10/fig11 on 5-point grids") +
                     (placeholder ? "; fresh/salty ordering evaluated on placeholder water rows" : ""));
}

}  // namespace

int main() {
    // Wall-clock budgets; 0 means none.
    struct Entry {
        int id;
        Outcome (*fn)();
        double budget_s;
    };
    const std::vector<Entry> criteria = {{1, criterion1, 10.0}, {2, criterion2, 60.0}, {3, criterion3, 60.0},
                                         {4, criterion4, 300.0}, {5, criterion5, 0.0}, {6, criterion6, 0.0},
                                         {7, criterion7, 0.0}};
    int failed = 0;
    for (const auto& [id, fn, budget] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {Status::Fail, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (budget > 0.0 && secs > budget && o.status == Status::Pass) {
            o = {Status::Fail, o.detail + "; over the " + num(budget, 3) + " s budget"};
        }
        const char* word = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
        std::printf("criterion %d: %s (%.1f s) %s\n", id, word, secs, o.detail.c_str());
        std::fflush(stdout);
        failed += o.status == Status::Fail;
    }
    return failed == 0 ? 0 : 1;
}
