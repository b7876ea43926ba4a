#include "rissec/channel.hpp"
#include "rissec/meijer_g.hpp"
#include "rissec/monte_carlo.hpp"
#include "rissec/secrecy.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace rissec;

namespace {

UowcLinkSpec water(Detection d) {
    UowcLinkSpec u;
    u.lambda = 0.2;
    u.sigma = 0.35;
    u.p = 1.4;
    u.q = 1.1647;
    u.r = 1.0;
    u.detection = d;
    u.avg_snr = 10.0;
    return u;
}

struct Baseline {
    RisCoefficients R = ris_coefficients({2.0, 2.0, 1.0, 1.0, 2, 10.0});
    RisCoefficients E = ris_coefficients({2.0, 2.0, 1.0, 1.0, 2, 1.0});
    UowcCoefficients U = uowc_coefficients(water(Detection::Heterodyne));
};

void BM_MeijerG_LowerGamma(benchmark::State& st) {
    const MeijerGSpec g{{1.0}, {2.3, 0.0}, 1, 1};
    const double x = std::pow(10.0, static_cast<double>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(meijer_g(g, x));
}
BENCHMARK(BM_MeijerG_LowerGamma)->DenseRange(-2, 2, 2);

// The xi composite at Lambda = 2: order (3,3;3,4).
void BM_MeijerG_Xi(benchmark::State& st) {
    const MeijerGSpec g{{1.0, 0.35, 0.85}, {1.4, 0.35, 0.85, 0.0}, 3, 3};
    for (auto _ : st) benchmark::DoNotOptimize(meijer_g(g, 0.7));
}
BENCHMARK(BM_MeijerG_Xi);

void BM_UowcCdf(benchmark::State& st) {
    const UowcCoefficients c = uowc_coefficients(water(Detection::IntensityModulation));
    const bool meijer = st.range(0) != 0;
    double g = 0.1;
    for (auto _ : st) {
        benchmark::DoNotOptimize(meijer ? cdf_snr_uowc_meijer(c, g) : cdf_snr_uowc(c, g));
        g = g < 100.0 ? g * 1.3 : 0.1;
    }
}
BENCHMARK(BM_UowcCdf)->Arg(0)->Arg(1);

void BM_SopLowerQuadrature(benchmark::State& st) {
    const Baseline b;
    SecrecyQuery q;
    q.epsilon0_bits = 0.01;
    for (auto _ : st) benchmark::DoNotOptimize(sop_lower_quadrature(b.R, b.U, b.E, q).value);
}
BENCHMARK(BM_SopLowerQuadrature)->Unit(benchmark::kMillisecond);

void BM_SopLowerClosed(benchmark::State& st) {
    const Baseline b;
    SecrecyQuery q;
    q.epsilon0_bits = 0.01;
    for (auto _ : st) benchmark::DoNotOptimize(sop_lower_closed(b.R, b.U, b.E, q).value);
}
BENCHMARK(BM_SopLowerClosed)->Unit(benchmark::kMillisecond);

void BM_AscQuadrature(benchmark::State& st) {
    const Baseline b;
    for (auto _ : st) benchmark::DoNotOptimize(asc_quadrature(b.R, b.U, b.E).value);
}
BENCHMARK(BM_AscQuadrature)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& st) {
    ScenarioConfig c;
    c.relay_link = {2.0, 2.0, 1.0, 1.0, 2, 10.0};
    c.eve_link = {2.0, 2.0, 1.0, 1.0, 2, 1.0};
    c.uowc_link = water(Detection::Heterodyne);
    c.model = st.range(0) != 0 ? SamplingModel::Physical : SamplingModel::Fitted;
    c.samples = 100000;
    c.batches = 20;
    c.threads = 1;
    for (auto _ : st) benchmark::DoNotOptimize(estimate_metrics(c).min_form.asc.mean);
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * c.samples));
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
