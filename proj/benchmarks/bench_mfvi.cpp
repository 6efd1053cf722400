#include <benchmark/benchmark.h>

#include "mfvi/cavi.hpp"
#include "mfvi/fp.hpp"
#include "mfvi/jko.hpp"
#include "mfvi/sde.hpp"

using namespace mfvi;

namespace {

Model coupled2d() {
    Eigen::MatrixXd A(2, 2);
    A << 1, 0.5, 0.5, 1;
    return QuadraticModel(A, Eigen::VectorXd::Zero(2));
}

ProductMeasure init2(const Grid1D& g) {
    ProductMeasure nu;
    nu.marginals.push_back(gaussian_on_grid(g, 2.0, 1.0));
    nu.marginals.push_back(gaussian_on_grid(g, -2.0, 1.0));
    return nu;
}

void bm_w2(benchmark::State& state) {
    Grid1D g(-8.0, 8.0, static_cast<int>(state.range(0)));
    auto a = gaussian_on_grid(g, 0.5, 1.0);
    auto b = gaussian_on_grid(g, -0.5, 1.3);
    int levels = 4 * g.cells;
    for (auto _ : state) benchmark::DoNotOptimize(w2(a, b, levels));
}
BENCHMARK(bm_w2)->Arg(128)->Arg(512)->Arg(2048);

void bm_psi_profile(benchmark::State& state) {
    Grid1D g(-8.0, 8.0, static_cast<int>(state.range(0)));
    Model m = coupled2d();
    auto nu = init2(g);
    for (auto _ : state) benchmark::DoNotOptimize(psi_profile(m, 0, nu));
}
BENCHMARK(bm_psi_profile)->Arg(128)->Arg(512)->Arg(2048);

void bm_cavi_sweep(benchmark::State& state) {
    Grid1D g(-8.0, 8.0, static_cast<int>(state.range(0)));
    Model m = coupled2d();
    auto nu = init2(g);
    for (auto _ : state) {
        ProductMeasure cur = nu;
        for (int i = 0; i < 2; ++i) cur.marginals[i] = cavi_update(m, i, cur);
        benchmark::DoNotOptimize(cur);
    }
}
BENCHMARK(bm_cavi_sweep)->Arg(128)->Arg(512)->Arg(2048);

void bm_jko_inner_step(benchmark::State& state) {
    Grid1D g(-8.0, 8.0, 512);
    Model m = coupled2d();
    auto nu = init2(g);
    JkoConfig cfg;
    cfg.h = 0.05;
    cfg.levels = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(jko_inner_step(m, 0, nu, cfg));
}
BENCHMARK(bm_jko_inner_step)->Arg(512)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

void bm_fp_step(benchmark::State& state) {
    Grid1D g(-8.0, 8.0, static_cast<int>(state.range(0)));
    Model m = coupled2d();
    auto st = fp_init(m, init2(g), {});
    FpConfig cfg;
    cfg.dt = 1e-3;
    for (auto _ : state) {
        st = fp_step(st, m, cfg);
        benchmark::DoNotOptimize(st);
    }
}
BENCHMARK(bm_fp_step)->Arg(128)->Arg(512)->Arg(2048);

void bm_mkv_step(benchmark::State& state) {
    Grid1D g(-8.0, 8.0, 256);
    Model m = coupled2d();
    SdeConfig cfg;
    cfg.particles = static_cast<int>(state.range(0));
    cfg.dt = 1e-3;
    ParticleCloud cloud;
    cloud.count = cfg.particles;
    cloud.dim = 2;
    cloud.positions.resize(static_cast<size_t>(cloud.count) * 2);
    CounterRng rng{17};
    for (int p = 0; p < cloud.count; ++p)
        for (int i = 0; i < 2; ++i) cloud.at(p, i) = rng.normal(0, p, i);
    for (auto _ : state) {
        cloud = mkv_step(cloud, m, {g, g}, cfg);
        benchmark::DoNotOptimize(cloud);
    }
}
BENCHMARK(bm_mkv_step)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
