#include <benchmark/benchmark.h>

#include "radonms/ms.hpp"
#include "radonms/phantom.hpp"
#include "radonms/radon.hpp"
#include "radonms/spectral.hpp"

using namespace radonms;

namespace {

struct Problem {
  ImageGrid grid;
  ProjectionGeometry geo;
  Image f;

  explicit Problem(int n, int angles = 180)
      : grid(centered_grid(2, n, 1.0)),
        geo(ProjectionGeometry::covering_2d(grid, angles, grid.min_spacing())),
        f(rasterize_phantom(shepp_logan_2d(), grid)) {}
};

void BM_ForwardProject(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(forward_project(p.f, p.geo));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.geo.sample_count()));
}
BENCHMARK(BM_ForwardProject)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BackProject(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const Sinogram g = forward_project(p.f, p.geo);
  const auto mode = state.range(1) ? BackProjectionMode::point : BackProjectionMode::cell_average;
  for (auto _ : state) benchmark::DoNotOptimize(back_project(g, p.grid, mode));
}
BENCHMARK(BM_BackProject)->Args({128, 0})->Args({128, 1})->Unit(benchmark::kMillisecond);

void BM_Fbp(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const Sinogram g = forward_project(p.f, p.geo);
  const auto path = state.range(1) ? FbpPath::filter_then_backproject : FbpPath::backproject_then_filter;
  for (auto _ : state) benchmark::DoNotOptimize(fbp_reconstruct(g, p.grid, SpectralFilterConfig{}, path));
}
BENCHMARK(BM_Fbp)->Args({128, 0})->Args({128, 1})->Unit(benchmark::kMillisecond);

void BM_FractionalLaplacian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Image u = gaussian_image(centered_grid(2, n, 2.0), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(fractional_laplacian(u, SpectralFilterConfig{}));
}
BENCHMARK(BM_FractionalLaplacian)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MsSweep(benchmark::State& state) {
  const Problem p(64, 90);
  const Image truth = rasterize_phantom(two_disks_2d(), p.grid);
  const Sinogram g = forward_project(truth, p.geo);
  MSConfig cfg;
  cfg.beta = 1e-6;
  const PCFunction pc{threshold_init(truth, 2, cfg.delta_for(p.grid)), {0.0, 1.0}};
  for (auto _ : state) benchmark::DoNotOptimize(update_partition(pc, g, cfg));
}
BENCHMARK(BM_MsSweep)->Unit(benchmark::kMillisecond);

void BM_DenseOperator(benchmark::State& state) {
  const Problem p(16, 24);
  for (auto _ : state) benchmark::DoNotOptimize(build_dense_operator(p.geo, p.grid));
}
BENCHMARK(BM_DenseOperator)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
