#include <benchmark/benchmark.h>

#include <random>

#include "mctr/baselines.hpp"
#include "mctr/sim.hpp"

using namespace mctr;

namespace {

Scan2D make_scan(const TrackMap& track, int beams) {
    const Raycaster rc(track);
    SensorConfig sensor;
    sensor.beams = beams;
    std::mt19937_64 rng(1);
    return raycast_scan(rc, track.start_pose, sensor, rng);
}

void bench_controller_tick(benchmark::State& state, ControllerKind kind) {
    const TrackMap track = builtin_tracks().at("F");
    const Scan2D scan = make_scan(track, static_cast<int>(state.range(0)));
    ControllerVariant variant;
    variant.kind = kind;
    const auto controller = make_controller(variant);
    for (auto _ : state) {
        benchmark::DoNotOptimize(controller->tick(scan, 2.0, 0.02));
    }
}

void bench_delaunay(benchmark::State& state) {
    const TrackMap track = builtin_tracks().at("F");
    const Scan2D scan = make_scan(track, 1081);
    const BoundaryPoints points = subsample_scan(scan, 0.15);
    for (auto _ : state) {
        benchmark::DoNotOptimize(delaunay(points));
    }
}

void bench_raycast_scan(benchmark::State& state) {
    const TrackMap track = builtin_tracks().at("F");
    const Raycaster rc(track);
    SensorConfig sensor;
    sensor.beams = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(raycast_scan(rc, track.start_pose, sensor, rng));
    }
}

void bench_ccma(benchmark::State& state) {
    std::vector<Vec2> path;
    for (int i = 0; i < state.range(0); ++i) path.push_back({0.1 * i, std::sin(0.2 * i)});
    const SmoothingWeights w;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ccma_smooth(path, w));
    }
}

}  // namespace

BENCHMARK_CAPTURE(bench_controller_tick, mctr, ControllerKind::Mctr)->Arg(1081);
BENCHMARK_CAPTURE(bench_controller_tick, dtr, ControllerKind::Dtr)->Arg(1081);
BENCHMARK_CAPTURE(bench_controller_tick, ftg, ControllerKind::Ftg)->Arg(1081);
BENCHMARK(bench_delaunay);
BENCHMARK(bench_raycast_scan)->Arg(1081)->Arg(4096);
BENCHMARK(bench_ccma)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
