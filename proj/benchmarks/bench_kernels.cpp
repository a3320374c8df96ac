#include <benchmark/benchmark.h>

#include <vector>

#include "dfcv/fog.hpp"
#include "dfcv/radio.hpp"
#include "dfcv/rng.hpp"
#include "dfcv/types.hpp"

namespace {

struct CollisionInstance {
    std::vector<dfcv::Transmission> txs;
    std::vector<dfcv::Receiver> rxs;
};

CollisionInstance make_collision_instance(int n_tx, int n_rx) {
    dfcv::Rng rng = dfcv::Rng::labeled(12345, "bench-collisions");
    CollisionInstance inst;
    inst.txs.reserve(n_tx);
    inst.rxs.reserve(n_rx);
    for (int i = 0; i < n_tx; ++i) {
        dfcv::Transmission t;
        t.transmitter_id = i;
        t.origin = {rng.uniform01() * 2000.0, rng.uniform01() * 50.0};
        t.range_m = 300.0;
        t.message_id = i;
        t.start_slot = static_cast<int>(rng.uniform_int(64));
        t.slot_span = 1 + static_cast<int>(rng.uniform_int(3));
        inst.txs.push_back(t);
    }
    for (int i = 0; i < n_rx; ++i) {
        dfcv::Receiver r;
        r.id = 100000 + i;
        r.position = {rng.uniform01() * 2000.0, rng.uniform01() * 50.0};
        inst.rxs.push_back(r);
    }
    return inst;
}

void BM_DetectCollisionsSerial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CollisionInstance inst = make_collision_instance(n, n);
    for (auto _ : state) {
        auto out = dfcv::detect_collisions_serial(inst.txs, inst.rxs);
        benchmark::DoNotOptimize(out);
    }
    state.SetComplexityN(n);
}

void BM_DetectCollisionsParallel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CollisionInstance inst = make_collision_instance(n, n);
    for (auto _ : state) {
        auto out = dfcv::detect_collisions(inst.txs, inst.rxs);
        benchmark::DoNotOptimize(out);
    }
    state.SetComplexityN(n);
}

struct AssociateInstance {
    std::vector<dfcv::Vehicle> vehicles;
    std::vector<dfcv::Rsu> rsus;
};

AssociateInstance make_associate_instance(int n_vehicles, int n_rsus) {
    dfcv::Rng rng = dfcv::Rng::labeled(54321, "bench-associate");
    AssociateInstance inst;
    const double road = 250.0 * n_rsus;
    inst.vehicles.reserve(n_vehicles);
    for (int i = 0; i < n_vehicles; ++i) {
        dfcv::Vehicle v;
        v.id = i;
        v.position = {rng.uniform01() * road, rng.uniform01() * 12.0};
        inst.vehicles.push_back(v);
    }
    inst.rsus.reserve(n_rsus);
    for (int i = 0; i < n_rsus; ++i) {
        dfcv::Rsu r;
        r.id = i;
        r.position = {(i + 0.5) * 250.0, -5.0};
        r.range_m = 300.0;
        r.base_station_id = i / 2;
        inst.rsus.push_back(r);
    }
    return inst;
}

void BM_AssociateSerial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const AssociateInstance inst = make_associate_instance(n, 64);
    for (auto _ : state) {
        auto out = dfcv::associate_serial(inst.vehicles, inst.rsus);
        benchmark::DoNotOptimize(out);
    }
    state.SetComplexityN(n);
}

void BM_AssociateParallel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const AssociateInstance inst = make_associate_instance(n, 64);
    for (auto _ : state) {
        auto out = dfcv::associate(inst.vehicles, inst.rsus);
        benchmark::DoNotOptimize(out);
    }
    state.SetComplexityN(n);
}

}  // namespace

BENCHMARK(BM_DetectCollisionsSerial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_DetectCollisionsParallel)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_AssociateSerial)->Arg(1000)->Arg(4000)->Arg(16000);
BENCHMARK(BM_AssociateParallel)->Arg(1000)->Arg(4000)->Arg(16000);

BENCHMARK_MAIN();
