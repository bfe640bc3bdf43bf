#include "ammlens/arbitrage.hpp"
#include "ammlens/cpmm.hpp"
#include "ammlens/ingest.hpp"
#include "ammlens/router.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace ammlens;

namespace {

Pool bench_pool() {
    Pool p;
    p.id = "bench";
    p.venue = "uniswap";
    p.token0 = {"A", 18};
    p.token1 = {"B", 18};
    p.reserve0 = BigInt("5000000000000000000000000");
    p.reserve1 = BigInt("3000000000000000000000000");
    return p;
}

std::vector<EffectivePool> bench_paths(std::size_t n) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> rate(0.5, 2.0);
    std::vector<EffectivePool> paths;
    for (std::size_t i = 0; i < n; ++i) {
        EffectivePool ep;
        ep.b = 1e6 * (1.0 + static_cast<double>(i));
        ep.a = ep.b * rate(rng);
        ep.c = 0.997;
        ep.in_token = {"IN", 18};
        ep.out_token = {"OUT", 18};
        paths.push_back(ep);
    }
    return paths;
}

void BM_SwapOutExact(benchmark::State& state) {
    Pool p = bench_pool();
    BigInt amount("12345678901234567890");
    for (auto _ : state) {
        BigInt out = swap_out(p, Direction::ZeroToOne, amount);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_SwapOutExact);

void BM_EffectiveEval(benchmark::State& state) {
    EffectivePool ep = effective_of_pool(bench_pool(), Direction::ZeroToOne);
    double x = 1e20;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval(ep, x));
        x += 1.0;
    }
}
BENCHMARK(BM_EffectiveEval);

void BM_OptimalSplit(benchmark::State& state) {
    auto paths = bench_paths(static_cast<std::size_t>(state.range(0)));
    double input = 2e5;
    for (auto _ : state) {
        RoutePlan plan = optimal_split(paths, input);
        benchmark::DoNotOptimize(plan.total_output);
    }
}
BENCHMARK(BM_OptimalSplit)->Arg(2)->Arg(3)->Arg(5);

void BM_SnapshotLookup(benchmark::State& state) {
    std::vector<ReserveRecord> records;
    for (std::int64_t block = 0; block < 10'000; block += 7)
        records.push_back({block, "bench", BigInt(block + 1), BigInt(block + 2)});
    SnapshotStore store(std::move(records));
    std::int64_t block = 1;
    for (auto _ : state) {
        BlockSnapshot snap = store.at_block_start(block);
        benchmark::DoNotOptimize(snap);
        block = (block + 997) % 10'000;
    }
}
BENCHMARK(BM_SnapshotLookup);

void BM_CycleScan(benchmark::State& state) {
    // the five-token network at a consistent snapshot
    PoolGraph graph(PoolGraphConfig::parse_file(std::string(AMMLENS_CONFIG_DIR) +
                                                "/default_graph.json"));
    const NetworkConfig* net = graph.find_network("cycles-5token");
    auto cycles = enumerate_cycles(graph, net->pool_ids, {}, net->max_cycle_len);

    BlockSnapshot snap;
    snap.block = 1;
    for (const Pool& p : graph.pools()) {
        auto unit = [](const TokenId& t) {
            BigInt u = 1;
            for (unsigned i = 0; i < t.decimals; ++i) u *= 10;
            return u;
        };
        snap.reserves[p.id] = {unit(p.token0) * 1'000'000, unit(p.token1) * 1'000'000};
    }
    PriceTable prices;
    Day day = Day::parse("2021-01-04");
    for (const TokenId& t : graph.tokens()) prices.add(t.symbol, day, {1.0, {}, {}});

    for (auto _ : state) {
        auto found = scan_block(snap, cycles, graph, prices, day, 30.0);
        benchmark::DoNotOptimize(found);
    }
    state.counters["cycles"] = static_cast<double>(cycles.size());
}
BENCHMARK(BM_CycleScan);

} // namespace

BENCHMARK_MAIN();
