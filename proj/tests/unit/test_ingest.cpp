#include "ammlens/ingest.hpp"

#include "ammlens/cpmm.hpp"

#include "../support/synthetic.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ammlens;
using ammlens::testing::make_synthetic_dataset;
using ammlens::testing::SyntheticOptions;

namespace {

namespace fs = std::filesystem;

std::string fixture(const std::string& name) {
    return std::string(AMMLENS_TEST_DATA_DIR) + "/" + name;
}

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("ammlens-test-" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("event parsing validates, sorts and rejects duplicates") {
    PoolGraph graph(PoolGraphConfig::parse_file(fixture("two_venue/graph.json")));
    auto dir = temp_dir("events");

    SUBCASE("empty file gives an empty list") {
        std::ofstream(dir / "empty.jsonl").close();
        CHECK(parse_events((dir / "empty.jsonl").string(), graph).empty());
    }
    SUBCASE("out-of-order lines are re-sorted") {
        std::ofstream out(dir / "shuffled.jsonl");
        out << R"({"amount_in":"10","amount_out":"9","block":"7","log_index":"0","pool_id":"uni-btc-eth","token_in":"BTC","token_out":"ETH","tx_hash":"0x2","tx_index":"1"})"
            << '\n'
            << R"({"amount_in":"10","amount_out":"9","block":"7","log_index":"0","pool_id":"uni-btc-eth","token_in":"BTC","token_out":"ETH","tx_hash":"0x1","tx_index":"0"})"
            << '\n';
        out.close();
        auto events = parse_events((dir / "shuffled.jsonl").string(), graph);
        REQUIRE(events.size() == 2);
        CHECK(events[0].tx_hash == "0x1");
        CHECK(events[1].tx_hash == "0x2");
    }
    SUBCASE("malformed line reports its number") {
        std::ofstream out(dir / "bad.jsonl");
        out << R"({"amount_in":"10"})" << '\n';
        out.close();
        try {
            parse_events((dir / "bad.jsonl").string(), graph);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 1);
        }
    }
    SUBCASE("duplicate ordering keys are rejected") {
        std::ofstream out(dir / "dup.jsonl");
        for (int i = 0; i < 2; ++i)
            out << R"({"amount_in":"10","amount_out":"9","block":"7","log_index":"0","pool_id":"uni-btc-eth","token_in":"BTC","token_out":"ETH","tx_hash":"0x1","tx_index":"0"})"
                << '\n';
        out.close();
        CHECK_THROWS_AS(parse_events((dir / "dup.jsonl").string(), graph), ParseError);
    }
    SUBCASE("unknown pool or mismatched token is rejected") {
        std::ofstream out(dir / "unknown.jsonl");
        out << R"({"amount_in":"10","amount_out":"9","block":"7","log_index":"0","pool_id":"nope","token_in":"BTC","token_out":"ETH","tx_hash":"0x1","tx_index":"0"})"
            << '\n';
        out.close();
        CHECK_THROWS_AS(parse_events((dir / "unknown.jsonl").string(), graph), ParseError);
    }
}

TEST_CASE("fixture files round-trip byte-identically through the serializers") {
    PoolGraph graph(PoolGraphConfig::parse_file(fixture("two_venue/graph.json")));
    auto events = parse_events(fixture("two_venue/events.jsonl"), graph);
    std::ostringstream out;
    write_events(out, events);
    CHECK(out.str() == slurp(fixture("two_venue/events.jsonl")));

    auto records = parse_reserves(fixture("two_venue/reserves.jsonl"), graph);
    std::ostringstream rout;
    write_reserves(rout, records);
    CHECK(rout.str() == slurp(fixture("two_venue/reserves.jsonl")));
}

TEST_CASE("snapshots use the latest record strictly before the block") {
    PoolGraphConfig cfg;
    cfg.tokens = {{"A", 18}, {"B", 18}};
    Pool p;
    p.id = "p";
    p.venue = "uniswap";
    p.token0 = cfg.tokens[0];
    p.token1 = cfg.tokens[1];
    cfg.pools = {p};
    PoolGraph graph(cfg);

    SnapshotStore store({{5, "p", BigInt(100), BigInt(200)},
                         {9, "p", BigInt(111), BigInt(222)}});

    CHECK(store.at_block_start(9).find("p")->first == 100);
    CHECK(store.at_block_start(10).find("p")->first == 111);
    CHECK(store.at_block_start(5) .find("p") == nullptr); // nothing strictly earlier
    CHECK(store.at_block_start(6).find("p")->first == 100);
    CHECK(store.first_complete_block({"p"}) == 6);
}

TEST_CASE("multi-swap filter drops whole transactions and is idempotent") {
    auto event = [](std::int64_t block, std::int32_t tx, std::int32_t log,
                    const std::string& hash) {
        SwapEvent e;
        e.block = block;
        e.tx_index = tx;
        e.log_index = log;
        e.tx_hash = hash;
        e.amount_in = 1;
        return e;
    };
    std::vector<SwapEvent> events = {
        event(1, 0, 0, "0xa"),          // single: kept
        event(1, 1, 0, "0xb"),          // pair: dropped
        event(1, 1, 1, "0xb"),
        event(2, 0, 0, "0xc"),          // single: kept
        event(2, 1, 0, "0xd"),          // triple: dropped
        event(2, 1, 1, "0xd"),
        event(2, 1, 2, "0xd"),
    };
    FilterResult first = filter_independent_swaps(events);
    CHECK(first.kept.size() == 2);
    CHECK(first.dropped == 5);
    CHECK(first.kept[0].tx_hash == "0xa");
    CHECK(first.kept[1].tx_hash == "0xc");

    FilterResult second = filter_independent_swaps(first.kept);
    CHECK(second.kept.size() == first.kept.size());
    CHECK(second.dropped == 0);
}

TEST_CASE("synthetic datasets validate clean and replay forward") {
    SyntheticOptions options;
    options.blocks = 100;
    auto data = make_synthetic_dataset(options);
    REQUIRE(!data.events.empty());

    PoolGraph graph(data.graph);
    SnapshotStore store(data.reserves);

    SUBCASE("self-consistent by construction") {
        auto report = validate_consistency(data.events, store, graph, 1e-6);
        CHECK(report.events_checked == data.events.size());
        CHECK(report.flags.empty());
    }

    SUBCASE("a corrupted output is flagged exactly once") {
        auto corrupted = data.events;
        // pick a victim with no later same-block event on its pool, so the
        // corruption cannot leak into another event's replayed reserves
        std::size_t victim_index = corrupted.size();
        for (std::size_t i = corrupted.size() / 2; i < corrupted.size(); ++i) {
            bool last_on_pool = true;
            for (std::size_t j = i + 1; j < corrupted.size(); ++j)
                if (corrupted[j].block == corrupted[i].block &&
                    corrupted[j].pool_id == corrupted[i].pool_id)
                    last_on_pool = false;
            if (last_on_pool) {
                victim_index = i;
                break;
            }
        }
        REQUIRE(victim_index < corrupted.size());
        SwapEvent& victim = corrupted[victim_index];
        victim.amount_out += victim.amount_out / 100 + 1; // +1%
        auto report = validate_consistency(corrupted, store, graph, 1e-6);
        REQUIRE(report.flags.size() == 1);
        CHECK(report.flags[0].tx_hash == victim.tx_hash);
    }

    SUBCASE("snapshots are deterministic across rebuilds") {
        SnapshotStore again(data.reserves);
        for (std::int64_t block : {2L, 17L, 50L, 99L}) {
            BlockSnapshot a = store.at_block_start(block);
            BlockSnapshot b = again.at_block_start(block);
            CHECK(a.reserves == b.reserves);
        }
    }

    SUBCASE("block events replay one snapshot into the next") {
        for (std::int64_t block = data.first_block; block < data.last_block; ++block) {
            BlockSnapshot snap = store.at_block_start(block);
            std::map<std::string, std::pair<BigInt, BigInt>> state = snap.reserves;
            for (const SwapEvent& e : data.events) {
                if (e.block != block) continue;
                auto& reserves = state.at(e.pool_id);
                const Pool* base = graph.find_pool(e.pool_id);
                if (base->token0 == e.token_in) {
                    reserves.first += e.amount_in;
                    reserves.second -= e.amount_out;
                } else {
                    reserves.second += e.amount_in;
                    reserves.first -= e.amount_out;
                }
            }
            BlockSnapshot next = store.at_block_start(block + 1);
            for (const auto& [pool_id, reserves] : next.reserves) {
                const auto& replayed = state.at(pool_id);
                BigInt d0 = replayed.first - reserves.first;
                BigInt d1 = replayed.second - reserves.second;
                CHECK(abs(d0) <= 1);
                CHECK(abs(d1) <= 1);
            }
        }
    }
}

TEST_CASE("same-block events on one pool are checked against replayed reserves") {
    PoolGraphConfig cfg;
    cfg.tokens = {{"A", 18}, {"B", 18}};
    Pool p;
    p.id = "p";
    p.venue = "uniswap";
    p.token0 = cfg.tokens[0];
    p.token1 = cfg.tokens[1];
    p.fee = BigRat(BigInt(3), BigInt(1000));
    cfg.pools = {p};
    PoolGraph graph(cfg);

    BigInt r0("500000000000000000000"), r1("800000000000000000000");
    SnapshotStore store({{10, "p", r0, r1}});

    Pool live = p;
    live.reserve0 = r0;
    live.reserve1 = r1;
    BigInt in1 = r0 / 100;
    BigInt out1 = swap_out(live, Direction::ZeroToOne, in1);
    live.reserve0 += in1;
    live.reserve1 -= out1;
    BigInt in2 = r1 / 50;
    BigInt out2 = swap_out(live, Direction::OneToZero, in2);

    SwapEvent e1;
    e1.block = 11;
    e1.tx_hash = "0x1";
    e1.tx_index = 0;
    e1.pool_id = "p";
    e1.token_in = cfg.tokens[0];
    e1.token_out = cfg.tokens[1];
    e1.amount_in = in1;
    e1.amount_out = out1;
    SwapEvent e2 = e1;
    e2.tx_hash = "0x2";
    e2.tx_index = 1;
    e2.token_in = cfg.tokens[1];
    e2.token_out = cfg.tokens[0];
    e2.amount_in = in2;
    e2.amount_out = out2;

    auto report = validate_consistency({e1, e2}, store, graph, 1e-9);
    CHECK(report.events_checked == 2);
    CHECK(report.flags.empty());

    // the same second event against the raw snapshot would not match
    SwapEvent stale = e2;
    stale.amount_out = swap_out(Pool{p.id, p.venue, p.token0, p.token1, r0, r1, p.fee},
                                Direction::OneToZero, in2);
    CHECK(stale.amount_out != e2.amount_out);
    auto bad = validate_consistency({e1, stale}, store, graph, 1e-9);
    CHECK(bad.flags.size() == 1);
}
