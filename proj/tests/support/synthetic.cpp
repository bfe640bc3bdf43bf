#include "synthetic.hpp"

#include "ammlens/cpmm.hpp"
#include "ammlens/ingest.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace ammlens::testing {

namespace {

using nlohmann::json;

PoolGraphConfig synthetic_graph() {
    PoolGraphConfig cfg;
    cfg.tokens = {{"AAA", 18}, {"BBB", 6}, {"CCC", 8}};
    auto pool = [&](std::string id, const TokenId& t0, const TokenId& t1) {
        Pool p;
        p.id = std::move(id);
        p.venue = "uniswap";
        p.token0 = t0;
        p.token1 = t1;
        p.fee = BigRat(BigInt(3), BigInt(1000));
        return p;
    };
    cfg.pools = {
        pool("syn-aaa-bbb", cfg.tokens[0], cfg.tokens[1]),
        pool("syn-aaa-ccc", cfg.tokens[0], cfg.tokens[2]),
        pool("syn-bbb-ccc", cfg.tokens[1], cfg.tokens[2]),
    };
    NetworkConfig paths;
    paths.name = "syn-paths";
    paths.kind = NetworkConfig::Kind::Paths;
    paths.pool_ids = {"syn-aaa-bbb", "syn-aaa-ccc", "syn-bbb-ccc"};
    paths.max_hops = 2;
    NetworkConfig cycles;
    cycles.name = "syn-cycles";
    cycles.kind = NetworkConfig::Kind::Cycles;
    cycles.pool_ids = paths.pool_ids;
    cycles.max_cycle_len = 3;
    cfg.networks.emplace(paths.name, paths);
    cfg.networks.emplace(cycles.name, cycles);
    cfg.default_path_network = "syn-paths";
    cfg.default_cycle_network = "syn-cycles";
    return cfg;
}

double token_price(const std::string& symbol) {
    if (symbol == "AAA") return 2.0;
    if (symbol == "BBB") return 1.0;
    return 5.0;
}

} // namespace

SyntheticDataset make_synthetic_dataset(const SyntheticOptions& options) {
    SyntheticDataset data;
    data.graph = synthetic_graph();
    data.first_block = 1;
    data.last_block = options.blocks;

    // working reserves, consistent USD prices at the seed
    std::map<std::string, std::pair<BigInt, BigInt>> state = {
        {"syn-aaa-bbb", {BigInt("500000000000000000000000"), BigInt("1000000000000")}},
        {"syn-aaa-ccc", {BigInt("500000000000000000000000"), BigInt("20000000000000")}},
        {"syn-bbb-ccc", {BigInt("1000000000000"), BigInt("20000000000000")}},
    };
    for (const auto& [id, reserves] : state)
        data.reserves.push_back({0, id, reserves.first, reserves.second});

    PoolGraph graph(data.graph);
    std::mt19937_64 rng(options.seed);
    auto pick = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };

    std::set<Day> days;
    std::uint64_t tx_counter = 0;
    for (std::int64_t block = 1; block <= options.blocks; ++block) {
        Day day = Day(Day::parse("2020-09-12").index() +
                      static_cast<std::int32_t>((block - 1) / 50));
        data.block_days.add(block, day);
        days.insert(day);

        std::set<std::string> touched;
        std::int64_t n_events = pick(0, options.max_events_per_block);
        std::int32_t tx_index = 0;
        for (std::int64_t k = 0; k < n_events; ++k, ++tx_index) {
            bool multi = std::uniform_real_distribution<double>(0, 1)(rng) <
                         options.multi_swap_share;
            std::string tx_hash = "0xsyn" + std::to_string(tx_counter++);
            int swaps = multi ? 2 : 1;
            for (std::int32_t log_index = 0; log_index < swaps; ++log_index) {
                const Pool& base = data.graph.pools[static_cast<std::size_t>(pick(0, 2))];
                Direction dir = pick(0, 1) ? Direction::ZeroToOne : Direction::OneToZero;
                auto& reserves = state.at(base.id);

                Pool pool = base;
                pool.reserve0 = reserves.first;
                pool.reserve1 = reserves.second;
                // between 0.01% and 0.5% of the input-side reserve
                BigInt amount = pool.input_reserve(dir) * pick(100, 5000) / 1'000'000;
                if (amount < 1) amount = 1;
                BigInt out = swap_out(pool, dir, amount);

                SwapEvent event;
                event.block = block;
                event.tx_hash = tx_hash;
                event.tx_index = tx_index;
                event.log_index = log_index;
                event.pool_id = pool.id;
                event.token_in = pool.input_token(dir);
                event.token_out = pool.output_token(dir);
                event.amount_in = amount;
                event.amount_out = out;
                double scale = std::pow(10.0, static_cast<double>(event.token_in.decimals));
                event.usd_value =
                    to_double(amount) / scale * token_price(event.token_in.symbol);
                data.events.push_back(std::move(event));

                if (dir == Direction::ZeroToOne) {
                    reserves.first += amount;
                    reserves.second -= out;
                } else {
                    reserves.second += amount;
                    reserves.first -= out;
                }
                touched.insert(pool.id);
            }
        }
        for (const auto& id : touched) {
            const auto& reserves = state.at(id);
            data.reserves.push_back({block, id, reserves.first, reserves.second});
        }
    }

    // one block past the last record (same day), so a scan of
    // [first record + 1, last record + 1] always finds its day
    data.block_days.add(options.blocks + 1,
                        Day(Day::parse("2020-09-12").index() +
                            static_cast<std::int32_t>((options.blocks - 1) / 50)));

    for (Day day : days) {
        data.prices.add("AAA", day, {2.0, 2.1, 1.9});
        data.prices.add("BBB", day, {1.0, std::nullopt, std::nullopt});
        data.prices.add("CCC", day, {5.0, std::nullopt, std::nullopt});
    }
    return data;
}

void SyntheticDataset::write_files(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    {
        std::ofstream out(fs::path(dir) / "events.jsonl", std::ios::binary);
        write_events(out, events);
    }
    {
        std::ofstream out(fs::path(dir) / "reserves.jsonl", std::ios::binary);
        write_reserves(out, reserves);
    }
    {
        std::ofstream out(fs::path(dir) / "blocks.jsonl", std::ios::binary);
        for (const auto& [block, day] : block_days.entries()) {
            json j;
            j["block"] = std::to_string(block);
            j["day"] = day.to_string();
            out << j.dump() << '\n';
        }
    }
    {
        std::ofstream out(fs::path(dir) / "prices.jsonl", std::ios::binary);
        std::set<std::int32_t> day_set;
        for (const auto& [block, day] : block_days.entries()) day_set.insert(day.index());
        const std::vector<std::string> symbols{"AAA", "BBB", "CCC"};
        for (std::int32_t index : day_set) {
            Day day(index);
            for (const std::string& symbol : symbols) {
                const DayPrice* p = prices.find(symbol, day);
                if (!p) continue;
                json j;
                j["day"] = day.to_string();
                j["token"] = symbol;
                j["usd"] = p->usd;
                if (p->high) j["high"] = *p->high;
                if (p->low) j["low"] = *p->low;
                out << j.dump() << '\n';
            }
        }
    }
    {
        json j;
        j["tokens"] = json::array();
        for (const TokenId& t : graph.tokens)
            j["tokens"].push_back({{"symbol", t.symbol}, {"decimals", t.decimals}});
        j["pools"] = json::array();
        for (const Pool& p : graph.pools)
            j["pools"].push_back({{"id", p.id},
                                  {"venue", p.venue},
                                  {"token0", p.token0.symbol},
                                  {"token1", p.token1.symbol},
                                  {"fee", to_fraction_string(p.fee)}});
        json networks;
        for (const auto& [name, net] : graph.networks) {
            json n;
            n["kind"] = net.kind == NetworkConfig::Kind::Paths ? "paths" : "cycles";
            n["pools"] = net.pool_ids;
            n["max_hops"] = net.max_hops;
            n["max_cycle_len"] = net.max_cycle_len;
            networks[name] = n;
        }
        j["networks"] = networks;
        j["default_path_network"] = graph.default_path_network;
        j["default_cycle_network"] = graph.default_cycle_network;
        std::ofstream out(fs::path(dir) / "graph.json", std::ios::binary);
        out << j.dump(2) << '\n';
    }
}

} // namespace ammlens::testing
