#include "ammlens/ingest.hpp"

#include "ammlens/cpmm.hpp"
#include "ammlens/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace ammlens {

namespace {

using nlohmann::json;

// Applies fn to every non-blank line, converting failures into ParseError
// with the offending line number.
template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path, lineno, e.what());
        }
        try {
            fn(j, lineno);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(path, lineno, e.what());
        }
    }
}

std::string get_string(const json& j, const char* field) {
    if (!j.contains(field)) throw std::runtime_error(std::string("missing field ") + field);
    if (!j[field].is_string())
        throw std::runtime_error(std::string("field ") + field + " must be a string");
    return j[field].get<std::string>();
}

BigInt get_bigint(const json& j, const char* field) {
    try {
        return parse_bigint(get_string(j, field));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("field ") + field + ": " + e.what());
    }
}

std::int64_t get_int64(const json& j, const char* field) {
    BigInt v = get_bigint(j, field);
    if (v < 0 || v > std::numeric_limits<std::int64_t>::max())
        throw std::runtime_error(std::string("field ") + field + " out of range");
    return v.convert_to<std::int64_t>();
}

double get_number(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number())
        throw std::runtime_error(std::string("field ") + field + " must be a number");
    return j[field].get<double>();
}

json event_to_json(const SwapEvent& e) {
    json j;
    j["amount_in"] = to_decimal_string(e.amount_in);
    j["amount_out"] = to_decimal_string(e.amount_out);
    j["block"] = std::to_string(e.block);
    j["log_index"] = std::to_string(e.log_index);
    j["pool_id"] = e.pool_id;
    j["token_in"] = e.token_in.symbol;
    j["token_out"] = e.token_out.symbol;
    j["tx_hash"] = e.tx_hash;
    j["tx_index"] = std::to_string(e.tx_index);
    if (e.usd_value) j["usd_value"] = *e.usd_value;
    return j;
}

} // namespace

std::vector<SwapEvent> parse_events(const std::string& path, const PoolGraph& graph) {
    std::vector<SwapEvent> events;
    std::set<std::tuple<std::int64_t, std::int32_t, std::int32_t>> seen;
    for_each_line(path, [&](const json& j, std::size_t) {
        SwapEvent e;
        e.block = get_int64(j, "block");
        e.tx_hash = get_string(j, "tx_hash");
        e.tx_index = static_cast<std::int32_t>(get_int64(j, "tx_index"));
        e.log_index = static_cast<std::int32_t>(get_int64(j, "log_index"));
        e.pool_id = get_string(j, "pool_id");
        const Pool* pool = graph.find_pool(e.pool_id);
        if (!pool) throw std::runtime_error("unknown pool " + e.pool_id);
        std::string in_sym = get_string(j, "token_in");
        std::string out_sym = get_string(j, "token_out");
        if (in_sym == out_sym) throw std::runtime_error("token_in equals token_out");
        auto resolve = [&](const std::string& sym) -> TokenId {
            if (pool->token0.symbol == sym) return pool->token0;
            if (pool->token1.symbol == sym) return pool->token1;
            throw std::runtime_error("token " + sym + " not in pool " + e.pool_id);
        };
        e.token_in = resolve(in_sym);
        e.token_out = resolve(out_sym);
        e.amount_in = get_bigint(j, "amount_in");
        e.amount_out = get_bigint(j, "amount_out");
        if (e.amount_in <= 0) throw std::runtime_error("amount_in must be positive");
        if (e.amount_out < 0) throw std::runtime_error("amount_out must be non-negative");
        if (j.contains("usd_value")) e.usd_value = get_number(j, "usd_value");
        if (!seen.insert(e.ordering_key()).second)
            throw std::runtime_error("duplicate event ordering key");
        events.push_back(std::move(e));
    });
    std::sort(events.begin(), events.end(),
              [](const SwapEvent& a, const SwapEvent& b) {
                  return a.ordering_key() < b.ordering_key();
              });
    return events;
}

std::vector<ReserveRecord> parse_reserves(const std::string& path, const PoolGraph& graph) {
    std::vector<ReserveRecord> records;
    std::set<std::pair<std::int64_t, std::string>> seen;
    for_each_line(path, [&](const json& j, std::size_t) {
        ReserveRecord r;
        r.block = get_int64(j, "block");
        r.pool_id = get_string(j, "pool_id");
        if (!graph.find_pool(r.pool_id)) throw std::runtime_error("unknown pool " + r.pool_id);
        r.reserve0 = get_bigint(j, "reserve0");
        r.reserve1 = get_bigint(j, "reserve1");
        if (r.reserve0 < 0 || r.reserve1 < 0)
            throw std::runtime_error("reserves must be non-negative");
        if (!seen.insert({r.block, r.pool_id}).second)
            throw std::runtime_error("duplicate reserve record for pool " + r.pool_id +
                                     " at block " + std::to_string(r.block));
        records.push_back(std::move(r));
    });
    return records;
}

PriceTable parse_prices(const std::string& path) {
    PriceTable table;
    for_each_line(path, [&](const json& j, std::size_t) {
        std::string token = get_string(j, "token");
        Day day = Day::parse(get_string(j, "day"));
        DayPrice price;
        price.usd = get_number(j, "usd");
        if (j.contains("high")) price.high = get_number(j, "high");
        if (j.contains("low")) price.low = get_number(j, "low");
        table.add(token, day, price);
    });
    return table;
}

BlockDayIndex parse_blocks(const std::string& path) {
    BlockDayIndex index;
    for_each_line(path, [&](const json& j, std::size_t) {
        index.add(get_int64(j, "block"), Day::parse(get_string(j, "day")));
    });
    return index;
}

void write_events(std::ostream& out, const std::vector<SwapEvent>& events) {
    for (const SwapEvent& e : events) out << event_to_json(e).dump() << '\n';
}

void write_reserves(std::ostream& out, const std::vector<ReserveRecord>& records) {
    for (const ReserveRecord& r : records) {
        json j;
        j["block"] = std::to_string(r.block);
        j["pool_id"] = r.pool_id;
        j["reserve0"] = to_decimal_string(r.reserve0);
        j["reserve1"] = to_decimal_string(r.reserve1);
        out << j.dump() << '\n';
    }
}

SnapshotStore::SnapshotStore(std::vector<ReserveRecord> records) {
    for (ReserveRecord& r : records)
        per_pool_[r.pool_id].emplace_back(r.block,
                                          std::pair(std::move(r.reserve0), std::move(r.reserve1)));
    for (auto& [pool, rs] : per_pool_) {
        std::sort(rs.begin(), rs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < rs.size(); ++i)
            if (rs[i].first == rs[i - 1].first)
                throw std::invalid_argument("duplicate reserve record for pool " + pool);
    }
}

BlockSnapshot SnapshotStore::at_block_start(std::int64_t block) const {
    BlockSnapshot snap;
    snap.block = block;
    for (const auto& [pool, rs] : per_pool_) {
        // latest record strictly before the block
        auto it = std::lower_bound(rs.begin(), rs.end(), block,
                                   [](const auto& rec, std::int64_t b) { return rec.first < b; });
        if (it == rs.begin()) continue; // no prior record: pool unavailable
        --it;
        snap.reserves.emplace(pool, it->second);
    }
    return snap;
}

std::optional<std::int64_t> SnapshotStore::first_complete_block(
    const std::vector<std::string>& pool_ids) const {
    std::int64_t first = std::numeric_limits<std::int64_t>::min();
    for (const auto& id : pool_ids) {
        auto it = per_pool_.find(id);
        if (it == per_pool_.end() || it->second.empty()) return std::nullopt;
        first = std::max(first, it->second.front().first + 1);
    }
    return first == std::numeric_limits<std::int64_t>::min() ? std::nullopt
                                                             : std::optional(first);
}

std::optional<std::int64_t> SnapshotStore::min_record_block() const {
    std::optional<std::int64_t> out;
    for (const auto& [pool, rs] : per_pool_)
        if (!rs.empty() && (!out || rs.front().first < *out)) out = rs.front().first;
    return out;
}

std::optional<std::int64_t> SnapshotStore::max_record_block() const {
    std::optional<std::int64_t> out;
    for (const auto& [pool, rs] : per_pool_)
        if (!rs.empty() && (!out || rs.back().first > *out)) out = rs.back().first;
    return out;
}

FilterResult filter_independent_swaps(std::vector<SwapEvent> events) {
    std::map<std::string, int> per_tx;
    for (const SwapEvent& e : events) ++per_tx[e.tx_hash];
    FilterResult result;
    result.kept.reserve(events.size());
    for (SwapEvent& e : events) {
        if (per_tx[e.tx_hash] == 1)
            result.kept.push_back(std::move(e));
        else
            ++result.dropped;
    }
    return result;
}

ConsistencyReport validate_consistency(const std::vector<SwapEvent>& events,
                                       const SnapshotStore& snapshots, const PoolGraph& graph,
                                       double tolerance) {
    std::vector<const SwapEvent*> ordered;
    ordered.reserve(events.size());
    for (const SwapEvent& e : events) ordered.push_back(&e);
    std::sort(ordered.begin(), ordered.end(), [](const SwapEvent* a, const SwapEvent* b) {
        return a->ordering_key() < b->ordering_key();
    });

    ConsistencyReport report;
    std::int64_t current_block = -1;
    std::map<std::string, std::pair<BigInt, BigInt>> replayed;
    BlockSnapshot snap;

    for (const SwapEvent* e : ordered) {
        if (e->block != current_block) {
            current_block = e->block;
            snap = snapshots.at_block_start(current_block);
            replayed.clear();
        }
        auto state = replayed.find(e->pool_id);
        const std::pair<BigInt, BigInt>* reserves;
        if (state != replayed.end()) {
            reserves = &state->second;
        } else {
            reserves = snap.find(e->pool_id);
            if (!reserves) {
                ++report.events_skipped;
                continue;
            }
        }
        const Pool* base = graph.find_pool(e->pool_id);
        Pool pool = *base;
        pool.reserve0 = reserves->first;
        pool.reserve1 = reserves->second;
        if (!pool.active()) {
            ++report.events_skipped;
            continue;
        }
        Direction dir =
            pool.token0 == e->token_in ? Direction::ZeroToOne : Direction::OneToZero;
        BigInt computed = swap_out(pool, dir, e->amount_in);
        ++report.events_checked;

        double rel;
        if (computed == 0)
            rel = e->amount_out == 0 ? 0.0 : std::numeric_limits<double>::infinity();
        else
            rel = std::abs(to_double(BigRat(e->amount_out - computed) / BigRat(computed)));
        if (rel > tolerance)
            report.flags.push_back(
                {e->block, e->tx_hash, e->pool_id, computed, e->amount_out, rel});

        // replay with the recorded amounts so later checks see the dataset's
        // own evolution
        std::pair<BigInt, BigInt> next = {pool.reserve0, pool.reserve1};
        if (dir == Direction::ZeroToOne) {
            next.first += e->amount_in;
            next.second -= e->amount_out;
        } else {
            next.second += e->amount_in;
            next.first -= e->amount_out;
        }
        replayed[e->pool_id] = std::move(next);
    }
    return report;
}

} // namespace ammlens
