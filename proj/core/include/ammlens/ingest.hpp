#pragma once

#include "ammlens/graph.hpp"
#include "ammlens/market_data.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ammlens {

// JSON-lines inputs, one object per line, snake_case fields, integers as
// decimal strings. Parsers validate against the graph config and throw
// ParseError with the offending line.

std::vector<SwapEvent> parse_events(const std::string& path, const PoolGraph& graph);
std::vector<ReserveRecord> parse_reserves(const std::string& path, const PoolGraph& graph);
PriceTable parse_prices(const std::string& path);
BlockDayIndex parse_blocks(const std::string& path);

// Canonical serializers; parse -> write round-trips byte-identically for
// files in canonical form.
void write_events(std::ostream& out, const std::vector<SwapEvent>& events);
void write_reserves(std::ostream& out, const std::vector<ReserveRecord>& records);

// Beginning-of-block snapshots: for block n, the latest end-of-block record
// per pool at any block < n. Lookup is O(log records) per pool.
class SnapshotStore {
public:
    explicit SnapshotStore(std::vector<ReserveRecord> records);

    BlockSnapshot at_block_start(std::int64_t block) const;

    // Smallest block for which every listed pool has a snapshot entry.
    std::optional<std::int64_t> first_complete_block(const std::vector<std::string>& pool_ids) const;

    std::optional<std::int64_t> min_record_block() const;
    std::optional<std::int64_t> max_record_block() const;

private:
    // per pool: records sorted ascending by block
    std::map<std::string, std::vector<std::pair<std::int64_t, std::pair<BigInt, BigInt>>>> per_pool_;
};

struct FilterResult {
    std::vector<SwapEvent> kept;
    std::size_t dropped = 0;
};

// Drops every event whose tx_hash carries more than one swap event.
FilterResult filter_independent_swaps(std::vector<SwapEvent> events);

struct ConsistencyFlag {
    std::int64_t block = 0;
    std::string tx_hash;
    std::string pool_id;
    BigInt expected_out;
    BigInt recorded_out;
    double relative_deviation = 0;
};

struct ConsistencyReport {
    std::size_t events_checked = 0;
    std::size_t events_skipped = 0; // pool missing from snapshot
    std::vector<ConsistencyFlag> flags;
};

// Recomputes each event's output from the beginning-of-block snapshot (with
// prior same-block events on the pool replayed first, using recorded
// amounts) and flags relative deviations above tolerance.
ConsistencyReport validate_consistency(const std::vector<SwapEvent>& events,
                                       const SnapshotStore& snapshots, const PoolGraph& graph,
                                       double tolerance = 1e-6);

} // namespace ammlens
