#pragma once

#include "ammlens/cpmm.hpp"
#include "ammlens/graph.hpp"
#include "ammlens/market_data.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ammlens {

// A simple directed cycle of pools. Hops are stored in canonical rotation
// (the hop with the smallest pool id first); the two traversal directions of
// the same pool ring are distinct cycles.
struct Cycle {
    std::vector<PathHop> hops;
    TokenId base_token;        // input token of the first hop after rotation
    std::string canonical_key;

    std::vector<std::string> pool_ids() const;
};

// All simple directed cycles of length in [2, max_len] over the given pools,
// deduplicated by canonical key, in lexicographic key order. base_tokens
// restricts to cycles touching at least one of the symbols; empty means all.
std::vector<Cycle> enumerate_cycles(const PoolGraph& graph,
                                    const std::vector<std::string>& allowed_pools,
                                    const std::vector<std::string>& base_tokens,
                                    int max_len);

// Fold of compose around the cycle; nullopt when any pool is missing from
// the snapshot or inactive (cycle unavailable this block).
std::optional<ExactEffectivePool> cycle_effective(const PoolGraph& graph, const Cycle& cycle,
                                                  const BlockSnapshot& snap);

struct CycleOptimum {
    double alpha_star = 0; // profit-maximizing input, base token units
    double profit = 0;     // g(alpha*) - alpha*, base token units
};

// Profit p(x) = g(x) - x is strictly concave; an interior maximum exists iff
// g'(0) = a/b > 1, at alpha* = (sqrt(a*b) - b)/c with value
// (sqrt(a) - sqrt(b))^2 / c. Returns nullopt when a <= b.
std::optional<CycleOptimum> optimize_cycle(const EffectivePool& ep);

struct CycleOpportunity {
    std::int64_t block = 0;
    std::string cycle_key;
    std::vector<std::string> pools;
    std::string base_token;
    double alpha_star = 0;
    double profit = 0;
    double relative_profit_pct = 0;
    double profit_usd = 0;
};

// Reduces and optimizes every cycle against the snapshot and keeps
// opportunities whose optimal profit converts to more than min_profit_usd at
// the block's day.
std::vector<CycleOpportunity> scan_block(const BlockSnapshot& snap,
                                         const std::vector<Cycle>& cycles,
                                         const PoolGraph& graph, const PriceTable& prices,
                                         Day day, double min_profit_usd = 30.0);

struct OpportunityRun {
    std::string canonical_key;
    std::int64_t start_block = 0;
    std::int64_t end_block = 0;

    std::int64_t duration_blocks() const { return end_block - start_block + 1; }
};

// Maximal runs of consecutive blocks in which the same canonical cycle stays
// above threshold. Input must be ascending by block; a gap in block numbers
// (missing snapshot) closes every open run. Output ordered by
// (start_block, key).
std::vector<OpportunityRun> track_durations(
    const std::vector<std::pair<std::int64_t, std::vector<std::string>>>& per_block_keys);

} // namespace ammlens
