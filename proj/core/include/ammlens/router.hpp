#pragma once

#include "ammlens/cpmm.hpp"
#include "ammlens/graph.hpp"
#include "ammlens/market_data.hpp"

#include <span>
#include <string>
#include <vector>

namespace ammlens {

struct PathSetConfig {
    std::vector<std::string> allowed_pools;
    int max_hops = 2;
    bool include_both_direct_venues = true;

    static PathSetConfig from_network(const NetworkConfig& net);
};

// All simple paths from `in` to `out` of length <= max_hops through the
// allowed pools, in lexicographic order of their pool id sequences.
// Throws std::domain_error when in == out.
std::vector<TradePath> enumerate_paths(const PoolGraph& graph, const TokenId& in,
                                       const TokenId& out, const PathSetConfig& cfg);

// Output-maximizing split of total_input across concave path functions.
// amounts[i] aligns with paths[i]; lambda_star is the shared marginal rate
// at the optimum.
struct RoutePlan {
    std::vector<double> amounts;
    double total_input = 0;
    double total_output = 0;
    double lambda_star = 0;
};

// Water-filling over the active set sorted by marginal-at-zero, with a
// closed-form lambda per active set and a bisection fallback.
// Throws std::domain_error on an empty path list or non-positive input.
RoutePlan optimal_split(std::span<const EffectivePool> paths, double total_input);

// Number of allocations receiving at least threshold * total_input.
int count_used_paths(const RoutePlan& plan, double threshold = 0.001);

struct AuditResult {
    std::int64_t block = 0;
    std::string tx_hash;
    bool auditable = false;
    std::string skip_reason;   // set when !auditable
    BigInt original_output;
    BigInt optimal_output;
    BigInt gain_tokens;        // optimal - original; may be negative by flooring slack
    double gain_usd = 0;
    double gain_pct = 0;
    int paths_used = 0;
    bool optimizable = false;
    std::vector<TradePath> paths; // the independent path set that was split over
    RoutePlan plan;
};

// Path set for one audit: enumerated paths with multi-hop edges reduced to
// the more liquid venue (by USD reserve value at the snapshot) and a
// node-disjointness filter so the split is separable. Direct routes keep
// both venues when the config says so.
std::vector<TradePath> build_audit_path_set(const PoolGraph& graph, const TokenId& in,
                                            const TokenId& out, const PathSetConfig& cfg,
                                            const BlockSnapshot& snap, const PriceTable& prices,
                                            Day day);

// Audits one historical swap against the beginning-of-block snapshot: solves
// the optimal split of the event's input, re-evaluates the winning
// allocation in exact arithmetic, and converts the token gain to USD at the
// event's day.
AuditResult audit_trade(const SwapEvent& event, const BlockSnapshot& snap,
                        const PoolGraph& graph, const PathSetConfig& cfg,
                        const Thresholds& thresholds, const PriceTable& prices, Day day);

} // namespace ammlens
