#pragma once

#include "ammlens/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ammlens {

// A named subset of pools used for path search or cycle search.
struct NetworkConfig {
    enum class Kind { Paths, Cycles };

    std::string name;
    Kind kind = Kind::Paths;
    std::vector<std::string> pool_ids;
    int max_hops = 2;                 // paths
    bool include_both_direct_venues = true;
    int max_cycle_len = 4;            // cycles
    std::vector<std::string> base_tokens; // cycles; empty = all tokens
};

// Static description of the trading universe: tokens, pools (without
// reserves) and named networks. Loaded from a single JSON document.
struct PoolGraphConfig {
    std::vector<TokenId> tokens;
    std::vector<Pool> pools; // reserves zero; filled per block from snapshots
    std::map<std::string, NetworkConfig> networks;
    std::string default_path_network;
    std::string default_cycle_network;

    static PoolGraphConfig parse_file(const std::string& path);
    static PoolGraphConfig parse_json(std::string_view text, const std::string& origin);
};

// Validated lookup structure over a PoolGraphConfig.
class PoolGraph {
public:
    explicit PoolGraph(PoolGraphConfig cfg);

    const PoolGraphConfig& config() const { return cfg_; }

    const TokenId* find_token(std::string_view symbol) const;
    const Pool* find_pool(std::string_view id) const;
    const NetworkConfig* find_network(std::string_view name) const;

    // Pools whose token pair is {a, b}, in lexicographic id order.
    std::vector<const Pool*> pools_between(const TokenId& a, const TokenId& b) const;

    // All pool ids touching the given token, lexicographic.
    std::vector<const Pool*> pools_of(const TokenId& token) const;

    const std::vector<Pool>& pools() const { return cfg_.pools; }
    const std::vector<TokenId>& tokens() const { return cfg_.tokens; }

    // Pool with reserves substituted from the snapshot; nullopt when the pool
    // has no reserves at that block or either reserve is zero.
    std::optional<Pool> materialize(std::string_view pool_id, const BlockSnapshot& snap) const;

private:
    PoolGraphConfig cfg_;
    std::map<std::string, std::size_t, std::less<>> pool_index_;
    std::map<std::string, std::size_t, std::less<>> token_index_;
};

} // namespace ammlens
