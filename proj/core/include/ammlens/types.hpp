#pragma once

#include "ammlens/numeric.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ammlens {

struct TokenId {
    std::string symbol;
    unsigned decimals = 0; // base-unit scale, at most 38

    friend bool operator==(const TokenId&, const TokenId&) = default;
    friend auto operator<=>(const TokenId&, const TokenId&) = default;
};

// Which side of the pool the input token is on.
enum class Direction { ZeroToOne, OneToZero };

inline Direction reverse(Direction d) {
    return d == Direction::ZeroToOne ? Direction::OneToZero : Direction::ZeroToOne;
}

// A two-token constant-product venue. Reserves are integers in base units;
// the fee is an exact rational in [0,1), charged on the input amount.
struct Pool {
    std::string id;
    std::string venue; // "uniswap", "sushiswap", ...
    TokenId token0;
    TokenId token1;
    BigInt reserve0;
    BigInt reserve1;
    BigRat fee{BigInt(3), BigInt(1000)};

    bool active() const { return reserve0 > 0 && reserve1 > 0; }

    const TokenId& input_token(Direction d) const {
        return d == Direction::ZeroToOne ? token0 : token1;
    }
    const TokenId& output_token(Direction d) const {
        return d == Direction::ZeroToOne ? token1 : token0;
    }
    const BigInt& input_reserve(Direction d) const {
        return d == Direction::ZeroToOne ? reserve0 : reserve1;
    }
    const BigInt& output_reserve(Direction d) const {
        return d == Direction::ZeroToOne ? reserve1 : reserve0;
    }
};

struct PathHop {
    std::string pool_id;
    Direction dir = Direction::ZeroToOne;

    friend bool operator==(const PathHop&, const PathHop&) = default;
};

// An ordered chain of hops; consecutive hops connect on token types and no
// pool appears twice.
struct TradePath {
    std::vector<PathHop> hops;
    TokenId in_token;
    TokenId out_token;

    std::size_t length() const { return hops.size(); }
};

// All pool reserves as of the beginning of a block (equal to the end of the
// previous block). Pools without a prior reserve record are absent.
struct BlockSnapshot {
    std::int64_t block = 0;
    std::map<std::string, std::pair<BigInt, BigInt>> reserves;

    const std::pair<BigInt, BigInt>* find(const std::string& pool_id) const {
        auto it = reserves.find(pool_id);
        return it == reserves.end() ? nullptr : &it->second;
    }
};

struct Thresholds {
    double min_trade_usd = 30'000.0;
    double min_gain_usd = 30.0;
    double min_profit_usd = 30.0;
    double path_usage_threshold = 0.001;
};

} // namespace ammlens
