#pragma once

#include "ammlens/calendar.hpp"
#include "ammlens/errors.hpp"
#include "ammlens/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace ammlens {

struct SwapEvent {
    std::int64_t block = 0;
    std::string tx_hash;
    std::int32_t tx_index = 0;
    std::int32_t log_index = 0;
    std::string pool_id;
    TokenId token_in;
    TokenId token_out;
    BigInt amount_in;
    BigInt amount_out;
    std::optional<double> usd_value; // subgraph-reported; derived from prices when absent

    auto ordering_key() const { return std::tuple(block, tx_index, log_index); }
};

// Reserves at the END of the given block.
struct ReserveRecord {
    std::int64_t block = 0;
    std::string pool_id;
    BigInt reserve0;
    BigInt reserve1;
};

struct DayPrice {
    double usd = 0;
    std::optional<double> high;
    std::optional<double> low;
};

// (token, UTC day) -> USD price, plus daily high/low for tokens that carry
// them (the volatility series input).
class PriceTable {
public:
    void add(const std::string& symbol, Day day, DayPrice price);

    const DayPrice* find(const std::string& symbol, Day day) const;
    double usd(const std::string& symbol, Day day) const; // throws MissingPriceError

    // USD value of an integer token amount in base units.
    double usd_value(const TokenId& token, const BigInt& amount, Day day) const;
    double usd_value(const TokenId& token, double amount_base_units, Day day) const;

    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::pair<std::string, std::int32_t>, DayPrice> entries_;
};

// block -> UTC day, from block timestamp data.
class BlockDayIndex {
public:
    void add(std::int64_t block, Day day);

    std::optional<Day> find(std::int64_t block) const;
    Day day_of(std::int64_t block) const; // throws MissingBlockDayError

    bool empty() const { return entries_.empty(); }
    const std::map<std::int64_t, Day>& entries() const { return entries_; }

private:
    std::map<std::int64_t, Day> entries_;
};

} // namespace ammlens
