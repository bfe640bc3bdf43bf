#include "ammlens/market_data.hpp"

#include <cmath>
#include <stdexcept>

namespace ammlens {

void PriceTable::add(const std::string& symbol, Day day, DayPrice price) {
    if (!(price.usd > 0)) throw std::invalid_argument("price must be positive");
    if (price.high.has_value() != price.low.has_value())
        throw std::invalid_argument("high/low must come together");
    if (price.high && (!(*price.low > 0) || *price.high < *price.low))
        throw std::invalid_argument("daily high below low");
    auto [it, inserted] = entries_.emplace(std::pair(symbol, day.index()), price);
    (void)it;
    if (!inserted)
        throw std::invalid_argument("duplicate price for " + symbol + " on " + day.to_string());
}

const DayPrice* PriceTable::find(const std::string& symbol, Day day) const {
    auto it = entries_.find(std::pair(symbol, day.index()));
    return it == entries_.end() ? nullptr : &it->second;
}

double PriceTable::usd(const std::string& symbol, Day day) const {
    const DayPrice* p = find(symbol, day);
    if (!p) throw MissingPriceError(symbol, day.to_string());
    return p->usd;
}

double PriceTable::usd_value(const TokenId& token, const BigInt& amount, Day day) const {
    return usd_value(token, to_double(amount), day);
}

double PriceTable::usd_value(const TokenId& token, double amount_base_units, Day day) const {
    double scale = std::pow(10.0, static_cast<double>(token.decimals));
    return usd(token.symbol, day) * amount_base_units / scale;
}

void BlockDayIndex::add(std::int64_t block, Day day) {
    auto [it, inserted] = entries_.emplace(block, day);
    (void)it;
    if (!inserted)
        throw std::invalid_argument("duplicate day mapping for block " + std::to_string(block));
}

std::optional<Day> BlockDayIndex::find(std::int64_t block) const {
    auto it = entries_.find(block);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

Day BlockDayIndex::day_of(std::int64_t block) const {
    auto day = find(block);
    if (!day) throw MissingBlockDayError(block);
    return *day;
}

} // namespace ammlens
