#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ammlens {

// UTC calendar day, stored as days since 1970-01-01 so day ranges are
// contiguous integers. Parsed from / formatted as ISO "YYYY-MM-DD".
class Day {
public:
    Day() = default;
    explicit Day(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    static Day from_civil(int year, unsigned month, unsigned day);
    static Day parse(std::string_view iso);

    std::int32_t index() const { return days_; }
    std::string to_string() const;

    Day next() const { return Day(days_ + 1); }

    friend auto operator<=>(const Day&, const Day&) = default;

private:
    std::int32_t days_ = 0;
};

} // namespace ammlens
