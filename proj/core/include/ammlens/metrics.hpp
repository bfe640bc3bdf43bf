#pragma once

#include "ammlens/arbitrage.hpp"
#include "ammlens/calendar.hpp"
#include "ammlens/market_data.hpp"
#include "ammlens/router.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ammlens {

// A real-valued series over a contiguous range of UTC days; missing days are
// explicit.
class DailySeries {
public:
    DailySeries() = default;
    DailySeries(Day first, Day last); // inclusive; first <= last required

    Day first_day() const { return first_; }
    Day last_day() const { return Day(first_.index() + static_cast<std::int32_t>(values_.size()) - 1); }
    std::size_t size() const { return values_.size(); }

    void set(Day day, double value);
    std::optional<double> at(Day day) const;

private:
    Day first_;
    std::vector<std::optional<double>> values_;
};

// 100 * (p_high - p_low) / p_low. Throws std::domain_error unless
// p_low > 0 and p_high >= p_low.
double price_movement(double p_high, double p_low);

// Sample Pearson correlation over days where both series have a value.
// Throws std::domain_error on mismatched spans, fewer than two shared
// points, or a constant series.
double pearson(const DailySeries& x, const DailySeries& y);

// Per day, the number of distinct blocks with at least one opportunity.
// Days inside [first, last] with no opportunity count zero. Throws
// MissingBlockDayError for an unmapped block.
DailySeries daily_arb_blocks(std::span<const CycleOpportunity> opportunities,
                             const BlockDayIndex& blocks, Day first, Day last);

// Daily price movement of one token over [first, last]; days without
// high/low data stay missing.
DailySeries daily_price_movement(const PriceTable& prices, const std::string& symbol,
                                 Day first, Day last);

struct GainStats {
    std::size_t n = 0;
    double mean_pct = 0;
    double median_pct = 0;
    double top5_mean_pct = 0; // mean of the top ceil(0.05 n) by gain_pct
};

// Over optimizable audits; nullopt when there are none.
std::optional<GainStats> gain_stats(std::span<const AuditResult> audits);

// Paths-used histogram over optimizable audits, buckets {1, 2, 3, >=4}.
std::array<std::size_t, 4> path_distribution(std::span<const AuditResult> audits);

struct ArbStats {
    std::size_t opportunity_count = 0;
    std::size_t blocks_with_opportunities = 0; // distinct blocks
    double mean_relative_profit_pct = 0;
    double usd_weighted_mean_profit_pct = 0;
    double total_profit_usd = 0;
};

ArbStats arb_stats(std::span<const CycleOpportunity> opportunities);

struct ReportBundle {
    Thresholds thresholds;
    std::string volatility_token;

    std::vector<AuditResult> audits;
    std::vector<CycleOpportunity> opportunities;
    std::vector<OpportunityRun> runs;

    std::optional<DailySeries> arb_blocks_series;
    std::optional<DailySeries> price_movement_series;
};

// Writes report.json, daily_series.csv, gains.csv and opportunities.csv into
// out_dir. Content is deterministic for identical inputs.
void emit_report(const ReportBundle& bundle, const std::string& out_dir);

} // namespace ammlens
