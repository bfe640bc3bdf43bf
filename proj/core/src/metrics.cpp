#include "ammlens/metrics.hpp"

#include "ammlens/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

namespace ammlens {

namespace {

using nlohmann::json;

// RFC 4180: quote fields containing comma, quote or newline; double quotes.
std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

double mean_of(const std::vector<double>& xs) {
    double sum = 0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

} // namespace

DailySeries::DailySeries(Day first, Day last) : first_(first) {
    if (last < first) throw std::invalid_argument("day range is empty");
    values_.assign(static_cast<std::size_t>(last.index() - first.index()) + 1, std::nullopt);
}

void DailySeries::set(Day day, double value) {
    if (day < first_ || day > last_day()) throw std::out_of_range("day outside series range");
    values_[static_cast<std::size_t>(day.index() - first_.index())] = value;
}

std::optional<double> DailySeries::at(Day day) const {
    if (day < first_ || day > last_day()) return std::nullopt;
    return values_[static_cast<std::size_t>(day.index() - first_.index())];
}

double price_movement(double p_high, double p_low) {
    if (!(p_low > 0) || p_high < p_low)
        throw std::domain_error("price_movement: requires p_high >= p_low > 0");
    return 100.0 * (p_high - p_low) / p_low;
}

double pearson(const DailySeries& x, const DailySeries& y) {
    if (x.first_day() != y.first_day() || x.size() != y.size())
        throw std::domain_error("pearson: series must cover the same day span");
    std::vector<double> xs, ys;
    for (Day d = x.first_day(); d <= x.last_day(); d = d.next()) {
        auto a = x.at(d);
        auto b = y.at(d);
        if (a && b) {
            xs.push_back(*a);
            ys.push_back(*b);
        }
    }
    if (xs.size() < 2) throw std::domain_error("pearson: fewer than two shared points");
    double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0 || syy == 0)
        throw std::domain_error("pearson: correlation undefined for a constant series");
    return sxy / std::sqrt(sxx * syy);
}

DailySeries daily_arb_blocks(std::span<const CycleOpportunity> opportunities,
                             const BlockDayIndex& blocks, Day first, Day last) {
    DailySeries series(first, last);
    for (Day d = first; d <= last; d = d.next()) series.set(d, 0.0);
    std::map<std::int32_t, std::set<std::int64_t>> blocks_per_day;
    for (const CycleOpportunity& opp : opportunities) {
        Day day = blocks.day_of(opp.block);
        blocks_per_day[day.index()].insert(opp.block);
    }
    for (const auto& [day_index, block_set] : blocks_per_day) {
        Day day(day_index);
        if (day < first || day > last) continue;
        series.set(day, static_cast<double>(block_set.size()));
    }
    return series;
}

DailySeries daily_price_movement(const PriceTable& prices, const std::string& symbol,
                                 Day first, Day last) {
    DailySeries series(first, last);
    for (Day d = first; d <= last; d = d.next()) {
        const DayPrice* p = prices.find(symbol, d);
        if (p && p->high && p->low) series.set(d, price_movement(*p->high, *p->low));
    }
    return series;
}

std::optional<GainStats> gain_stats(std::span<const AuditResult> audits) {
    std::vector<double> gains;
    for (const AuditResult& a : audits)
        if (a.auditable && a.optimizable) gains.push_back(a.gain_pct);
    if (gains.empty()) return std::nullopt;

    std::sort(gains.begin(), gains.end());
    GainStats stats;
    stats.n = gains.size();
    stats.mean_pct = mean_of(gains);
    std::size_t n = gains.size();
    stats.median_pct = n % 2 ? gains[n / 2] : 0.5 * (gains[n / 2 - 1] + gains[n / 2]);
    auto top_count = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n)));
    top_count = std::max<std::size_t>(top_count, 1);
    double top_sum = 0;
    for (std::size_t i = n - top_count; i < n; ++i) top_sum += gains[i];
    stats.top5_mean_pct = top_sum / static_cast<double>(top_count);
    return stats;
}

std::array<std::size_t, 4> path_distribution(std::span<const AuditResult> audits) {
    std::array<std::size_t, 4> buckets{0, 0, 0, 0};
    for (const AuditResult& a : audits) {
        if (!a.auditable || !a.optimizable) continue;
        int used = a.paths_used;
        if (used <= 1)
            ++buckets[0];
        else if (used == 2)
            ++buckets[1];
        else if (used == 3)
            ++buckets[2];
        else
            ++buckets[3];
    }
    return buckets;
}

ArbStats arb_stats(std::span<const CycleOpportunity> opportunities) {
    ArbStats stats;
    stats.opportunity_count = opportunities.size();
    std::set<std::int64_t> blocks;
    double pct_sum = 0, usd_weighted = 0, usd_sum = 0;
    for (const CycleOpportunity& opp : opportunities) {
        blocks.insert(opp.block);
        pct_sum += opp.relative_profit_pct;
        usd_weighted += opp.relative_profit_pct * opp.profit_usd;
        usd_sum += opp.profit_usd;
    }
    stats.blocks_with_opportunities = blocks.size();
    stats.total_profit_usd = usd_sum;
    if (!opportunities.empty()) {
        stats.mean_relative_profit_pct = pct_sum / static_cast<double>(opportunities.size());
        if (usd_sum > 0) stats.usd_weighted_mean_profit_pct = usd_weighted / usd_sum;
    }
    return stats;
}

void emit_report(const ReportBundle& bundle, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());

    // gains.csv: one row per audited trade
    {
        auto out = open_out(dir / "gains.csv");
        out << "block,tx_hash,original_output,optimal_output,gain_tokens,gain_usd,gain_pct,"
               "paths_used,optimizable\n";
        for (const AuditResult& a : bundle.audits) {
            if (!a.auditable) continue;
            out << a.block << ',' << csv_field(a.tx_hash) << ','
                << to_decimal_string(a.original_output) << ','
                << to_decimal_string(a.optimal_output) << ','
                << to_decimal_string(a.gain_tokens) << ',' << format_double(a.gain_usd) << ','
                << format_double(a.gain_pct) << ',' << a.paths_used << ','
                << (a.optimizable ? "true" : "false") << '\n';
        }
    }

    // opportunities.csv
    {
        auto out = open_out(dir / "opportunities.csv");
        out << "block,cycle_key,pools,alpha_star,profit,relative_profit_pct,profit_usd\n";
        for (const CycleOpportunity& opp : bundle.opportunities) {
            std::string pools;
            for (std::size_t i = 0; i < opp.pools.size(); ++i) {
                if (i) pools += ';';
                pools += opp.pools[i];
            }
            out << opp.block << ',' << csv_field(opp.cycle_key) << ',' << csv_field(pools)
                << ',' << format_double(opp.alpha_star) << ',' << format_double(opp.profit)
                << ',' << format_double(opp.relative_profit_pct) << ','
                << format_double(opp.profit_usd) << '\n';
        }
    }

    // daily_series.csv: day, arb_blocks, price_movement_pct
    {
        auto out = open_out(dir / "daily_series.csv");
        out << "day,arb_blocks,price_movement_pct\n";
        if (bundle.arb_blocks_series) {
            const DailySeries& arb = *bundle.arb_blocks_series;
            for (Day d = arb.first_day(); d <= arb.last_day(); d = d.next()) {
                out << d.to_string() << ',';
                if (auto v = arb.at(d)) out << format_double(*v);
                out << ',';
                if (bundle.price_movement_series)
                    if (auto v = bundle.price_movement_series->at(d)) out << format_double(*v);
                out << '\n';
            }
        }
    }

    // report.json
    {
        json report;
        report["schema_version"] = 1;
        report["thresholds"] = {
            {"min_trade_usd", bundle.thresholds.min_trade_usd},
            {"min_gain_usd", bundle.thresholds.min_gain_usd},
            {"min_profit_usd", bundle.thresholds.min_profit_usd},
            {"path_usage_threshold", bundle.thresholds.path_usage_threshold},
        };

        std::size_t audited = 0;
        std::size_t optimizable = 0;
        for (const AuditResult& a : bundle.audits) {
            if (!a.auditable) continue;
            ++audited;
            if (a.optimizable) ++optimizable;
        }
        json routing;
        routing["trades_audited"] = audited;
        routing["trades_optimizable"] = optimizable;
        routing["optimizable_share"] =
            audited ? static_cast<double>(optimizable) / static_cast<double>(audited) : 0.0;
        if (auto stats = gain_stats(bundle.audits)) {
            routing["gain_stats"] = {
                {"n", stats->n},
                {"mean_pct", stats->mean_pct},
                {"median_pct", stats->median_pct},
                {"top5_mean_pct", stats->top5_mean_pct},
            };
        } else {
            routing["gain_stats"] = nullptr;
            routing["empty"] = true;
        }
        auto buckets = path_distribution(bundle.audits);
        routing["paths_used_histogram"] = {
            {"1", buckets[0]}, {"2", buckets[1]}, {"3", buckets[2]}, {"4_plus", buckets[3]}};
        report["routing"] = routing;

        ArbStats astats = arb_stats(bundle.opportunities);
        json arbitrage;
        arbitrage["opportunity_count"] = astats.opportunity_count;
        arbitrage["blocks_with_opportunities"] = astats.blocks_with_opportunities;
        arbitrage["mean_relative_profit_pct"] = astats.mean_relative_profit_pct;
        arbitrage["usd_weighted_mean_profit_pct"] = astats.usd_weighted_mean_profit_pct;
        arbitrage["total_profit_usd"] = astats.total_profit_usd;
        arbitrage["run_count"] = bundle.runs.size();
        if (!bundle.runs.empty()) {
            double total = 0;
            for (const OpportunityRun& r : bundle.runs)
                total += static_cast<double>(r.duration_blocks());
            arbitrage["mean_duration_blocks"] = total / static_cast<double>(bundle.runs.size());
        } else {
            arbitrage["mean_duration_blocks"] = nullptr;
        }
        report["arbitrage"] = arbitrage;

        json corr;
        corr["volatility_token"] = bundle.volatility_token;
        if (bundle.arb_blocks_series && bundle.price_movement_series) {
            try {
                corr["arb_blocks_vs_price_movement"] =
                    pearson(*bundle.arb_blocks_series, *bundle.price_movement_series);
            } catch (const std::domain_error& e) {
                corr["arb_blocks_vs_price_movement"] = nullptr;
                corr["note"] = e.what();
            }
        } else {
            corr["arb_blocks_vs_price_movement"] = nullptr;
        }
        report["correlation"] = corr;

        auto out = open_out(dir / "report.json");
        out << report.dump(2) << '\n';
    }
}

} // namespace ammlens
