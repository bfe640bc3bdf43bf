#include "ammlens/metrics.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ammlens;
using ammlens::testing::Rng;

namespace {

namespace fs = std::filesystem;

AuditResult audit_with(double gain_pct, int paths_used, bool optimizable) {
    AuditResult a;
    a.auditable = true;
    a.optimizable = optimizable;
    a.gain_pct = gain_pct;
    a.paths_used = paths_used;
    return a;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// raw-moment form of the correlation coefficient, an independent route from
// the library's centered two-pass computation
double pearson_reference(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

} // namespace

TEST_CASE("price movement formula") {
    CHECK(price_movement(1.0, 1.0) == doctest::Approx(0.0));
    CHECK(price_movement(1.2, 1.0) == doctest::Approx(20.0));
    CHECK(price_movement(1437.0, 1085.0) > 20.0); // a one-day swing above 20%
    CHECK_THROWS_AS(price_movement(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(price_movement(0.9, 1.0), std::domain_error);
}

TEST_CASE("pearson correlation") {
    Day d0 = Day::parse("2020-09-12");
    auto series_of = [&](const std::vector<double>& xs) {
        DailySeries s(d0, Day(d0.index() + static_cast<std::int32_t>(xs.size()) - 1));
        for (std::size_t i = 0; i < xs.size(); ++i)
            s.set(Day(d0.index() + static_cast<std::int32_t>(i)), xs[i]);
        return s;
    };

    SUBCASE("identical and mirrored series") {
        auto x = series_of({1, 2, 3, 5, 8});
        auto y = series_of({-1, -2, -3, -5, -8});
        CHECK(pearson(x, x) == doctest::Approx(1.0));
        CHECK(pearson(x, y) == doctest::Approx(-1.0));
    }
    SUBCASE("matches the raw-moment reference on random series") {
        Rng rng(10001);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> xs, ys;
            for (int i = 0; i < 30; ++i) {
                xs.push_back(rng.uniform(-10, 10));
                ys.push_back(rng.uniform(-10, 10));
            }
            double got = pearson(series_of(xs), series_of(ys));
            CHECK(got == doctest::Approx(pearson_reference(xs, ys)).epsilon(1e-12));
            CHECK(got >= -1.0);
            CHECK(got <= 1.0);
        }
    }
    SUBCASE("symmetry and affine invariance") {
        Rng rng(10002);
        std::vector<double> xs, ys;
        for (int i = 0; i < 25; ++i) {
            xs.push_back(rng.uniform(0, 100));
            ys.push_back(rng.uniform(0, 100));
        }
        std::vector<double> scaled;
        for (double v : xs) scaled.push_back(3.5 * v + 11.0);
        CHECK(pearson(series_of(xs), series_of(ys)) ==
              doctest::Approx(pearson(series_of(ys), series_of(xs))));
        CHECK(pearson(series_of(scaled), series_of(ys)) ==
              doctest::Approx(pearson(series_of(xs), series_of(ys))).epsilon(1e-12));
    }
    SUBCASE("degenerate inputs are rejected") {
        auto x = series_of({1, 2, 3});
        auto flat = series_of({4, 4, 4});
        CHECK_THROWS_AS(pearson(x, flat), std::domain_error);
        auto short_x = series_of({1});
        auto short_y = series_of({2});
        CHECK_THROWS_AS(pearson(short_x, short_y), std::domain_error);
        DailySeries shifted(Day(d0.index() + 1), Day(d0.index() + 3));
        CHECK_THROWS_AS(pearson(x, shifted), std::domain_error);
    }
    SUBCASE("days missing in either series are skipped pairwise") {
        DailySeries x(d0, Day(d0.index() + 3));
        DailySeries y(d0, Day(d0.index() + 3));
        x.set(d0, 1);
        y.set(d0, 2);
        x.set(Day(d0.index() + 1), 5);
        y.set(Day(d0.index() + 1), 6);
        x.set(Day(d0.index() + 2), 9); // y missing that day
        x.set(Day(d0.index() + 3), 2);
        y.set(Day(d0.index() + 3), 3);
        CHECK(pearson(x, y) == doctest::Approx(1.0)); // remaining points are collinear
    }
}

TEST_CASE("gain statistics over optimizable trades") {
    SUBCASE("no optimizable trades means no stats") {
        std::vector<AuditResult> audits{audit_with(0.0, 1, false)};
        CHECK(!gain_stats(audits).has_value());
        CHECK(!gain_stats({}).has_value());
    }
    SUBCASE("a single trade collapses all statistics") {
        std::vector<AuditResult> audits{audit_with(0.42, 1, true)};
        auto stats = gain_stats(audits);
        REQUIRE(stats.has_value());
        CHECK(stats->n == 1);
        CHECK(stats->mean_pct == doctest::Approx(0.42));
        CHECK(stats->median_pct == doctest::Approx(0.42));
        CHECK(stats->top5_mean_pct == doctest::Approx(0.42));
    }
    SUBCASE("twenty known gains match the hand computation") {
        std::vector<AuditResult> audits;
        for (int i = 1; i <= 20; ++i) audits.push_back(audit_with(0.1 * i, 1, true));
        audits.push_back(audit_with(99.0, 1, false)); // ignored: not optimizable
        auto stats = gain_stats(audits);
        REQUIRE(stats.has_value());
        CHECK(stats->n == 20);
        CHECK(stats->mean_pct == doctest::Approx(1.05));
        CHECK(stats->median_pct == doctest::Approx(1.05));
        CHECK(stats->top5_mean_pct == doctest::Approx(2.0)); // ceil(0.05*20) = 1 trade
        CHECK(stats->top5_mean_pct >= stats->mean_pct);
    }
    SUBCASE("right-skewed gains push the mean above the median") {
        std::vector<AuditResult> audits;
        for (int i = 0; i < 15; ++i) audits.push_back(audit_with(0.1, 1, true));
        for (int i = 0; i < 5; ++i) audits.push_back(audit_with(5.0, 2, true));
        auto stats = gain_stats(audits);
        REQUIRE(stats.has_value());
        CHECK(stats->mean_pct == doctest::Approx(1.325));
        CHECK(stats->median_pct == doctest::Approx(0.1));
        CHECK(stats->mean_pct > stats->median_pct);
    }
}

TEST_CASE("paths-used histogram buckets and totals") {
    std::vector<AuditResult> audits{
        audit_with(1, 1, true),  audit_with(1, 1, true), audit_with(1, 2, true),
        audit_with(1, 3, true),  audit_with(1, 4, true), audit_with(1, 7, true),
        audit_with(1, 2, false), // not optimizable: excluded
    };
    auto buckets = path_distribution(audits);
    CHECK(buckets[0] == 2);
    CHECK(buckets[1] == 1);
    CHECK(buckets[2] == 1);
    CHECK(buckets[3] == 2);

    std::size_t optimizable = 0;
    for (const auto& a : audits)
        if (a.optimizable) ++optimizable;
    CHECK(buckets[0] + buckets[1] + buckets[2] + buckets[3] == optimizable);
}

TEST_CASE("daily arbitrage-block counting") {
    Day d0 = Day::parse("2021-01-04");
    BlockDayIndex blocks;
    for (std::int64_t b = 100; b < 110; ++b)
        blocks.add(b, b < 106 ? d0 : d0.next()); // 6 blocks day one, 4 day two

    SUBCASE("no opportunities gives an all-zero series") {
        auto series = daily_arb_blocks({}, blocks, d0, d0.next());
        CHECK(series.at(d0) == 0.0);
        CHECK(series.at(d0.next()) == 0.0);
    }
    SUBCASE("blocks count once no matter how many opportunities they carry") {
        std::vector<CycleOpportunity> opps(3);
        opps[0].block = 100;
        opps[1].block = 100;
        opps[2].block = 100;
        auto series = daily_arb_blocks(opps, blocks, d0, d0.next());
        CHECK(series.at(d0) == 1.0);
    }
    SUBCASE("a hand-tallied fixture across two days") {
        std::vector<CycleOpportunity> opps;
        for (std::int64_t b : {100, 101, 101, 103, 106, 108, 108, 109}) {
            CycleOpportunity o;
            o.block = b;
            opps.push_back(o);
        }
        auto series = daily_arb_blocks(opps, blocks, d0, d0.next());
        CHECK(series.at(d0) == 3.0);        // blocks 100, 101, 103
        CHECK(series.at(d0.next()) == 3.0); // blocks 106, 108, 109
    }
    SUBCASE("unmapped blocks are an error") {
        std::vector<CycleOpportunity> opps(1);
        opps[0].block = 999;
        CHECK_THROWS_AS(daily_arb_blocks(opps, blocks, d0, d0.next()),
                        MissingBlockDayError);
    }
}

TEST_CASE("report files are deterministic and valid when empty") {
    fs::path dir = fs::temp_directory_path() / "ammlens-test-report";
    fs::remove_all(dir);

    ReportBundle bundle;
    bundle.volatility_token = "ETH";

    SUBCASE("empty aggregates still produce headers") {
        emit_report(bundle, dir.string());
        CHECK(slurp(dir / "gains.csv") ==
              "block,tx_hash,original_output,optimal_output,gain_tokens,gain_usd,gain_pct,"
              "paths_used,optimizable\n");
        CHECK(slurp(dir / "opportunities.csv") ==
              "block,cycle_key,pools,alpha_star,profit,relative_profit_pct,profit_usd\n");
        CHECK(slurp(dir / "daily_series.csv") == "day,arb_blocks,price_movement_pct\n");
        CHECK(!slurp(dir / "report.json").empty());
    }

    SUBCASE("reruns are byte-identical") {
        AuditResult a = audit_with(0.5, 2, true);
        a.block = 42;
        a.tx_hash = "0xhash,with\"quote"; // must be RFC 4180 quoted
        a.gain_usd = 123.456;
        bundle.audits.push_back(a);
        CycleOpportunity o;
        o.block = 43;
        o.cycle_key = "p1:>|p2:<";
        o.pools = {"p1", "p2"};
        o.alpha_star = 1.5e9;
        o.profit = 2.5e7;
        o.relative_profit_pct = 1.6666666;
        o.profit_usd = 55.5;
        bundle.opportunities.push_back(o);
        bundle.runs.push_back({"p1:>|p2:<", 43, 44});

        emit_report(bundle, dir.string());
        std::string gains = slurp(dir / "gains.csv");
        std::string opps = slurp(dir / "opportunities.csv");
        std::string report = slurp(dir / "report.json");
        CHECK(gains.find("\"0xhash,with\"\"quote\"") != std::string::npos);

        emit_report(bundle, dir.string());
        CHECK(slurp(dir / "gains.csv") == gains);
        CHECK(slurp(dir / "opportunities.csv") == opps);
        CHECK(slurp(dir / "report.json") == report);
    }
}
