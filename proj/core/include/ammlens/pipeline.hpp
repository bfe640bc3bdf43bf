#pragma once

#include "ammlens/types.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ammlens {

// Exit codes shared by the library entry points and the CLI.
enum ExitCode : int {
    kOk = 0,
    kUsageError = 2,   // config conflicts, bad flags
    kMissingInput = 3, // input file absent or unreadable
    kSchemaError = 4,  // malformed input data
    kMissingPrice = 5, // price or block-day lookup failed
    kInternalError = 6,
};

struct RunConfig {
    std::string events_path;
    std::string reserves_path;
    std::string prices_path;
    std::string graph_path;
    std::string blocks_path;

    std::string network;                 // named network; empty = config default
    std::string volatility_token = "ETH";

    std::optional<std::int64_t> from_block;
    std::optional<std::int64_t> to_block;

    Thresholds thresholds;
    std::optional<int> max_hops;         // override network setting
    std::optional<int> max_cycle_len;    // override network setting

    std::string out_dir = ".";
    unsigned jobs = 0;                   // 0 = all cores
    double consistency_tolerance = 1e-6; // validate
};

// Batch entry points; each returns an ExitCode and reports diagnostics on
// stderr. Outputs land in cfg.out_dir:
//   route-audit -> audits.jsonl
//   arb-scan    -> opportunities.jsonl, runs.jsonl
//   report      -> report.json, daily_series.csv, gains.csv, opportunities.csv
//   validate    -> validation.json
int run_route_audit(const RunConfig& cfg);
int run_arb_scan(const RunConfig& cfg);
int run_report(const RunConfig& cfg);
int run_validate(const RunConfig& cfg);

} // namespace ammlens
