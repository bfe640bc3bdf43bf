// ammlens: batch analysis of constant-product AMM markets.
//
// Subcommands replay pool states from file-based records and measure market
// inefficiency: `route-audit` checks whether large historical trades could
// have been routed better across independent paths, `arb-scan` finds and
// sizes cyclic arbitrage opportunities per block, `report` aggregates both
// into metrics files, and `validate` cross-checks a dataset against the
// swap formula.

#include "ammlens/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <string>

namespace {

using ammlens::RunConfig;

// --foo-bar  ->  AMMLENS_FOO_BAR
std::string env_name(std::string flag) {
    std::string name = "AMMLENS_";
    for (char c : flag) {
        if (c == '-') {
            if (!name.empty() && name.back() != '_') name += '_';
        } else {
            name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
    }
    return name;
}

template <typename T>
CLI::Option* opt(CLI::App* cmd, const std::string& flag, T& value, const std::string& help) {
    return cmd->add_option("--" + flag, value, help)->envname(env_name(flag));
}

void add_io_options(CLI::App* cmd, RunConfig& cfg, bool events, bool reserves, bool prices,
                    bool graph, bool blocks) {
    if (events) opt(cmd, "events", cfg.events_path, "Swap events (JSON lines)");
    if (reserves)
        opt(cmd, "reserves", cfg.reserves_path, "End-of-block pool reserves (JSON lines)");
    if (prices) opt(cmd, "prices", cfg.prices_path, "Daily USD prices (JSON lines)");
    if (graph) opt(cmd, "graph", cfg.graph_path, "Pool graph config (JSON)");
    if (blocks) opt(cmd, "blocks", cfg.blocks_path, "Block-to-day mapping (JSON lines)");
}

void add_range_options(CLI::App* cmd, RunConfig& cfg) {
    opt(cmd, "from-block", cfg.from_block, "First block of the run (default: derived from data)");
    opt(cmd, "to-block", cfg.to_block, "Last block of the run (default: derived from data)");
}

void add_run_options(CLI::App* cmd, RunConfig& cfg) {
    opt(cmd, "out", cfg.out_dir, "Output directory");
    opt(cmd, "jobs", cfg.jobs, "Worker threads (0 = all cores)");
    opt(cmd, "network", cfg.network, "Named network from the graph config");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch market-efficiency analysis for constant-product AMMs"};
    app.require_subcommand(1);
    app.footer(
        "Environment: every option can be set as AMMLENS_<OPTION> (e.g. AMMLENS_MIN_TRADE_USD).\n"
        "Exit codes:\n"
        "  0  success\n"
        "  2  usage error or config conflict\n"
        "  3  missing or unreadable input file\n"
        "  4  malformed input data or graph config\n"
        "  5  missing price or block-day mapping\n"
        "  6  internal error");

    RunConfig cfg;

    CLI::App* audit = app.add_subcommand(
        "route-audit", "Audit large historical trades for suboptimal routing");
    add_io_options(audit, cfg, true, true, true, true, true);
    add_range_options(audit, cfg);
    add_run_options(audit, cfg);
    opt(audit, "min-trade-usd", cfg.thresholds.min_trade_usd,
        "Only audit trades at or above this USD value")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    opt(audit, "min-gain-usd", cfg.thresholds.min_gain_usd,
        "USD gain above which a trade counts as optimizable")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    opt(audit, "path-usage-threshold", cfg.thresholds.path_usage_threshold,
        "Fraction of the trade a path must carry to count as used")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    opt(audit, "max-hops", cfg.max_hops, "Path length cap (default: network setting)");

    CLI::App* scan = app.add_subcommand(
        "arb-scan", "Scan blocks for cyclic arbitrage opportunities");
    add_io_options(scan, cfg, false, true, true, true, true);
    add_range_options(scan, cfg);
    add_run_options(scan, cfg);
    opt(scan, "min-profit-usd", cfg.thresholds.min_profit_usd,
        "USD profit above which an opportunity is reported")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    opt(scan, "max-cycle-len", cfg.max_cycle_len,
        "Cycle length cap (default: network setting)");

    CLI::App* report = app.add_subcommand(
        "report", "Aggregate audit and scan outputs into report files");
    add_io_options(report, cfg, false, false, true, false, true);
    add_range_options(report, cfg);
    opt(report, "out", cfg.out_dir,
        "Directory holding audits.jsonl/opportunities.jsonl; reports land here");
    opt(report, "volatility-token", cfg.volatility_token,
        "Token whose daily price movement is reported")
        ->capture_default_str();
    opt(report, "min-trade-usd", cfg.thresholds.min_trade_usd, "Echoed into report.json")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    opt(report, "min-gain-usd", cfg.thresholds.min_gain_usd, "Echoed into report.json")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    opt(report, "min-profit-usd", cfg.thresholds.min_profit_usd, "Echoed into report.json")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    CLI::App* validate = app.add_subcommand(
        "validate", "Check dataset self-consistency against the swap formula");
    add_io_options(validate, cfg, true, true, false, true, false);
    opt(validate, "out", cfg.out_dir, "Output directory");
    opt(validate, "tolerance", cfg.consistency_tolerance,
        "Relative deviation above which an event is flagged")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return ammlens::kUsageError;
    }

    if (audit->parsed()) return ammlens::run_route_audit(cfg);
    if (scan->parsed()) return ammlens::run_arb_scan(cfg);
    if (report->parsed()) return ammlens::run_report(cfg);
    if (validate->parsed()) return ammlens::run_validate(cfg);
    return ammlens::kUsageError;
}
