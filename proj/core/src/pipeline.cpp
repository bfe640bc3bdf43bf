#include "ammlens/pipeline.hpp"

#include "ammlens/arbitrage.hpp"
#include "ammlens/errors.hpp"
#include "ammlens/ingest.hpp"
#include "ammlens/metrics.hpp"
#include "ammlens/parallel.hpp"
#include "ammlens/router.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

namespace ammlens {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Config conflicts get their own exit code, distinct from malformed data.
class UsageConflict : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const UsageConflict& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMissingInput;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSchemaError;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSchemaError;
    } catch (const MissingPriceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMissingPrice;
    } catch (const MissingBlockDayError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMissingPrice;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternalError;
    }
}

PoolGraph load_graph(const RunConfig& cfg) {
    if (cfg.graph_path.empty()) throw UsageConflict("--graph is required");
    return PoolGraph(PoolGraphConfig::parse_file(cfg.graph_path));
}

const NetworkConfig& pick_network(const PoolGraph& graph, const RunConfig& cfg,
                                  NetworkConfig::Kind kind) {
    std::string name = cfg.network;
    if (name.empty())
        name = kind == NetworkConfig::Kind::Paths ? graph.config().default_path_network
                                                  : graph.config().default_cycle_network;
    if (name.empty())
        throw UsageConflict("no network selected and the graph config names no default");
    const NetworkConfig* net = graph.find_network(name);
    if (!net) throw UsageConflict("network '" + name + "' not found in graph config");
    if (net->kind != kind)
        throw UsageConflict("network '" + name + "' has the wrong kind for this command");
    return *net;
}

std::pair<std::int64_t, std::int64_t> resolve_range(const RunConfig& cfg,
                                                    std::optional<std::int64_t> lo,
                                                    std::optional<std::int64_t> hi) {
    std::optional<std::int64_t> from = cfg.from_block ? cfg.from_block : lo;
    std::optional<std::int64_t> to = cfg.to_block ? cfg.to_block : hi;
    if (!from || !to) throw UsageConflict("block range could not be derived; pass --from-block/--to-block");
    if (*from > *to) throw UsageConflict("empty block range: from " + std::to_string(*from) +
                                         " to " + std::to_string(*to));
    return {*from, *to};
}

std::ofstream open_out_file(const fs::path& dir, const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    return out;
}

json audit_to_json(const AuditResult& a) {
    json j;
    j["auditable"] = a.auditable;
    j["block"] = a.block;
    j["tx_hash"] = a.tx_hash;
    if (!a.auditable) {
        j["skip_reason"] = a.skip_reason;
        return j;
    }
    j["original_output"] = to_decimal_string(a.original_output);
    j["optimal_output"] = to_decimal_string(a.optimal_output);
    j["gain_tokens"] = to_decimal_string(a.gain_tokens);
    j["gain_usd"] = a.gain_usd;
    j["gain_pct"] = a.gain_pct;
    j["paths_used"] = a.paths_used;
    j["optimizable"] = a.optimizable;
    return j;
}

json opportunity_to_json(const CycleOpportunity& o) {
    json j;
    j["block"] = o.block;
    j["cycle_key"] = o.cycle_key;
    j["pools"] = o.pools;
    j["alpha_star"] = o.alpha_star;
    j["profit"] = o.profit;
    j["relative_profit_pct"] = o.relative_profit_pct;
    j["profit_usd"] = o.profit_usd;
    return j;
}

// Partial-range runs are stamped so later concatenation can check coverage.
void write_manifest(const fs::path& dir, const std::string& name, const std::string& command,
                    std::int64_t from, std::int64_t to, const json& extra) {
    json j;
    j["command"] = command;
    j["from_block"] = from;
    j["to_block"] = to;
    j["parameters"] = extra;
    std::ofstream out(dir / name, std::ios::binary);
    out << j.dump(2) << '\n';
}

// Tolerant line reader for our own output files; absent file reads as empty.
template <typename Fn>
void read_jsonl_if_present(const fs::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path.string(), lineno, e.what());
        }
        try {
            fn(j);
        } catch (const std::exception& e) {
            throw ParseError(path.string(), lineno, e.what());
        }
    }
}

} // namespace

int run_route_audit(const RunConfig& cfg) {
    return guarded([&] {
        if (cfg.events_path.empty()) throw UsageConflict("--events is required");
        if (cfg.reserves_path.empty()) throw UsageConflict("--reserves is required");
        if (cfg.prices_path.empty()) throw UsageConflict("--prices is required");
        if (cfg.blocks_path.empty()) throw UsageConflict("--blocks is required");

        PoolGraph graph = load_graph(cfg);
        const NetworkConfig& net = pick_network(graph, cfg, NetworkConfig::Kind::Paths);
        PathSetConfig path_cfg = PathSetConfig::from_network(net);
        if (cfg.max_hops) path_cfg.max_hops = *cfg.max_hops;
        if (path_cfg.max_hops < 1) throw UsageConflict("--max-hops must be at least 1");

        std::vector<SwapEvent> events = parse_events(cfg.events_path, graph);
        SnapshotStore snapshots(parse_reserves(cfg.reserves_path, graph));
        PriceTable prices = parse_prices(cfg.prices_path);
        BlockDayIndex blocks = parse_blocks(cfg.blocks_path);

        FilterResult filtered = filter_independent_swaps(std::move(events));
        std::cout << "multi-swap filter dropped " << filtered.dropped << " of "
                  << (filtered.kept.size() + filtered.dropped) << " events\n";

        std::optional<std::int64_t> lo, hi;
        if (!filtered.kept.empty()) {
            lo = filtered.kept.front().block;
            hi = filtered.kept.back().block;
        }
        auto [from, to] = resolve_range(cfg, lo, hi);

        // keep events in range and above the trade-size threshold
        std::vector<const SwapEvent*> candidates;
        std::size_t below_threshold = 0;
        for (const SwapEvent& e : filtered.kept) {
            if (e.block < from || e.block > to) continue;
            double usd = e.usd_value ? *e.usd_value
                                     : prices.usd_value(e.token_in, e.amount_in,
                                                        blocks.day_of(e.block));
            if (usd < cfg.thresholds.min_trade_usd) {
                ++below_threshold;
                continue;
            }
            candidates.push_back(&e);
        }
        std::cout << below_threshold << " events below the trade-size threshold\n";

        // one snapshot per distinct block, built up front and shared
        std::set<std::int64_t> distinct_blocks;
        for (const SwapEvent* e : candidates) distinct_blocks.insert(e->block);
        std::vector<std::int64_t> block_list(distinct_blocks.begin(), distinct_blocks.end());
        std::vector<BlockSnapshot> built(block_list.size());
        parallel_for(block_list.size(), cfg.jobs,
                     [&](std::size_t i) { built[i] = snapshots.at_block_start(block_list[i]); });
        std::map<std::int64_t, const BlockSnapshot*> snapshot_of;
        for (std::size_t i = 0; i < block_list.size(); ++i)
            snapshot_of.emplace(block_list[i], &built[i]);

        std::vector<AuditResult> results(candidates.size());
        parallel_for(candidates.size(), cfg.jobs, [&](std::size_t i) {
            const SwapEvent& e = *candidates[i];
            results[i] = audit_trade(e, *snapshot_of.at(e.block), graph, path_cfg,
                                     cfg.thresholds, prices, blocks.day_of(e.block));
        });

        auto out = open_out_file(cfg.out_dir, "audits.jsonl");
        std::size_t optimizable = 0;
        for (const AuditResult& r : results) {
            if (r.optimizable) ++optimizable;
            out << audit_to_json(r).dump() << '\n';
        }
        write_manifest(cfg.out_dir, "audit_manifest.json", "route-audit", from, to,
                       {{"min_trade_usd", cfg.thresholds.min_trade_usd},
                        {"min_gain_usd", cfg.thresholds.min_gain_usd},
                        {"path_usage_threshold", cfg.thresholds.path_usage_threshold},
                        {"network", net.name}});
        std::cout << "audited " << results.size() << " trades, " << optimizable
                  << " optimizable; results in "
                  << (fs::path(cfg.out_dir) / "audits.jsonl").string() << '\n';
        return kOk;
    });
}

int run_arb_scan(const RunConfig& cfg) {
    return guarded([&] {
        if (cfg.reserves_path.empty()) throw UsageConflict("--reserves is required");
        if (cfg.prices_path.empty()) throw UsageConflict("--prices is required");
        if (cfg.blocks_path.empty()) throw UsageConflict("--blocks is required");

        PoolGraph graph = load_graph(cfg);
        const NetworkConfig& net = pick_network(graph, cfg, NetworkConfig::Kind::Cycles);
        int max_len = cfg.max_cycle_len ? *cfg.max_cycle_len : net.max_cycle_len;
        if (max_len < 2) throw UsageConflict("--max-cycle-len must be at least 2");

        SnapshotStore snapshots(parse_reserves(cfg.reserves_path, graph));
        PriceTable prices = parse_prices(cfg.prices_path);
        BlockDayIndex blocks = parse_blocks(cfg.blocks_path);

        std::vector<Cycle> cycles =
            enumerate_cycles(graph, net.pool_ids, net.base_tokens, max_len);
        std::cout << "enumerated " << cycles.size() << " cycles\n";

        auto lo = snapshots.min_record_block();
        auto hi = snapshots.max_record_block();
        auto [from, to] = resolve_range(cfg, lo ? std::optional(*lo + 1) : std::nullopt,
                                        hi ? std::optional(*hi + 1) : std::nullopt);

        std::size_t n_blocks = static_cast<std::size_t>(to - from + 1);
        std::vector<std::vector<CycleOpportunity>> per_block(n_blocks);
        parallel_for(n_blocks, cfg.jobs, [&](std::size_t i) {
            std::int64_t block = from + static_cast<std::int64_t>(i);
            BlockSnapshot snap = snapshots.at_block_start(block);
            per_block[i] = scan_block(snap, cycles, graph, prices, blocks.day_of(block),
                                      cfg.thresholds.min_profit_usd);
        });

        auto out = open_out_file(cfg.out_dir, "opportunities.jsonl");
        std::vector<std::pair<std::int64_t, std::vector<std::string>>> per_block_keys;
        per_block_keys.reserve(n_blocks);
        std::size_t total = 0;
        for (std::size_t i = 0; i < n_blocks; ++i) {
            std::vector<std::string> keys;
            for (const CycleOpportunity& opp : per_block[i]) {
                out << opportunity_to_json(opp).dump() << '\n';
                keys.push_back(opp.cycle_key);
                ++total;
            }
            per_block_keys.emplace_back(from + static_cast<std::int64_t>(i), std::move(keys));
        }

        std::vector<OpportunityRun> runs = track_durations(per_block_keys);
        auto runs_out = open_out_file(cfg.out_dir, "runs.jsonl");
        for (const OpportunityRun& r : runs) {
            json j;
            j["cycle_key"] = r.canonical_key;
            j["start_block"] = r.start_block;
            j["end_block"] = r.end_block;
            j["duration_blocks"] = r.duration_blocks();
            runs_out << j.dump() << '\n';
        }
        write_manifest(cfg.out_dir, "scan_manifest.json", "arb-scan", from, to,
                       {{"min_profit_usd", cfg.thresholds.min_profit_usd},
                        {"max_cycle_len", max_len},
                        {"network", net.name}});
        std::cout << "scanned blocks " << from << ".." << to << ": " << total
                  << " opportunities, " << runs.size() << " runs\n";
        return kOk;
    });
}

int run_report(const RunConfig& cfg) {
    return guarded([&] {
        ReportBundle bundle;
        bundle.thresholds = cfg.thresholds;
        bundle.volatility_token = cfg.volatility_token;

        fs::path dir(cfg.out_dir);
        read_jsonl_if_present(dir / "audits.jsonl", [&](const json& j) {
            AuditResult a;
            a.auditable = j.at("auditable").get<bool>();
            a.block = j.at("block").get<std::int64_t>();
            a.tx_hash = j.at("tx_hash").get<std::string>();
            if (a.auditable) {
                a.original_output = parse_bigint(j.at("original_output").get<std::string>());
                a.optimal_output = parse_bigint(j.at("optimal_output").get<std::string>());
                a.gain_tokens = parse_bigint(j.at("gain_tokens").get<std::string>());
                a.gain_usd = j.at("gain_usd").get<double>();
                a.gain_pct = j.at("gain_pct").get<double>();
                a.paths_used = j.at("paths_used").get<int>();
                a.optimizable = j.at("optimizable").get<bool>();
            } else {
                a.skip_reason = j.value("skip_reason", "");
            }
            bundle.audits.push_back(std::move(a));
        });
        read_jsonl_if_present(dir / "opportunities.jsonl", [&](const json& j) {
            CycleOpportunity o;
            o.block = j.at("block").get<std::int64_t>();
            o.cycle_key = j.at("cycle_key").get<std::string>();
            for (const auto& p : j.at("pools")) o.pools.push_back(p.get<std::string>());
            o.alpha_star = j.at("alpha_star").get<double>();
            o.profit = j.at("profit").get<double>();
            o.relative_profit_pct = j.at("relative_profit_pct").get<double>();
            o.profit_usd = j.at("profit_usd").get<double>();
            bundle.opportunities.push_back(std::move(o));
        });
        read_jsonl_if_present(dir / "runs.jsonl", [&](const json& j) {
            OpportunityRun r;
            r.canonical_key = j.at("cycle_key").get<std::string>();
            r.start_block = j.at("start_block").get<std::int64_t>();
            r.end_block = j.at("end_block").get<std::int64_t>();
            bundle.runs.push_back(std::move(r));
        });

        // daily series need the block->day mapping and the price table
        if (!cfg.blocks_path.empty() && !cfg.prices_path.empty()) {
            BlockDayIndex blocks = parse_blocks(cfg.blocks_path);
            PriceTable prices = parse_prices(cfg.prices_path);
            std::optional<Day> first, last;
            for (const auto& [block, day] : blocks.entries()) {
                if (cfg.from_block && block < *cfg.from_block) continue;
                if (cfg.to_block && block > *cfg.to_block) continue;
                if (!first || day < *first) first = day;
                if (!last || *last < day) last = day;
            }
            if (first && last) {
                bundle.arb_blocks_series =
                    daily_arb_blocks(bundle.opportunities, blocks, *first, *last);
                bundle.price_movement_series =
                    daily_price_movement(prices, cfg.volatility_token, *first, *last);
            }
        }

        emit_report(bundle, cfg.out_dir);
        std::cout << "report written to " << (dir / "report.json").string() << '\n';
        return kOk;
    });
}

int run_validate(const RunConfig& cfg) {
    return guarded([&] {
        if (cfg.events_path.empty()) throw UsageConflict("--events is required");
        if (cfg.reserves_path.empty()) throw UsageConflict("--reserves is required");

        PoolGraph graph = load_graph(cfg);
        std::vector<SwapEvent> events = parse_events(cfg.events_path, graph);
        SnapshotStore snapshots(parse_reserves(cfg.reserves_path, graph));

        ConsistencyReport report =
            validate_consistency(events, snapshots, graph, cfg.consistency_tolerance);

        json j;
        j["events_checked"] = report.events_checked;
        j["events_skipped"] = report.events_skipped;
        j["flag_count"] = report.flags.size();
        j["tolerance"] = cfg.consistency_tolerance;
        json flags = json::array();
        for (const ConsistencyFlag& f : report.flags) {
            flags.push_back({{"block", f.block},
                             {"tx_hash", f.tx_hash},
                             {"pool_id", f.pool_id},
                             {"expected_out", to_decimal_string(f.expected_out)},
                             {"recorded_out", to_decimal_string(f.recorded_out)},
                             {"relative_deviation", f.relative_deviation}});
        }
        j["flags"] = flags;

        auto out = open_out_file(cfg.out_dir, "validation.json");
        out << j.dump(2) << '\n';
        std::cout << "checked " << report.events_checked << " events, "
                  << report.flags.size() << " flagged, " << report.events_skipped
                  << " skipped\n";
        return kOk;
    });
}

} // namespace ammlens
