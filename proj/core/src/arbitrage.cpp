#include "ammlens/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace ammlens {

namespace {

std::string hop_tag(const PathHop& hop) {
    return hop.pool_id + (hop.dir == Direction::ZeroToOne ? ":>" : ":<");
}

// Rotation with the smallest pool id first. Pool ids are unique within a
// simple cycle, so the rotation is well defined.
std::size_t canonical_rotation(const std::vector<PathHop>& hops) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < hops.size(); ++i)
        if (hops[i].pool_id < hops[best].pool_id) best = i;
    return best;
}

std::string key_of(const std::vector<PathHop>& rotated) {
    std::string key;
    for (std::size_t i = 0; i < rotated.size(); ++i) {
        if (i) key += '|';
        key += hop_tag(rotated[i]);
    }
    return key;
}

} // namespace

std::vector<std::string> Cycle::pool_ids() const {
    std::vector<std::string> ids;
    ids.reserve(hops.size());
    for (const auto& h : hops) ids.push_back(h.pool_id);
    return ids;
}

std::vector<Cycle> enumerate_cycles(const PoolGraph& graph,
                                    const std::vector<std::string>& allowed_pools,
                                    const std::vector<std::string>& base_tokens,
                                    int max_len) {
    if (max_len < 2) throw std::domain_error("enumerate_cycles: max_len below 2");

    std::vector<const Pool*> pools;
    if (allowed_pools.empty()) {
        for (const Pool& p : graph.pools()) pools.push_back(&p);
    } else {
        for (const auto& id : allowed_pools) {
            const Pool* p = graph.find_pool(id);
            if (!p) throw std::domain_error("enumerate_cycles: unknown pool " + id);
            pools.push_back(p);
        }
    }
    std::sort(pools.begin(), pools.end(),
              [](const Pool* a, const Pool* b) { return a->id < b->id; });

    std::vector<std::string> starts;
    if (base_tokens.empty()) {
        std::set<std::string> symbols;
        for (const Pool* p : pools) {
            symbols.insert(p->token0.symbol);
            symbols.insert(p->token1.symbol);
        }
        starts.assign(symbols.begin(), symbols.end());
    } else {
        starts = base_tokens;
    }

    std::map<std::string, Cycle> unique; // key -> cycle, map gives key order
    std::vector<PathHop> hops;
    std::set<std::string> used_pools;
    std::set<std::string> visited_tokens;

    for (const std::string& start_symbol : starts) {
        const TokenId* start = graph.find_token(start_symbol);
        if (!start) throw std::domain_error("enumerate_cycles: unknown token " + start_symbol);
        visited_tokens = {start->symbol};

        auto dfs = [&](auto&& self, const TokenId& at) -> void {
            if (static_cast<int>(hops.size()) >= max_len) return;
            for (const Pool* p : pools) {
                if (used_pools.contains(p->id)) continue;
                Direction dir;
                if (p->token0 == at)
                    dir = Direction::ZeroToOne;
                else if (p->token1 == at)
                    dir = Direction::OneToZero;
                else
                    continue;
                const TokenId& next = p->output_token(dir);
                if (next == *start) {
                    if (hops.empty()) continue; // cycle length at least 2
                    std::vector<PathHop> cycle_hops = hops;
                    cycle_hops.push_back({p->id, dir});
                    std::size_t offset = canonical_rotation(cycle_hops);
                    std::rotate(cycle_hops.begin(), cycle_hops.begin() + offset,
                                cycle_hops.end());
                    Cycle cycle;
                    cycle.canonical_key = key_of(cycle_hops);
                    if (unique.contains(cycle.canonical_key)) continue;
                    const Pool* first = graph.find_pool(cycle_hops.front().pool_id);
                    cycle.base_token = first->input_token(cycle_hops.front().dir);
                    cycle.hops = std::move(cycle_hops);
                    unique.emplace(cycle.canonical_key, std::move(cycle));
                    continue;
                }
                if (visited_tokens.contains(next.symbol)) continue;
                hops.push_back({p->id, dir});
                used_pools.insert(p->id);
                visited_tokens.insert(next.symbol);
                self(self, next);
                visited_tokens.erase(next.symbol);
                used_pools.erase(p->id);
                hops.pop_back();
            }
        };
        dfs(dfs, *start);
    }

    std::vector<Cycle> out;
    out.reserve(unique.size());
    for (auto& [key, cycle] : unique) out.push_back(std::move(cycle));
    return out;
}

std::optional<ExactEffectivePool> cycle_effective(const PoolGraph& graph, const Cycle& cycle,
                                                  const BlockSnapshot& snap) {
    std::optional<ExactEffectivePool> acc;
    for (const PathHop& hop : cycle.hops) {
        auto pool = graph.materialize(hop.pool_id, snap);
        if (!pool) return std::nullopt;
        ExactEffectivePool ep = effective_of_pool_exact(*pool, hop.dir);
        acc = acc ? compose(*acc, ep) : ep;
    }
    return acc;
}

std::optional<CycleOptimum> optimize_cycle(const EffectivePool& ep) {
    if (ep.in_token != ep.out_token)
        throw std::domain_error("optimize_cycle: function does not return to its base token");
    if (ep.a <= ep.b) return std::nullopt; // marginal at zero <= 1, never profitable
    CycleOptimum opt;
    double root_ab = std::sqrt(ep.a * ep.b);
    opt.alpha_star = (root_ab - ep.b) / ep.c;
    double diff = std::sqrt(ep.a) - std::sqrt(ep.b);
    opt.profit = diff * diff / ep.c;
    return opt;
}

std::vector<CycleOpportunity> scan_block(const BlockSnapshot& snap,
                                         const std::vector<Cycle>& cycles,
                                         const PoolGraph& graph, const PriceTable& prices,
                                         Day day, double min_profit_usd) {
    std::vector<CycleOpportunity> found;
    for (const Cycle& cycle : cycles) {
        auto exact = cycle_effective(graph, cycle, snap);
        if (!exact) continue;
        auto opt = optimize_cycle(exact->to_double());
        if (!opt) continue;
        double usd = prices.usd_value(cycle.base_token, opt->profit, day);
        if (!(usd > min_profit_usd)) continue;
        CycleOpportunity opp;
        opp.block = snap.block;
        opp.cycle_key = cycle.canonical_key;
        opp.pools = cycle.pool_ids();
        opp.base_token = cycle.base_token.symbol;
        opp.alpha_star = opt->alpha_star;
        opp.profit = opt->profit;
        opp.relative_profit_pct = 100.0 * opt->profit / opt->alpha_star;
        opp.profit_usd = usd;
        found.push_back(std::move(opp));
    }
    return found;
}

std::vector<OpportunityRun> track_durations(
    const std::vector<std::pair<std::int64_t, std::vector<std::string>>>& per_block_keys) {
    std::vector<OpportunityRun> runs;
    std::map<std::string, std::int64_t> open; // key -> start block
    bool first = true;
    std::int64_t prev = 0;

    auto close_all = [&](std::int64_t end_block) {
        for (const auto& [key, start] : open) runs.push_back({key, start, end_block});
        open.clear();
    };

    for (const auto& [block, keys] : per_block_keys) {
        if (!first && block <= prev)
            throw std::domain_error("track_durations: blocks must be strictly ascending");
        if (!first && block != prev + 1) close_all(prev); // gap breaks every run
        std::set<std::string> present(keys.begin(), keys.end());
        for (auto it = open.begin(); it != open.end();) {
            if (!present.contains(it->first)) {
                runs.push_back({it->first, it->second, prev});
                it = open.erase(it);
            } else {
                ++it;
            }
        }
        for (const auto& key : present)
            if (!open.contains(key)) open.emplace(key, block);
        prev = block;
        first = false;
    }
    if (!first) close_all(prev);

    std::sort(runs.begin(), runs.end(), [](const OpportunityRun& a, const OpportunityRun& b) {
        if (a.start_block != b.start_block) return a.start_block < b.start_block;
        return a.canonical_key < b.canonical_key;
    });
    return runs;
}

} // namespace ammlens
