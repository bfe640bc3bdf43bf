#include "ammlens/router.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ammlens {

namespace {

std::vector<std::string> path_ids(const TradePath& p) {
    std::vector<std::string> ids;
    ids.reserve(p.hops.size());
    for (const auto& h : p.hops) ids.push_back(h.pool_id);
    return ids;
}

bool id_sequence_less(const TradePath& x, const TradePath& y) {
    auto a = path_ids(x), b = path_ids(y);
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Allocation solving marginal(ep, x) = lambda, clamped at zero. Valid for
// any lambda > 0, unlike the public inverse_marginal.
double allocation_at(const EffectivePool& ep, double lambda) {
    double x = (std::sqrt(ep.a * ep.b / lambda) - ep.b) / ep.c;
    return x > 0 ? x : 0.0;
}

} // namespace

PathSetConfig PathSetConfig::from_network(const NetworkConfig& net) {
    PathSetConfig cfg;
    cfg.allowed_pools = net.pool_ids;
    cfg.max_hops = net.max_hops;
    cfg.include_both_direct_venues = net.include_both_direct_venues;
    return cfg;
}

std::vector<TradePath> enumerate_paths(const PoolGraph& graph, const TokenId& in,
                                       const TokenId& out, const PathSetConfig& cfg) {
    if (in == out) throw std::domain_error("enumerate_paths: input equals output token");
    if (cfg.max_hops < 1) throw std::domain_error("enumerate_paths: max_hops below 1");

    std::vector<const Pool*> pools;
    if (cfg.allowed_pools.empty()) {
        for (const Pool& p : graph.pools()) pools.push_back(&p);
    } else {
        for (const auto& id : cfg.allowed_pools) {
            const Pool* p = graph.find_pool(id);
            if (!p) throw std::domain_error("enumerate_paths: unknown pool " + id);
            pools.push_back(p);
        }
    }
    std::sort(pools.begin(), pools.end(),
              [](const Pool* a, const Pool* b) { return a->id < b->id; });

    std::vector<TradePath> found;
    std::vector<PathHop> hops;
    std::set<std::string> used_pools;
    std::set<std::string> visited_tokens{in.symbol};

    auto dfs = [&](auto&& self, const TokenId& at) -> void {
        if (static_cast<int>(hops.size()) >= cfg.max_hops) return;
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
            if (next == out) {
                TradePath path;
                path.hops = hops;
                path.hops.push_back({p->id, dir});
                path.in_token = in;
                path.out_token = out;
                found.push_back(std::move(path));
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
    dfs(dfs, in);

    std::sort(found.begin(), found.end(), id_sequence_less);
    return found;
}

RoutePlan optimal_split(std::span<const EffectivePool> paths, double total_input) {
    if (paths.empty()) throw std::domain_error("optimal_split: empty path set");
    if (!(total_input > 0)) throw std::domain_error("optimal_split: input must be positive");

    const std::size_t n = paths.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        double mi = paths[i].a / paths[i].b;
        double mj = paths[j].a / paths[j].b;
        if (mi != mj) return mi > mj;
        return i < j;
    });

    // Grow the active set while the next path's marginal at zero beats the
    // water level implied by the current set.
    double sum_b_over_c = 0;
    double sum_sqrt_ab_over_c = 0;
    double lambda = 0;
    std::size_t active = 0;
    while (active < n) {
        const EffectivePool& ep = paths[order[active]];
        sum_b_over_c += ep.b / ep.c;
        sum_sqrt_ab_over_c += std::sqrt(ep.a * ep.b) / ep.c;
        ++active;
        double sqrt_inv_lambda = (total_input + sum_b_over_c) / sum_sqrt_ab_over_c;
        lambda = 1.0 / (sqrt_inv_lambda * sqrt_inv_lambda);
        if (active == n) break;
        const EffectivePool& next = paths[order[active]];
        if (next.a / next.b <= lambda) break;
    }

    RoutePlan plan;
    plan.total_input = total_input;
    plan.amounts.assign(n, 0.0);
    for (std::size_t i = 0; i < active; ++i)
        plan.amounts[order[i]] = allocation_at(paths[order[i]], lambda);

    double sum = std::accumulate(plan.amounts.begin(), plan.amounts.end(), 0.0);
    if (!std::isfinite(sum) || std::abs(sum - total_input) > 1e-9 * total_input) {
        // Bisection on the water level; the allocation sum is strictly
        // decreasing in lambda on (0, max marginal at zero].
        double hi = 0;
        for (const auto& ep : paths) hi = std::max(hi, ep.a / ep.b);
        double lo = hi;
        auto alloc_sum = [&](double lam) {
            double s = 0;
            for (const auto& ep : paths) s += allocation_at(ep, lam);
            return s;
        };
        while (alloc_sum(lo) < total_input) {
            lo /= 2;
            if (lo < std::numeric_limits<double>::min())
                throw std::domain_error("optimal_split: bisection bracket failed");
        }
        for (int iter = 0; iter < 200; ++iter) {
            double mid = 0.5 * (lo + hi);
            double s = alloc_sum(mid);
            if (std::abs(s - total_input) <= 1e-12 * total_input) {
                lo = hi = mid;
                break;
            }
            (s > total_input ? lo : hi) = mid;
        }
        lambda = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < n; ++i) plan.amounts[i] = allocation_at(paths[i], lambda);
    }

    plan.lambda_star = lambda;
    plan.total_output = 0;
    for (std::size_t i = 0; i < n; ++i) plan.total_output += eval(paths[i], plan.amounts[i]);
    return plan;
}

int count_used_paths(const RoutePlan& plan, double threshold) {
    int used = 0;
    for (double x : plan.amounts)
        if (x >= threshold * plan.total_input) ++used;
    return used;
}

std::vector<TradePath> build_audit_path_set(const PoolGraph& graph, const TokenId& in,
                                            const TokenId& out, const PathSetConfig& cfg,
                                            const BlockSnapshot& snap, const PriceTable& prices,
                                            Day day) {
    std::vector<const Pool*> allowed;
    if (cfg.allowed_pools.empty()) {
        for (const Pool& p : graph.pools()) allowed.push_back(&p);
    } else {
        for (const auto& id : cfg.allowed_pools) {
            const Pool* p = graph.find_pool(id);
            if (!p) throw std::domain_error("unknown pool in path config: " + id);
            allowed.push_back(p);
        }
    }

    auto usd_liquidity = [&](const Pool& p) -> std::optional<double> {
        const auto* reserves = snap.find(p.id);
        if (!reserves) return std::nullopt;
        return prices.usd_value(p.token0, reserves->first, day) +
               prices.usd_value(p.token1, reserves->second, day);
    };

    // Group parallel pools by unordered token pair; keep every direct pool
    // when configured, otherwise only the deepest by USD reserve value.
    std::map<std::pair<std::string, std::string>, std::vector<const Pool*>> by_pair;
    for (const Pool* p : allowed) {
        auto key = std::minmax(p->token0.symbol, p->token1.symbol);
        by_pair[{key.first, key.second}].push_back(p);
    }
    auto direct_key = std::minmax(in.symbol, out.symbol);

    PathSetConfig reduced = cfg;
    reduced.allowed_pools.clear();
    for (auto& [pair, pools] : by_pair) {
        std::sort(pools.begin(), pools.end(),
                  [](const Pool* a, const Pool* b) { return a->id < b->id; });
        bool is_direct = pair == std::pair(direct_key.first, direct_key.second);
        if ((is_direct && cfg.include_both_direct_venues) || pools.size() == 1) {
            for (const Pool* p : pools) reduced.allowed_pools.push_back(p->id);
            continue;
        }
        const Pool* best = nullptr;
        double best_value = -1;
        for (const Pool* p : pools) {
            auto value = usd_liquidity(*p);
            if (!value) continue;
            if (*value > best_value) {
                best = p;
                best_value = *value;
            }
        }
        if (best) reduced.allowed_pools.push_back(best->id);
    }
    std::sort(reduced.allowed_pools.begin(), reduced.allowed_pools.end());

    std::vector<TradePath> candidates = enumerate_paths(graph, in, out, reduced);

    // Independence: keep a node-disjoint, pool-disjoint subset. Shorter paths
    // first so both direct venues always survive.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const TradePath& a, const TradePath& b) {
                         if (a.length() != b.length()) return a.length() < b.length();
                         return id_sequence_less(a, b);
                     });
    std::vector<TradePath> kept;
    std::set<std::string> used_pools;
    std::set<std::string> used_intermediates;
    for (TradePath& path : candidates) {
        bool clash = false;
        std::vector<std::string> intermediates;
        for (std::size_t h = 0; h < path.hops.size(); ++h) {
            if (used_pools.contains(path.hops[h].pool_id)) clash = true;
            if (h > 0) {
                const Pool* p = graph.find_pool(path.hops[h].pool_id);
                const TokenId& mid = p->input_token(path.hops[h].dir);
                intermediates.push_back(mid.symbol);
                if (used_intermediates.contains(mid.symbol)) clash = true;
            }
        }
        if (clash) continue;
        for (const auto& h : path.hops) used_pools.insert(h.pool_id);
        for (auto& t : intermediates) used_intermediates.insert(std::move(t));
        kept.push_back(std::move(path));
    }
    return kept;
}

AuditResult audit_trade(const SwapEvent& event, const BlockSnapshot& snap,
                        const PoolGraph& graph, const PathSetConfig& cfg,
                        const Thresholds& thresholds, const PriceTable& prices, Day day) {
    AuditResult result;
    result.block = event.block;
    result.tx_hash = event.tx_hash;
    result.original_output = event.amount_out;

    if (event.amount_in < 1) {
        result.skip_reason = "input below one base unit";
        return result;
    }
    if (event.amount_out == 0) {
        result.skip_reason = "recorded output is zero";
        return result;
    }

    std::vector<TradePath> paths =
        build_audit_path_set(graph, event.token_in, event.token_out, cfg, snap, prices, day);

    std::vector<TradePath> available;
    std::vector<ExactEffectivePool> exact;
    for (TradePath& path : paths) {
        auto ep = reduce_path(graph, path, snap);
        if (!ep) continue; // pool vanished at this block; drop the path
        available.push_back(std::move(path));
        exact.push_back(std::move(*ep));
    }
    if (available.empty()) {
        result.skip_reason = "no available path";
        return result;
    }

    std::vector<EffectivePool> effective;
    effective.reserve(exact.size());
    for (const auto& ep : exact) effective.push_back(ep.to_double());

    const double total_input = to_double(event.amount_in);
    RoutePlan plan = optimal_split(effective, total_input);

    // Integer allocation summing exactly to the input; the double split can
    // be off by its mantissa granularity on large amounts.
    std::vector<BigInt> alloc(available.size());
    BigInt assigned = 0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < available.size(); ++i) {
        double x = std::max(0.0, std::min(plan.amounts[i], total_input));
        alloc[i] = BigInt(x);
        assigned += alloc[i];
        if (plan.amounts[i] > plan.amounts[largest]) largest = i;
    }
    alloc[largest] += event.amount_in - assigned;
    if (alloc[largest] < 0) {
        // degenerate rounding; push the whole trade down the best path
        for (auto& a : alloc) a = 0;
        alloc[largest] = event.amount_in;
    }

    BigInt optimal = 0;
    for (std::size_t i = 0; i < available.size(); ++i) {
        if (alloc[i] == 0) continue;
        optimal += rat_floor(eval_exact(exact[i], alloc[i]));
    }

    result.auditable = true;
    result.optimal_output = optimal;
    result.gain_tokens = optimal - event.amount_out;
    result.gain_pct = 100.0 * to_double(result.gain_tokens) / to_double(event.amount_out);
    result.gain_usd = prices.usd_value(event.token_out, result.gain_tokens, day);
    result.paths_used = count_used_paths(plan, thresholds.path_usage_threshold);
    result.optimizable = result.gain_usd > thresholds.min_gain_usd;
    result.paths = std::move(available);
    result.plan = std::move(plan);
    return result;
}

} // namespace ammlens
