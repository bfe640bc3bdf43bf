#include "ammlens/graph.hpp"

#include "ammlens/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ammlens {

namespace {

using nlohmann::json;

TokenId parse_token(const json& j) {
    TokenId t;
    t.symbol = j.at("symbol").get<std::string>();
    t.decimals = j.at("decimals").get<unsigned>();
    if (t.symbol.empty()) throw ConfigError("token with empty symbol");
    if (t.decimals > 38)
        throw ConfigError("token " + t.symbol + ": decimals above 38");
    return t;
}

NetworkConfig parse_network(const std::string& name, const json& j) {
    NetworkConfig net;
    net.name = name;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "paths")
        net.kind = NetworkConfig::Kind::Paths;
    else if (kind == "cycles")
        net.kind = NetworkConfig::Kind::Cycles;
    else
        throw ConfigError("network " + name + ": unknown kind '" + kind + "'");
    for (const auto& p : j.at("pools")) net.pool_ids.push_back(p.get<std::string>());
    if (j.contains("max_hops")) net.max_hops = j["max_hops"].get<int>();
    if (j.contains("include_both_direct_venues"))
        net.include_both_direct_venues = j["include_both_direct_venues"].get<bool>();
    if (j.contains("max_cycle_len")) net.max_cycle_len = j["max_cycle_len"].get<int>();
    if (j.contains("base_tokens"))
        for (const auto& t : j["base_tokens"]) net.base_tokens.push_back(t.get<std::string>());
    if (net.kind == NetworkConfig::Kind::Paths && net.max_hops < 1)
        throw ConfigError("network " + name + ": max_hops must be at least 1");
    if (net.kind == NetworkConfig::Kind::Cycles && net.max_cycle_len < 2)
        throw ConfigError("network " + name + ": max_cycle_len must be at least 2");
    return net;
}

} // namespace

PoolGraphConfig PoolGraphConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str(), path);
}

PoolGraphConfig PoolGraphConfig::parse_json(std::string_view text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    try {
        PoolGraphConfig cfg;
        std::map<std::string, TokenId> token_by_symbol;
        for (const auto& t : j.at("tokens")) {
            TokenId token = parse_token(t);
            if (!token_by_symbol.emplace(token.symbol, token).second)
                throw ConfigError("duplicate token symbol " + token.symbol);
            cfg.tokens.push_back(token);
        }
        for (const auto& p : j.at("pools")) {
            Pool pool;
            pool.id = p.at("id").get<std::string>();
            pool.venue = p.at("venue").get<std::string>();
            if (pool.id.empty() || pool.venue.empty())
                throw ConfigError("pool with empty id or venue");
            auto tok = [&](const std::string& field) {
                std::string sym = p.at(field).get<std::string>();
                auto it = token_by_symbol.find(sym);
                if (it == token_by_symbol.end())
                    throw ConfigError("pool " + pool.id + ": unknown token " + sym);
                return it->second;
            };
            pool.token0 = tok("token0");
            pool.token1 = tok("token1");
            if (pool.token0 == pool.token1)
                throw ConfigError("pool " + pool.id + ": token0 equals token1");
            if (p.contains("fee")) pool.fee = parse_rational(p["fee"].get<std::string>());
            if (pool.fee < 0 || pool.fee >= 1)
                throw ConfigError("pool " + pool.id + ": fee outside [0,1)");
            cfg.pools.push_back(std::move(pool));
        }
        if (j.contains("networks")) {
            for (const auto& [name, body] : j["networks"].items())
                cfg.networks.emplace(name, parse_network(name, body));
        }
        if (j.contains("default_path_network"))
            cfg.default_path_network = j["default_path_network"].get<std::string>();
        if (j.contains("default_cycle_network"))
            cfg.default_cycle_network = j["default_cycle_network"].get<std::string>();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

PoolGraph::PoolGraph(PoolGraphConfig cfg) : cfg_(std::move(cfg)) {
    for (std::size_t i = 0; i < cfg_.tokens.size(); ++i) {
        if (!token_index_.emplace(cfg_.tokens[i].symbol, i).second)
            throw ConfigError("duplicate token symbol " + cfg_.tokens[i].symbol);
    }
    for (std::size_t i = 0; i < cfg_.pools.size(); ++i) {
        if (!pool_index_.emplace(cfg_.pools[i].id, i).second)
            throw ConfigError("duplicate pool id " + cfg_.pools[i].id);
    }
    for (const auto& [name, net] : cfg_.networks) {
        for (const auto& id : net.pool_ids)
            if (!pool_index_.contains(id))
                throw ConfigError("network " + name + ": unknown pool " + id);
        for (const auto& sym : net.base_tokens)
            if (!token_index_.contains(sym))
                throw ConfigError("network " + name + ": unknown token " + sym);
    }
    if (!cfg_.default_path_network.empty() && !cfg_.networks.contains(cfg_.default_path_network))
        throw ConfigError("default_path_network does not resolve");
    if (!cfg_.default_cycle_network.empty() && !cfg_.networks.contains(cfg_.default_cycle_network))
        throw ConfigError("default_cycle_network does not resolve");
}

const TokenId* PoolGraph::find_token(std::string_view symbol) const {
    auto it = token_index_.find(symbol);
    return it == token_index_.end() ? nullptr : &cfg_.tokens[it->second];
}

const Pool* PoolGraph::find_pool(std::string_view id) const {
    auto it = pool_index_.find(id);
    return it == pool_index_.end() ? nullptr : &cfg_.pools[it->second];
}

const NetworkConfig* PoolGraph::find_network(std::string_view name) const {
    auto it = cfg_.networks.find(std::string(name));
    return it == cfg_.networks.end() ? nullptr : &it->second;
}

std::vector<const Pool*> PoolGraph::pools_between(const TokenId& a, const TokenId& b) const {
    std::vector<const Pool*> out;
    for (const Pool& p : cfg_.pools) {
        bool forward = p.token0 == a && p.token1 == b;
        bool backward = p.token0 == b && p.token1 == a;
        if (forward || backward) out.push_back(&p);
    }
    std::sort(out.begin(), out.end(),
              [](const Pool* x, const Pool* y) { return x->id < y->id; });
    return out;
}

std::vector<const Pool*> PoolGraph::pools_of(const TokenId& token) const {
    std::vector<const Pool*> out;
    for (const Pool& p : cfg_.pools)
        if (p.token0 == token || p.token1 == token) out.push_back(&p);
    std::sort(out.begin(), out.end(),
              [](const Pool* x, const Pool* y) { return x->id < y->id; });
    return out;
}

std::optional<Pool> PoolGraph::materialize(std::string_view pool_id,
                                           const BlockSnapshot& snap) const {
    const Pool* base = find_pool(pool_id);
    if (!base) return std::nullopt;
    const auto* reserves = snap.find(base->id);
    if (!reserves) return std::nullopt;
    Pool pool = *base;
    pool.reserve0 = reserves->first;
    pool.reserve1 = reserves->second;
    if (!pool.active()) return std::nullopt;
    return pool;
}

} // namespace ammlens
