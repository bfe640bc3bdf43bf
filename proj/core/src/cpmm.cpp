#include "ammlens/cpmm.hpp"

#include <cmath>
#include <stdexcept>

namespace ammlens {

namespace {

void require_active(const Pool& pool) {
    if (!pool.active())
        throw std::domain_error("pool " + pool.id + " has a zero reserve and is inactive");
}

} // namespace

BigRat swap_out_exact(const Pool& pool, Direction dir, const BigInt& amount_in) {
    require_active(pool);
    if (amount_in < 0) throw std::domain_error("negative input amount");
    if (amount_in == 0) return BigRat(0);
    const BigInt& r_in = pool.input_reserve(dir);
    const BigInt& r_out = pool.output_reserve(dir);
    // t_B = R_B * (1-f) * t_A / (R_A + (1-f) * t_A)
    BigRat gamma = BigRat(1) - pool.fee;
    BigRat effective_in = gamma * BigRat(amount_in);
    return BigRat(r_out) * effective_in / (BigRat(r_in) + effective_in);
}

BigInt swap_out(const Pool& pool, Direction dir, const BigInt& amount_in) {
    return rat_floor(swap_out_exact(pool, dir, amount_in));
}

double spot_price(const Pool& pool, Direction dir) {
    require_active(pool);
    BigRat gamma = BigRat(1) - pool.fee;
    return to_double(BigRat(pool.input_reserve(dir)) / (BigRat(pool.output_reserve(dir)) * gamma));
}

ExactEffectivePool effective_of_pool_exact(const Pool& pool, Direction dir) {
    require_active(pool);
    BigRat gamma = BigRat(1) - pool.fee;
    ExactEffectivePool ep;
    ep.a = BigRat(pool.output_reserve(dir)) * gamma;
    ep.b = BigRat(pool.input_reserve(dir));
    ep.c = gamma;
    ep.in_token = pool.input_token(dir);
    ep.out_token = pool.output_token(dir);
    return ep;
}

EffectivePool effective_of_pool(const Pool& pool, Direction dir) {
    return effective_of_pool_exact(pool, dir).to_double();
}

EffectivePool compose(const EffectivePool& first, const EffectivePool& second) {
    if (first.out_token != second.in_token)
        throw std::domain_error("compose: token mismatch between " + first.out_token.symbol +
                                " and " + second.in_token.symbol);
    EffectivePool ep;
    ep.a = first.a * second.a;
    ep.b = first.b * second.b;
    ep.c = second.b * first.c + second.c * first.a;
    ep.in_token = first.in_token;
    ep.out_token = second.out_token;
    return ep;
}

ExactEffectivePool compose(const ExactEffectivePool& first, const ExactEffectivePool& second) {
    if (first.out_token != second.in_token)
        throw std::domain_error("compose: token mismatch between " + first.out_token.symbol +
                                " and " + second.in_token.symbol);
    ExactEffectivePool ep;
    ep.a = first.a * second.a;
    ep.b = first.b * second.b;
    ep.c = second.b * first.c + second.c * first.a;
    ep.in_token = first.in_token;
    ep.out_token = second.out_token;
    return ep;
}

std::optional<ExactEffectivePool> reduce_path(const PoolGraph& graph, const TradePath& path,
                                              const BlockSnapshot& snap) {
    std::optional<ExactEffectivePool> acc;
    for (const PathHop& hop : path.hops) {
        auto pool = graph.materialize(hop.pool_id, snap);
        if (!pool) return std::nullopt;
        ExactEffectivePool ep = effective_of_pool_exact(*pool, hop.dir);
        acc = acc ? compose(*acc, ep) : ep;
    }
    return acc;
}

double eval(const EffectivePool& ep, double x) { return ep.a * x / (ep.b + ep.c * x); }

double marginal(const EffectivePool& ep, double x) {
    double denom = ep.b + ep.c * x;
    return ep.a * ep.b / (denom * denom);
}

double inverse_marginal(const EffectivePool& ep, double lambda) {
    double at_zero = ep.a / ep.b;
    if (lambda <= 0 || lambda > at_zero)
        throw std::domain_error("inverse_marginal: rate outside (0, g'(0)]");
    double x = (std::sqrt(ep.a * ep.b / lambda) - ep.b) / ep.c;
    return x > 0 ? x : 0.0;
}

BigRat eval_exact(const ExactEffectivePool& ep, const BigInt& x) {
    if (x < 0) throw std::domain_error("negative input amount");
    if (x == 0) return BigRat(0);
    BigRat xr(x);
    return ep.a * xr / (ep.b + ep.c * xr);
}

} // namespace ammlens
