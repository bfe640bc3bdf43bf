#pragma once

#include "ammlens/graph.hpp"
#include "ammlens/types.hpp"

#include <optional>

namespace ammlens {

// Reduced form of a pool, path or cycle: g(x) = a*x / (b + c*x) with
// a, b, c > 0. g(0) = 0, g is strictly increasing and strictly concave,
// g'(0) = a/b and g is bounded above by a/c.
struct EffectivePool {
    double a = 0;
    double b = 0;
    double c = 0;
    TokenId in_token;
    TokenId out_token;
};

// Same form with exact rational coefficients. Solvers run on the double
// version; exact coefficients back the final integer re-checks.
struct ExactEffectivePool {
    BigRat a;
    BigRat b;
    BigRat c;
    TokenId in_token;
    TokenId out_token;

    EffectivePool to_double() const {
        return {ammlens::to_double(a), ammlens::to_double(b), ammlens::to_double(c),
                in_token, out_token};
    }
};

// Floor of R_out*(1-f)*x / (R_in + (1-f)*x), evaluated in exact rationals.
// Throws std::domain_error on an inactive pool or negative input.
BigInt swap_out(const Pool& pool, Direction dir, const BigInt& amount_in);

// Un-floored rational swap output.
BigRat swap_out_exact(const Pool& pool, Direction dir, const BigInt& amount_in);

// Marginal input per unit output at zero size: R_in / (R_out * (1-f)).
// Equals 1 / g'(0) of the pool's effective form.
double spot_price(const Pool& pool, Direction dir);

ExactEffectivePool effective_of_pool_exact(const Pool& pool, Direction dir);
EffectivePool effective_of_pool(const Pool& pool, Direction dir);

// Function composition: second applied after first. The family is closed
// under composition; coefficients are (a1*a2, b1*b2, b2*c1 + c2*a1).
// Throws std::domain_error when the token types do not chain.
EffectivePool compose(const EffectivePool& first, const EffectivePool& second);
ExactEffectivePool compose(const ExactEffectivePool& first, const ExactEffectivePool& second);

// Left fold of compose over the hops of a path, reserves taken from the
// snapshot. Each hop applies its own fee. Returns nullopt when any pool on
// the path is missing from the snapshot or inactive; the caller drops the
// path for that block.
std::optional<ExactEffectivePool> reduce_path(const PoolGraph& graph, const TradePath& path,
                                              const BlockSnapshot& snap);

double eval(const EffectivePool& ep, double x);
double marginal(const EffectivePool& ep, double x);

// Input x with marginal(ep, x) = lambda; 0 at lambda = g'(0). Throws
// std::domain_error for lambda <= 0 or lambda > g'(0).
double inverse_marginal(const EffectivePool& ep, double lambda);

BigRat eval_exact(const ExactEffectivePool& ep, const BigInt& x);

} // namespace ammlens
