#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <string>
#include <string_view>

namespace ammlens {

// Token amounts are integers in base units; swap formulas are evaluated in
// exact rational arithmetic and floored to integers only at final outputs.
using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }
inline double to_double(const BigRat& v) { return v.convert_to<double>(); }

// Floor of a rational, correct for negative values as well.
inline BigInt rat_floor(const BigRat& r) {
    BigInt q = numerator(r) / denominator(r);
    if (r < 0 && q * denominator(r) != numerator(r)) --q;
    return q;
}

BigInt parse_bigint(std::string_view text);

// Accepts "p/q" and plain decimals ("0.003", "3"); the result is exact.
BigRat parse_rational(std::string_view text);

std::string to_decimal_string(const BigInt& v);
std::string to_fraction_string(const BigRat& v);

// Shortest round-trip representation, locale independent. Used everywhere a
// double lands in a report file so reruns stay byte-identical.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace ammlens
