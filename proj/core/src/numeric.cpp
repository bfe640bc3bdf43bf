#include "ammlens/numeric.hpp"

#include <stdexcept>

namespace ammlens {

BigInt parse_bigint(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty integer literal");
    std::size_t start = text[0] == '-' ? 1 : 0;
    if (start == text.size()) throw std::invalid_argument("bare sign is not an integer");
    for (std::size_t i = start; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9')
            throw std::invalid_argument("invalid integer literal: " + std::string(text));
    }
    return BigInt(std::string(text));
}

BigRat parse_rational(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigInt num = parse_bigint(text.substr(0, slash));
        BigInt den = parse_bigint(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
        return BigRat(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (frac.empty()) throw std::invalid_argument("trailing dot: " + std::string(text));
        bool negative = !whole.empty() && whole[0] == '-';
        BigInt w = whole.empty() || whole == "-" ? BigInt(0) : parse_bigint(whole);
        BigInt f = parse_bigint(frac);
        if (f < 0) throw std::invalid_argument("invalid rational literal: " + std::string(text));
        BigInt scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        BigInt num = w * scale + (negative ? -f : f);
        return BigRat(num, scale);
    }
    return BigRat(parse_bigint(text));
}

std::string to_decimal_string(const BigInt& v) { return v.str(); }

std::string to_fraction_string(const BigRat& v) {
    if (denominator(v) == 1) return numerator(v).str();
    return numerator(v).str() + "/" + denominator(v).str();
}

} // namespace ammlens
