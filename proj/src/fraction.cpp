#include "hemd/fraction.hpp"

#include <cctype>
#include <stdexcept>

namespace hemd {

Fraction parse_decimal(const std::string& text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    BigInt digits = 0;
    BigInt denom = 1;
    bool seen_digit = false;
    bool seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("bad decimal: " + text);
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = digits * 10 + (c - '0');
            if (seen_dot) denom *= 10;
            seen_digit = true;
        } else {
            throw std::invalid_argument("bad decimal: " + text);
        }
    }
    if (!seen_digit) throw std::invalid_argument("bad decimal: " + text);
    if (negative) digits = -digits;
    return Fraction(digits, denom);
}

}  // namespace hemd
