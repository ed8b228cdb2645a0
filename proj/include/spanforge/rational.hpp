#ifndef SPANFORGE_RATIONAL_HPP
#define SPANFORGE_RATIONAL_HPP

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace spanforge {

/// Exact arithmetic used by every enumeration oracle.
using Rational = mpq_class;
/// Arbitrary-precision counts (arborescences, Eulerian paths, factorials).
using BigInt = mpz_class;

/// Converts an exact value into the requested scalar type.
template <class Scalar>
Scalar scalar_from(const Rational& q) {
    if constexpr (std::is_same_v<Scalar, Rational>) {
        return q;
    } else {
        return static_cast<Scalar>(q.get_d());
    }
}

inline BigInt factorial(unsigned long n) {
    BigInt out;
    mpz_fac_ui(out.get_mpz_t(), n);
    return out;
}

/// Parses a locale-independent decimal real ("3", "-0.25", "1.5e-3") into
/// an exact rational. Throws std::invalid_argument on malformed input.
inline Rational parse_decimal(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty number");
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    long scale = 0;
    bool seen_digit = false;
    bool seen_point = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) --scale;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw std::invalid_argument("malformed number: " + std::string(text));
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E')
            throw std::invalid_argument("malformed number: " + std::string(text));
        ++pos;
        std::string_view exp_text = text.substr(pos);
        if (exp_text.empty()) throw std::invalid_argument("malformed exponent: " + std::string(text));
        std::size_t used = 0;
        long exponent = 0;
        try {
            exponent = std::stol(std::string(exp_text), &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed exponent: " + std::string(text));
        }
        if (used != exp_text.size() || exponent > 4000 || exponent < -4000)
            throw std::invalid_argument("malformed exponent: " + std::string(text));
        scale += exponent;
    }
    BigInt mantissa(digits, 10);
    BigInt power;
    mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    Rational out = scale < 0 ? Rational(mantissa, power) : Rational(mantissa * power);
    out.canonicalize();
    return negative ? Rational(-out) : out;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace spanforge

#endif
