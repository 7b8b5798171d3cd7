#pragma once

/**
 * Scalar types and the small amount of numeric glue shared by every module.
 *
 * Two scalar types matter: Rational for exact fractions (arbitrary-size
 * integers, no rounding anywhere) and Real, a 50-digit binary float used for
 * anything that needs square roots, logarithms or bisection. The algorithms
 * are templates over the scalar so the same code produces 314/8125 in exact
 * mode and 0.0386461538... in float mode. long double and double also work
 * and are what the dynamic-programming oracle uses for speed.
 */

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <ios>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "errors.hpp"

namespace cantorquant {

namespace mp = boost::multiprecision;

using BigInt = mp::number<mp::cpp_int_backend<>, mp::et_off>;
using Rational = mp::number<mp::rational_adaptor<mp::cpp_int_backend<>>, mp::et_off>;
using Real = mp::number<mp::cpp_bin_float<50>, mp::et_off>;

/// Significant decimal digits Real can carry reliably.
inline constexpr int real_digits = 50;

template <class T>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

/// Slack used when deciding ties between closed-form values that are equal
/// in exact arithmetic. Zero in exact mode.
template <class T>
T tie_tolerance() {
    if constexpr (is_exact_v<T>) {
        return T(0);
    } else if constexpr (std::is_same_v<T, Real>) {
        return T("1e-40");
    } else if constexpr (std::is_same_v<T, long double>) {
        return 1e-16L;
    } else {
        return T(1e-13);
    }
}

template <class T>
T ratio(long long num, long long den) {
    if constexpr (std::is_floating_point_v<T>) {
        return static_cast<T>(num) / static_cast<T>(den);
    } else {
        return T(num) / T(den);
    }
}

template <class T>
T ipow(T base, unsigned exponent) {
    T result(1);
    while (exponent != 0) {
        if (exponent & 1U) result *= base;
        exponent >>= 1U;
        if (exponent != 0) base *= base;
    }
    return result;
}

template <class T>
T abs_value(const T& x) {
    return x < T(0) ? T(-x) : x;
}

template <class To, class From>
To convert(const From& x) {
    if constexpr (std::is_same_v<To, From>) {
        return x;
    } else if constexpr (std::is_floating_point_v<To>) {
        if constexpr (std::is_floating_point_v<From>) {
            return static_cast<To>(x);
        } else {
            return x.template convert_to<To>();
        }
    } else if constexpr (std::is_same_v<From, Rational> && std::is_same_v<To, Real>) {
        return Real(mp::numerator(x)) / Real(mp::denominator(x));
    } else {
        return To(x);
    }
}

template <class T>
Real to_real(const T& x) {
    return convert<Real>(x);
}

template <class T>
double to_double(const T& x) {
    return convert<double>(x);
}

namespace detail {

// digits: significant digits without sign or point; value = 0.d1d2... * 10^(exp10+1)
// i.e. d1 sits at the 10^exp10 position.
inline std::string place_decimal(bool negative, std::string digits, long exp10) {
    std::string out;
    if (exp10 < 0) {
        out = "0." + std::string(static_cast<std::size_t>(-exp10 - 1), '0') + digits;
    } else if (static_cast<std::size_t>(exp10 + 1) >= digits.size()) {
        out = digits + std::string(static_cast<std::size_t>(exp10 + 1) - digits.size(), '0');
    } else {
        out = digits.substr(0, static_cast<std::size_t>(exp10 + 1)) + "." +
              digits.substr(static_cast<std::size_t>(exp10 + 1));
    }
    if (out.find('.') != std::string::npos) {
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
    }
    if (negative && out != "0") out.insert(out.begin(), '-');
    return out;
}

// Reformats "-d.ddddde+XX" into plain positional notation.
inline std::string from_scientific(const std::string& sci) {
    std::size_t pos = 0;
    bool negative = false;
    if (sci[pos] == '-') {
        negative = true;
        ++pos;
    }
    auto e = sci.find_first_of("eE");
    std::string mantissa = sci.substr(pos, e - pos);
    long exp10 = e == std::string::npos ? 0 : std::stol(sci.substr(e + 1));
    std::string digits;
    for (char c : mantissa) {
        if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
    }
    if (digits.find_first_not_of('0') == std::string::npos) return "0";
    return place_decimal(negative, digits, exp10);
}

inline std::string rational_decimal(const Rational& x, int significant) {
    BigInt num = mp::numerator(x);
    BigInt den = mp::denominator(x);
    if (num == 0) return "0";
    bool negative = num < 0;
    if (negative) num = -num;

    // exp10 with 10^exp10 <= num/den < 10^(exp10+1)
    long exp10 = static_cast<long>(num.str().size()) - static_cast<long>(den.str().size());
    auto ge_pow = [&](long e) {
        if (e >= 0) return num >= den * mp::pow(BigInt(10), static_cast<unsigned>(e));
        return num * mp::pow(BigInt(10), static_cast<unsigned>(-e)) >= den;
    };
    while (!ge_pow(exp10)) --exp10;
    while (ge_pow(exp10 + 1)) ++exp10;

    long shift = significant - 1 - exp10;
    BigInt scaled_num = num;
    BigInt scaled_den = den;
    if (shift >= 0) {
        scaled_num *= mp::pow(BigInt(10), static_cast<unsigned>(shift));
    } else {
        scaled_den *= mp::pow(BigInt(10), static_cast<unsigned>(-shift));
    }
    BigInt rounded = (2 * scaled_num + scaled_den) / (2 * scaled_den);
    std::string digits = rounded.str();
    if (static_cast<int>(digits.size()) > significant) {
        // rounding carried into a new leading digit
        ++exp10;
        digits.pop_back();
    }
    return place_decimal(negative, digits, exp10);
}

} // namespace detail

/// Plain positional decimal string with at most `significant` significant
/// digits; trailing zeros are dropped. Never uses an exponent.
template <class T>
std::string format_decimal(const T& x, int significant) {
    if constexpr (is_exact_v<T>) {
        return detail::rational_decimal(x, significant);
    } else if constexpr (std::is_floating_point_v<T>) {
        std::ostringstream os;
        os.precision(significant - 1);
        os << std::scientific << x;
        return detail::from_scientific(os.str());
    } else {
        return detail::from_scientific(x.str(significant - 1, std::ios_base::scientific));
    }
}

/// Decimal string rounded to a fixed number of places after the point.
inline std::string format_fixed(const Real& x, int places) {
    std::string s = x.str(places, std::ios_base::fixed);
    if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
        s.erase(0, s.front() == '-' ? 1 : 0);
    }
    return s;
}

inline std::string format_fraction(const Rational& x) {
    if (mp::denominator(x) == 1) return mp::numerator(x).str();
    return mp::numerator(x).str() + "/" + mp::denominator(x).str();
}

namespace detail {

inline bool is_decimal_literal(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    bool digits = false;
    bool point = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = true;
        } else if (c == '.' && !point) {
            point = true;
        } else if ((c == 'e' || c == 'E') && digits) {
            ++i;
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
            if (i == s.size()) return false;
            for (; i < s.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
            }
            return true;
        } else {
            return false;
        }
    }
    return digits;
}

inline bool is_integer_literal(std::string_view s) {
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size()) return false;
    return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

/// Base-10 integer; BigInt alone would read "074" as octal.
inline BigInt decimal_bigint(std::string s) {
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    const std::size_t sign = !s.empty() && s.front() == '-' ? 1 : 0;
    const std::size_t first = s.find_first_not_of('0', sign);
    s.erase(sign, (first == std::string::npos ? s.size() : first) - sign);
    if (s.size() == sign) return BigInt(0);
    return BigInt(s);
}

} // namespace detail

/// A number as typed by the user: "p/q" stays exact, anything else is Real.
using ParsedNumber = std::variant<Rational, Real>;

inline ParsedNumber parse_number(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (auto slash = s.find('/'); slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!detail::is_integer_literal(num) || !detail::is_integer_literal(den)) {
            throw InputError("malformed fraction '" + s + "'");
        }
        const BigInt d = detail::decimal_bigint(den);
        if (d == 0) throw InputError("zero denominator in '" + s + "'");
        return Rational(detail::decimal_bigint(num), d);
    }
    if (!detail::is_decimal_literal(s)) throw InputError("not a number: '" + s + "'");
    return Real(s);
}

/// Exact value of a decimal literal such as "0.1622776602" or "2.5e-3".
inline Rational decimal_to_rational(std::string_view text) {
    std::string s(text);
    if (!detail::is_decimal_literal(s)) throw InputError("not a decimal: '" + s + "'");
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        exp10 = std::stol(s.substr(e + 1));
        s.erase(e);
    }
    if (auto dot = s.find('.'); dot != std::string::npos) {
        exp10 -= static_cast<long>(s.size() - dot - 1);
        s.erase(dot, 1);
    }
    Rational x{detail::decimal_bigint(s)};
    BigInt scale = mp::pow(BigInt(10), static_cast<unsigned>(exp10 < 0 ? -exp10 : exp10));
    return exp10 < 0 ? Rational(x / Rational(scale)) : Rational(x * Rational(scale));
}

/// Parses "p/q" or a decimal into T; decimals are exact when T is Rational.
template <class T>
T parse_as(std::string_view text) {
    if constexpr (is_exact_v<T>) {
        if (text.find('/') != std::string_view::npos) return std::get<Rational>(parse_number(text));
        return decimal_to_rational(text);
    } else {
        return convert<T>(std::visit([](const auto& v) { return to_real(v); }, parse_number(text)));
    }
}

inline Real parse_real(std::string_view text) {
    return std::visit([](const auto& v) { return to_real(v); }, parse_number(text));
}

} // namespace cantorquant
