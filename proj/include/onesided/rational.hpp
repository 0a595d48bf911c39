#pragma once

#include <boost/rational.hpp>
#include <optional>
#include <string>

#include "onesided/errors.hpp"

namespace onesided {

// Exact fraction arithmetic for the interpolation-parameter algebra.
// int64 components are plenty for desk-scale exponents; boost::rational
// normalizes by gcd after every operation.
using Rational = boost::rational<long long>;

inline double to_double(const Rational& q) {
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

inline std::string to_fraction_string(const Rational& q) {
    std::string s = std::to_string(q.numerator());
    if (q.denominator() != 1) s += "/" + std::to_string(q.denominator());
    return s;
}

// Parses "a" or "a/b".
inline Rational parse_fraction(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text));
        const long long num = std::stoll(text.substr(0, slash));
        const long long den = std::stoll(text.substr(slash + 1));
        if (den == 0) throw InvalidParams("fraction with zero denominator: " + text);
        return Rational(num, den);
    } catch (const std::invalid_argument&) {
        throw InvalidParams("not a fraction: " + text);
    } catch (const std::out_of_range&) {
        throw InvalidParams("fraction out of range: " + text);
    }
}

// Dual exponent p' = p/(p-1); requires p > 1.
inline Rational dual_exponent(const Rational& p) { return p / (p - 1); }
inline double dual_exponent(double p) { return p / (p - 1.0); }

// A scalar that carries an exact rational value whenever all of its inputs
// did. The double rendering always matches the exact value when present.
struct Exponent {
    double value = 0;
    std::optional<Rational> exact;

    Exponent() = default;
    Exponent(double v) : value(v) {}  // NOLINT: implicit by design
    Exponent(const Rational& q) : value(to_double(q)), exact(q) {}
    Exponent(int v) : Exponent(Rational(v)) {}

    bool is_exact() const { return exact.has_value(); }

    friend Exponent operator+(const Exponent& a, const Exponent& b) {
        if (a.exact && b.exact) return Exponent(*a.exact + *b.exact);
        return Exponent(a.value + b.value);
    }
    friend Exponent operator-(const Exponent& a, const Exponent& b) {
        if (a.exact && b.exact) return Exponent(*a.exact - *b.exact);
        return Exponent(a.value - b.value);
    }
    friend Exponent operator*(const Exponent& a, const Exponent& b) {
        if (a.exact && b.exact) return Exponent(*a.exact * *b.exact);
        return Exponent(a.value * b.value);
    }
    friend Exponent operator/(const Exponent& a, const Exponent& b) {
        if (a.exact && b.exact) {
            if (*b.exact == Rational(0)) throw InvalidParams("division by exact zero");
            return Exponent(*a.exact / *b.exact);
        }
        return Exponent(a.value / b.value);
    }
    friend Exponent operator-(const Exponent& a) {
        if (a.exact) return Exponent(-*a.exact);
        return Exponent(-a.value);
    }

    // Exact comparison when both sides are exact, double comparison otherwise.
    friend bool operator==(const Exponent& a, const Exponent& b) {
        if (a.exact && b.exact) return *a.exact == *b.exact;
        return a.value == b.value;
    }
    friend bool operator<(const Exponent& a, const Exponent& b) {
        if (a.exact && b.exact) return *a.exact < *b.exact;
        return a.value < b.value;
    }
    friend bool operator<=(const Exponent& a, const Exponent& b) { return a < b || a == b; }
    friend bool operator>(const Exponent& a, const Exponent& b) { return b < a; }
    friend bool operator>=(const Exponent& a, const Exponent& b) { return b <= a; }

    Exponent dual() const {  // p'
        return *this / (*this - Exponent(1));
    }
};

inline std::string to_display_string(const Exponent& e) {
    if (e.exact) return to_fraction_string(*e.exact);
    return std::to_string(e.value);
}

}  // namespace onesided
