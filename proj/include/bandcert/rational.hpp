#pragma once

// Small exact rationals for grid geometry (cutoffs, panel widths).
// Denominators stay tiny (panel widths like 1/4 or 4/5), so int64 is ample.

#include <cstdint>
#include <numeric>
#include <string>

#include "bandcert/ball.hpp"
#include "bandcert/errors.hpp"

namespace bandcert {

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }
    static Rational integer(std::int64_t n) { return Rational(n, 1); }

    void normalize() {
        if (den == 0) throw Error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    Rational operator+(const Rational& o) const { return Rational(num * o.den + o.num * den, den * o.den); }
    Rational operator-(const Rational& o) const { return Rational(num * o.den - o.num * den, den * o.den); }
    Rational operator*(const Rational& o) const { return Rational(num * o.num, den * o.den); }
    Rational operator*(std::int64_t s) const { return Rational(num * s, den); }
    Rational operator/(const Rational& o) const { return Rational(num * o.den, den * o.num); }

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const { return num * o.den < o.num * den; }
    bool operator<=(const Rational& o) const { return num * o.den <= o.num * den; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    bool is_integer() const { return den == 1; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    Ball to_ball(Precision p) const { return Ball::from_ratio(num, den, p); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    // Parses "6000", "0.8", "1/4".
    static Rational parse(const std::string& s) {
        if (s.empty()) throw Error("Rational::parse: empty string");
        auto slash = s.find('/');
        if (slash != std::string::npos)
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(std::stoll(s), 1);
        std::string whole = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        if (frac.size() > 15) throw Error("Rational::parse: too many decimal places in " + s);
        std::int64_t scale = 1;
        for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
        bool negative = !whole.empty() && whole[0] == '-';
        std::int64_t w = (whole.empty() || whole == "-") ? 0 : std::stoll(whole);
        std::int64_t f = frac.empty() ? 0 : std::stoll(frac);
        std::int64_t n = (negative ? -1 : 1) * ((negative ? -w : w) * scale + f);
        return Rational(n, scale);
    }
};

inline Rational operator*(std::int64_t s, const Rational& r) { return r * s; }

}  // namespace bandcert
