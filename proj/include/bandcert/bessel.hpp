#pragma once

// Certified evaluation of integer-order Bessel functions J_n on [0, inf).
//
// Two routes, both with explicit remainder control:
//   * the alternating power series, truncated once the term ratio drops
//     below 1/2 so the tail is dominated by a geometric series;
//   * the large-argument expansion J_n(z) = sqrt(2/(pi z)) (cos(w) E -
//     sin(w) O) + R with w = z - pi/4 - n pi/2, whose order-M remainder is
//     bounded by the magnitude of the first omitted term once M >= n.
// Negative orders reduce through J_{-n} = (-1)^n J_n.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bandcert/ball.hpp"
#include "bandcert/errors.hpp"

namespace bandcert {

namespace detail {

inline bool lower_nonneg(const Ball& x) {
    return mpfr_sgn(x.mid_ptr()) >= 0 && mpfr_cmpabs(x.mid_ptr(), x.rad_ptr()) >= 0;
}

inline Ball unit_interval_clamp(const Ball& v, Precision p) {
    Ball unit = Ball::widen(Ball::zero(p), Ball::from_long(1, p));
    auto r = Ball::intersect(v, unit, p);
    if (!r) throw PrecisionExhausted("bessel: enclosure drifted outside [-1, 1]");
    return *r;
}

// J_n(x) = sum_m (-1)^m (x/2)^{n+2m} / (m! (n+m)!), summed until the
// remaining terms are geometrically dominated.
inline Ball bessel_series(long n, const Ball& x, Precision p) {
    double xu = x.upper_d();
    long extra = static_cast<long>(std::ceil(1.4427 * xu)) + 96;
    Precision pw(p.bits + extra);
    Ball xw = Ball::round_to(x, pw);
    Ball half = Ball::mul_2si(xw, -1, pw);
    Ball q = Ball::neg(Ball::mul(half, half, pw));
    Ball t = Ball::pow_int(half, n, pw);
    for (long k = 2; k <= n; ++k) t = Ball::div_ui(t, static_cast<unsigned long>(k), pw);
    Ball sum = t;
    double hu = xu / 2.0;
    double target = std::ldexp(1.0, -static_cast<int>(p.bits + 24));
    long cap = static_cast<long>(10.0 * hu) + 8 * p.bits + 1000;
    bool closed = false;
    for (long m = 1; m <= cap; ++m) {
        t = Ball::mul(t, q, pw);
        t = Ball::div_ui(t, static_cast<unsigned long>(m) * static_cast<unsigned long>(n + m), pw);
        sum = Ball::add(sum, t, pw);
        double rho = hu * hu / (static_cast<double>(m + 1) * static_cast<double>(n + m + 1));
        if (rho < 0.5) {
            double tail = t.abs_upper_d() * rho / (1.0 - rho);
            if (tail <= target) {
                sum = Ball::widen(sum, Ball::from_double(tail, Precision(64)));
                closed = true;
                break;
            }
        }
    }
    if (!closed) throw PrecisionExhausted("bessel_series: no closure after term cap");
    return unit_interval_clamp(Ball::round_to(sum, p), p);
}

// Large-argument route; sets *ok = false when the term magnitudes do not
// reach the target before the cap (caller falls back to the series).
inline Ball bessel_asym(long n, const Ball& x, Precision p, bool* ok) {
    *ok = false;
    Precision pw(p.bits + 48);
    Ball z = Ball::round_to(x, pw);
    if (!z.definitely_positive()) return Ball::zero(p);
    Ball invz = Ball::div(Ball::from_long(1, pw), z, pw);
    Ball even = Ball::from_long(1, pw);
    Ball odd = Ball::zero(pw);
    Ball t = Ball::from_long(1, pw);
    double target = std::ldexp(1.0, -static_cast<int>(p.bits + 16));
    const long cap = 400;
    long four_n2 = 4 * n * n;
    Ball rem(pw);
    bool have_rem = false;
    for (long k = 1; k <= cap; ++k) {
        long numer = four_n2 - 1 - 4 * k * (k - 1);
        t = Ball::mul_si(t, numer, pw);
        t = Ball::mul(t, invz, pw);
        t = Ball::div_ui(t, static_cast<unsigned long>(8 * k), pw);
        double tu = t.abs_upper_d();
        if (k >= std::max(n, 1L) && tu <= target) {
            rem = Ball::abs_enclosure(t, pw);
            have_rem = true;
            break;
        }
        if (tu > 1e40) return Ball::zero(p);  // diverging; series territory
        switch (k & 3) {
            case 0: even = Ball::add(even, t, pw); break;
            case 1: odd = Ball::add(odd, t, pw); break;
            case 2: even = Ball::sub(even, t, pw); break;
            case 3: odd = Ball::sub(odd, t, pw); break;
        }
    }
    if (!have_rem) return Ball::zero(p);

    // omega_n = a - n pi/2 with a = z - pi/4: quarter turns permute the
    // cos/sin pair exactly.
    Ball a = Ball::sub(z, Ball::mul_2si(Ball::pi(pw), -2, pw), pw);
    Ball ca = Ball::cos_(a, pw);
    Ball sa = Ball::sin_(a, pw);
    Ball cw(pw), sw(pw);
    switch (n & 3) {
        case 0: cw = ca; sw = sa; break;
        case 1: cw = sa; sw = Ball::neg(ca); break;
        case 2: cw = Ball::neg(ca); sw = Ball::neg(sa); break;
        case 3: cw = Ball::neg(sa); sw = ca; break;
    }
    Ball main = Ball::sub(Ball::mul(cw, even, pw), Ball::mul(sw, odd, pw), pw);
    main = Ball::widen(main, rem.upper_bound_ball(Precision(64)));
    Ball amp = Ball::sqrt(Ball::div(Ball::mul_2si(invz, 1, pw), Ball::pi(pw), pw), pw);
    Ball res = Ball::mul(amp, main, pw);
    *ok = true;
    return unit_interval_clamp(Ball::round_to(res, p), p);
}

inline double asym_threshold(long order) {
    return std::max(24.0, 0.35 * static_cast<double>(order) * static_cast<double>(order));
}

}  // namespace detail

struct BesselOrder {
    long n;
};

inline Ball bessel_j(long n, const Ball& x, Precision p) {
    if (!x.is_finite()) throw DomainViolation("bessel_j: non-finite argument");
    if (!detail::lower_nonneg(x)) throw DomainViolation("bessel_j: argument must lie in [0, inf)");
    if (n < 0) {
        Ball v = bessel_j(-n, x, p);
        return ((-n) % 2 == 1) ? Ball::neg(v) : v;
    }
    double xl = x.lower_d();
    if (xl >= detail::asym_threshold(n)) {
        bool ok = false;
        Ball v = detail::bessel_asym(n, x, p, &ok);
        if (ok) return v;
    }
    return detail::bessel_series(n, x, p);
}

// Shared table of J_o(node_i) for all orders 0..max_order; immutable after
// the build.  Column strategy per node: the large-argument expansion where
// it certifies, otherwise seeded downward recurrence
// J_{m-1} = (2m/x) J_m - J_{m+1}, otherwise the plain series per order.
class BesselTable {
  public:
    BesselTable() = default;
    BesselTable(long max_order, const std::vector<Ball>& nodes, Precision p)
        : max_order_(max_order), prec_bits_(p.bits) {
        rows_.assign(static_cast<size_t>(max_order + 1), {});
        for (auto& row : rows_) row.resize(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) build_column(nodes[i], i, p);
    }

    long max_order() const { return max_order_; }
    size_t node_count() const { return rows_.empty() ? 0 : rows_[0].size(); }
    long prec_bits() const { return prec_bits_; }

    const Ball& at(long order, size_t node_index) const {
        if (order < 0 || order > max_order_) throw DomainViolation("BesselTable: order out of range");
        return rows_[static_cast<size_t>(order)][node_index];
    }

    void save(std::ostream& os, const std::string& key) const {
        os << "bandcert-bessel-table v1\n";
        os << "key " << key << "\n";
        os << "orders " << (max_order_ + 1) << " nodes " << node_count() << " prec " << prec_bits_
           << "\n";
        for (const auto& row : rows_)
            for (const auto& b : row) os << b.str() << "\n";
    }

    static std::optional<BesselTable> load(std::istream& is, const std::string& key) {
        std::string line;
        if (!std::getline(is, line) || line != "bandcert-bessel-table v1") return std::nullopt;
        if (!std::getline(is, line) || line != "key " + key) return std::nullopt;
        long orders = 0;
        size_t nodes = 0;
        long prec = 0;
        if (!std::getline(is, line)) return std::nullopt;
        {
            std::istringstream hs(line);
            std::string w1, w3, w5;
            hs >> w1 >> orders >> w3 >> nodes >> w5 >> prec;
            if (w1 != "orders" || w3 != "nodes" || w5 != "prec" || orders < 1 || prec < 53)
                return std::nullopt;
        }
        BesselTable t;
        t.max_order_ = orders - 1;
        t.prec_bits_ = prec;
        t.rows_.assign(static_cast<size_t>(orders), {});
        Precision p(prec);
        for (auto& row : t.rows_) {
            row.reserve(nodes);
            for (size_t i = 0; i < nodes; ++i) {
                if (!std::getline(is, line)) return std::nullopt;
                row.push_back(Ball::parse(line, p));
            }
        }
        return t;
    }

  private:
    long max_order_ = 0;
    long prec_bits_ = 53;
    std::vector<std::vector<Ball>> rows_;

    void set(long order, size_t i, Ball v) { rows_[static_cast<size_t>(order)][i] = std::move(v); }

    void build_column(const Ball& x, size_t i, Precision p) {
        if (!detail::lower_nonneg(x)) throw DomainViolation("BesselTable: node below 0");
        double xl = x.lower_d();
        long K = max_order_;
        if (xl >= detail::asym_threshold(K)) {
            bool all_ok = true;
            std::vector<Ball> col(static_cast<size_t>(K + 1));
            for (long o = K; o >= 0; --o) {
                bool ok = false;
                col[static_cast<size_t>(o)] = detail::bessel_asym(o, x, p, &ok);
                if (!ok) {
                    all_ok = false;
                    break;
                }
            }
            if (all_ok) {
                for (long o = 0; o <= K; ++o) set(o, i, std::move(col[static_cast<size_t>(o)]));
                return;
            }
        }
        if (xl >= 30.0 && xl > 2.0 * static_cast<double>(K + 2)) {
            Precision pw(p.bits + 32);
            Ball xw = Ball::round_to(x, pw);
            Ball above = detail::bessel_series(K + 1, xw, pw);  // J_{K+1}
            Ball cur = detail::bessel_series(K, xw, pw);        // J_K
            set(K, i, Ball::round_to(cur, p));
            for (long m = K; m >= 1; --m) {
                Ball below = Ball::sub(Ball::div(Ball::mul_si(cur, 2 * m, pw), xw, pw), above, pw);
                below = detail::unit_interval_clamp(below, pw);
                set(m - 1, i, Ball::round_to(below, p));
                above = cur;
                cur = below;
            }
            return;
        }
        for (long o = 0; o <= K; ++o) set(o, i, detail::bessel_series(o, x, p));
    }
};

inline BesselTable bessel_table(long max_order, const std::vector<Ball>& nodes, Precision p) {
    return BesselTable(max_order, nodes, p);
}

}  // namespace bandcert
