#pragma once

// Gauss-Legendre rules with certified node/weight enclosures, composite
// panel quadrature, and the closed-form bounds on the analytic quadrature
// error over [0,S] and [S,T].

#include <algorithm>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "bandcert/ball.hpp"
#include "bandcert/errors.hpp"
#include "bandcert/rational.hpp"

namespace bandcert {

struct GaussRule {
    long n = 0;
    std::vector<Ball> nodes;    // strictly increasing in (-1, 1)
    std::vector<Ball> weights;  // positive, summing to 2
    long prec_bits = 0;
};

struct PanelLayout {
    Rational a;
    Rational b;
    Rational d;       // panel half-width
    std::int64_t K;   // panel count; 2dK = b - a exactly

    PanelLayout(Rational a_, Rational b_, Rational d_) : a(a_), b(b_), d(d_) {
        if (!(d > Rational(0, 1))) throw ValidityViolation("PanelLayout: d must be positive");
        Rational span = b - a;
        Rational count = span / (d * 2);
        if (!count.is_integer() || count.num < 1)
            throw ValidityViolation("PanelLayout: (b-a)/(2d) = " + count.str() +
                                    " is not a positive integer");
        K = count.num;
    }

    std::int64_t evaluations(const GaussRule& rule) const { return K * rule.n; }
};

namespace detail {

// Monic Legendre polynomial and derivative by the three-term recurrence
// p_{k+1} = x p_k - k^2 / ((2k+1)(2k-1)) p_{k-1}.
inline void monic_legendre(long n, const Ball& x, Precision p, Ball* value, Ball* deriv) {
    Ball pk = Ball::from_long(1, p);
    Ball dk = Ball::zero(p);
    if (n == 0) {
        *value = pk;
        *deriv = dk;
        return;
    }
    Ball pk1 = x;                      // p_1
    Ball dk1 = Ball::from_long(1, p);  // p_1'
    for (long k = 1; k < n; ++k) {
        unsigned long den = static_cast<unsigned long>((2 * k + 1) * (2 * k - 1));
        Ball ck = Ball::from_ratio(k * k, static_cast<long>(den), p);
        Ball pnext = Ball::sub(Ball::mul(x, pk1, p), Ball::mul(ck, pk, p), p);
        Ball dnext = Ball::sub(Ball::add(pk1, Ball::mul(x, dk1, p), p), Ball::mul(ck, dk, p), p);
        pk = pk1;
        dk = dk1;
        pk1 = pnext;
        dk1 = dnext;
    }
    *value = pk1;
    *deriv = dk1;
}

inline int ball_sign(const Ball& v) {
    if (v.definitely_positive()) return 1;
    if (v.definitely_negative()) return -1;
    return 0;
}

// Standard Legendre P_{n-1}, P_n at a point, for the weight formula.
inline void legendre_pair(long n, const Ball& x, Precision p, Ball* pnm1, Ball* pn) {
    Ball prev = Ball::from_long(1, p);
    Ball cur = x;
    if (n == 1) {
        *pnm1 = prev;
        *pn = cur;
        return;
    }
    for (long k = 1; k < n; ++k) {
        Ball next = Ball::div_ui(
            Ball::sub(Ball::mul_si(Ball::mul(x, cur, p), 2 * k + 1, p),
                      Ball::mul_si(prev, k, p), p),
            static_cast<unsigned long>(k + 1), p);
        prev = cur;
        cur = next;
    }
    *pnm1 = prev;
    *pn = cur;
}

}  // namespace detail

// Certified Gauss-Legendre rule: roots of the monic Legendre polynomial are
// bracketed by sign changes on a uniform grid of 4n cells and refined by
// bisection plus interval Newton.
inline GaussRule legendre_rule(long n, Precision p) {
    if (n < 1 || n > 64) throw DomainViolation("legendre_rule: n out of [1, 64]");
    Precision pw(p.bits + 64);

    GaussRule rule;
    rule.n = n;
    rule.prec_bits = p.bits;

    if (n == 1) {
        rule.nodes.push_back(Ball::zero(p));
        rule.weights.push_back(Ball::from_long(2, p));
        return rule;
    }

    auto eval = [&](const Ball& x) {
        Ball v(pw), d(pw);
        detail::monic_legendre(n, x, pw, &v, &d);
        return std::pair<Ball, Ball>(v, d);
    };

    // Grid values at -1 + i/(2n), i = 0..4n.  A grid point can be an exact
    // root (x = 0 for odd n); it then contributes a zero-width enclosure.
    long cells = 4 * n;
    std::vector<int> sign(cells + 1);
    std::vector<Ball> grid(cells + 1);
    std::vector<long> exact_roots;
    for (long i = 0; i <= cells; ++i) {
        grid[i] = Ball::from_ratio(-2 * n + i, 2 * n, pw);
        Ball v = eval(grid[i]).first;
        if (v.is_exact() && v.contains_zero()) {
            sign[i] = 0;
            exact_roots.push_back(i);
            continue;
        }
        sign[i] = detail::ball_sign(v);
        if (sign[i] == 0)
            throw RootIsolationFailure("legendre_rule: indefinite sign at grid point");
    }
    std::vector<std::pair<long, long>> brackets;
    for (long i = 0; i < cells; ++i)
        if (sign[i] * sign[i + 1] < 0) brackets.emplace_back(i, i + 1);
    if (static_cast<long>(brackets.size() + exact_roots.size()) != n)
        throw RootIsolationFailure("legendre_rule: found " + std::to_string(brackets.size()) +
                                   " brackets and " + std::to_string(exact_roots.size()) +
                                   " grid roots for degree " + std::to_string(n));

    std::vector<std::pair<long, Ball>> located;
    for (long i : exact_roots) located.emplace_back(2 * i, Ball::round_to(grid[i], p));

    mpfr_t lo, hi, mid, w;
    mpfr_init2(lo, pw.bits);
    mpfr_init2(hi, pw.bits);
    mpfr_init2(mid, pw.bits);
    mpfr_init2(w, pw.bits);

    for (auto [il, ir] : brackets) {
        grid[il].lower(lo);  // grid points are exact at pw bits
        grid[ir].lower(hi);
        int sign_lo = sign[il];

        // Bisection to width ~2^-24.
        for (int iter = 0; iter < 26; ++iter) {
            mpfr_add(mid, lo, hi, MPFR_RNDN);
            mpfr_div_2ui(mid, mid, 1, MPFR_RNDN);
            int s = detail::ball_sign(eval(Ball::from_mpfr(mid, pw)).first);
            if (s == 0) break;  // midpoint is essentially on the root: Newton takes over
            if (s == sign_lo) mpfr_set(lo, mid, MPFR_RNDN);
            else mpfr_set(hi, mid, MPFR_RNDN);
        }

        // Interval Newton with intersection; quadratic once engaged.
        mpfr_add(mid, lo, hi, MPFR_RNDN);
        mpfr_div_2ui(mid, mid, 1, MPFR_RNDN);
        mpfr_sub(w, hi, lo, MPFR_RNDU);
        mpfr_div_2ui(w, w, 1, MPFR_RNDU);
        Ball X = Ball::widen(Ball::from_mpfr(mid, pw), Ball::from_mpfr(w, pw));
        double target = std::ldexp(1.0, static_cast<int>(-(p.bits + 8)));
        for (int iter = 0; iter < 64 && X.rad_d() > target; ++iter) {
            Ball m = Ball::from_mpfr(X.mid_ptr(), pw);
            Ball pv = eval(m).first;
            Ball dX = eval(X).second;
            if (dX.contains_zero())
                throw RootIsolationFailure("legendre_rule: derivative not sign-definite");
            Ball nxt = Ball::sub(m, Ball::div(pv, dX, pw), pw);
            auto isect = Ball::intersect(nxt, X, pw);
            if (!isect) throw RootIsolationFailure("legendre_rule: empty Newton intersection");
            if (isect->rad_d() >= X.rad_d() && iter > 8) break;
            X = *isect;
        }
        located.emplace_back(il + ir, Ball::round_to(X, p));
    }
    mpfr_clear(lo);
    mpfr_clear(hi);
    mpfr_clear(mid);
    mpfr_clear(w);

    std::sort(located.begin(), located.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [pos, node] : located) rule.nodes.push_back(std::move(node));

    // w_i = 2 (1 - x^2) / (n (P_{n-1}(x) - x P_n(x)))^2
    for (const Ball& x : rule.nodes) {
        Ball pnm1(pw), pn(pw);
        detail::legendre_pair(n, Ball::round_to(x, pw), pw, &pnm1, &pn);
        Ball q = Ball::mul_si(Ball::sub(pnm1, Ball::mul(Ball::round_to(x, pw), pn, pw), pw), n, pw);
        Ball one_minus_x2 =
            Ball::sub(Ball::from_long(1, pw), Ball::mul(Ball::round_to(x, pw), Ball::round_to(x, pw), pw), pw);
        Ball wgt = Ball::div(Ball::mul_2si(one_minus_x2, 1, pw), Ball::mul(q, q, pw), pw);
        rule.weights.push_back(Ball::round_to(wgt, p));
    }
    return rule;
}

// Composite quadrature: the enclosure covers arithmetic and evaluation error
// only; the analytic quadrature error is added separately via bound_0S /
// bound_ST.
template <typename F>
Ball panel_sum(F&& f, const PanelLayout& layout, const GaussRule& rule, Precision p) {
    Ball total = Ball::zero(p);
    Ball d = layout.d.to_ball(p);
    for (std::int64_t j = 0; j < layout.K; ++j) {
        Rational center = layout.a + layout.d * (2 * j + 1);
        Ball c = center.to_ball(p);
        Ball acc = Ball::zero(p);
        for (long i = 0; i < rule.n; ++i) {
            Ball x = Ball::add(c, Ball::mul(d, rule.nodes[i], p), p);
            acc = Ball::add(acc, Ball::mul(rule.weights[i], f(x), p), p);
        }
        total = Ball::add(total, Ball::mul(d, acc, p), p);
    }
    return total;
}

// pi 2^{-2n-1} d^{2n} e^6 (S + 2d + 1)^2, an upper bound on the quadrature
// error over [0, S], uniform in the Bessel orders.
inline Ball bound_0S(const Rational& S, const Rational& d, long n, Precision p = Precision(128)) {
    if (!(S > Rational(0, 1)) || !(d > Rational(0, 1)) || n < 1)
        throw ValidityViolation("bound_0S: need S > 0, d > 0, n >= 1");
    Ball db = d.to_ball(p);
    Ball v = Ball::mul_2si(Ball::pi(p), -2 * n - 1, p);
    v = Ball::mul(v, Ball::pow_int(db, 2 * n, p), p);
    v = Ball::mul(v, Ball::pow_int(Ball::exp_(Ball::from_long(1, p), p), 6, p), p);
    Ball s1 = (S + d * 2 + Rational(1, 1)).to_ball(p);
    v = Ball::mul(v, Ball::mul(s1, s1, p), p);
    return v;
}

namespace detail {
// The displayed formula without validity gates (explore-mode estimates).
inline Ball bound_ST_formula(const Rational& S, const Rational& d, long n, Precision p) {
    Rational denom = S - Rational(1, 1) - d * 2;
    if (!(denom > Rational(0, 1))) throw ValidityViolation("bound_ST: S - 1 - 2d must be positive");
    Ball v = Ball::mul_2si(Ball::pi(p), -2 * n - 1, p);
    v = Ball::mul(v, Ball::pow_int(d.to_ball(p), 2 * n, p), p);
    v = Ball::mul(v, Ball::pow_int(Ball::from_ratio(336, 100, p), 6, p), p);
    return Ball::div(v, denom.to_ball(p), p);
}
}  // namespace detail

// pi 2^{-2n-1} d^{2n} (3.36)^6 (S - 1 - 2d)^{-1}, an upper bound on the
// quadrature error over [S, T] for band limit N.  Valid once S clears the
// oscillatory-regime threshold 0.95 N^{3/2} ln N + 1 with N >= 20.
inline Ball bound_ST(const Rational& S, const Rational& T, const Rational& d, long n, long N,
                     Precision p = Precision(128)) {
    if (N < 20) throw ValidityViolation("bound_ST: requires N >= 20");
    if (!(T > S)) throw ValidityViolation("bound_ST: requires T > S");
    // Check S >= 0.95 N^{3/2} ln N + 1 against an upper bound of the rhs.
    Ball nb = Ball::from_long(N, p);
    Ball rhs = Ball::mul(Ball::from_ratio(95, 100, p),
                         Ball::mul(Ball::sqrt(Ball::pow_int(nb, 3, p), p), Ball::log_(nb, p), p), p);
    rhs = Ball::add(rhs, Ball::from_long(1, p), p);
    if (!(S.to_ball(p).lower_d() >= rhs.upper_d()))
        throw ValidityViolation("bound_ST: S = " + S.str() + " below 0.95 N^{3/2} ln N + 1");
    return detail::bound_ST_formula(S, d, n, p);
}

// Rule sanity: all GaussRule invariants, including exactness on monomials up
// to degree 2n-1.
inline void validate_rule(const GaussRule& rule, Precision p) {
    long n = rule.n;
    for (long i = 0; i + 1 < n; ++i)
        if (!(rule.nodes[i].upper_d() < rule.nodes[i + 1].lower_d()))
            throw RootIsolationFailure("validate_rule: nodes not strictly increasing");
    for (long i = 0; i < n; ++i) {
        if (!rule.nodes[i].overlaps(Ball::neg(rule.nodes[n - 1 - i])))
            throw RootIsolationFailure("validate_rule: nodes not symmetric");
        if (!rule.weights[i].definitely_positive())
            throw RootIsolationFailure("validate_rule: weight not positive");
    }
    Ball wsum = Ball::zero(p);
    for (const Ball& w : rule.weights) wsum = Ball::add(wsum, w, p);
    if (!wsum.contains(Ball::from_long(2, p).mid_ptr()))
        throw RootIsolationFailure("validate_rule: weights do not sum to 2");
    for (long k = 0; k <= 2 * n - 1; ++k) {
        Ball m = Ball::zero(p);
        for (long i = 0; i < n; ++i)
            m = Ball::add(m, Ball::mul(rule.weights[i], Ball::pow_int(rule.nodes[i], k, p), p), p);
        Ball exact = (k % 2 == 1) ? Ball::zero(p) : Ball::from_ratio(2, k + 1, p);
        if (!m.overlaps(exact))
            throw RootIsolationFailure("validate_rule: moment " + std::to_string(k) + " missed");
    }
}

}  // namespace bandcert
