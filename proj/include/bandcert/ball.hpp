#pragma once

// Midpoint-radius enclosure arithmetic on top of MPFR.
//
// Every value is a Ball [mid - rad, mid + rad].  Operations round the
// midpoint to the requested precision and push all rounding and
// propagation error into the radius, so the exact image of the operand
// intervals is always contained in the result interval.  Radii are kept
// at a small fixed precision and are always rounded upward.

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <optional>
#include <string>
#include <utility>

#include "bandcert/errors.hpp"

namespace bandcert {

struct Precision {
    long bits;
    explicit Precision(long b) : bits(b) {
        if (b < 53) throw DomainViolation("Precision below 53 bits: " + std::to_string(b));
    }
};

namespace detail {
inline constexpr mpfr_prec_t kRadiusPrec = 32;
}

class Ball {
  public:
    Ball() { init(53); }
    explicit Ball(Precision p) { init(p.bits); }

    Ball(const Ball& o) {
        mpfr_init2(mid_, mpfr_get_prec(o.mid_));
        mpfr_init2(rad_, detail::kRadiusPrec);
        mpfr_set(mid_, o.mid_, MPFR_RNDN);
        mpfr_set(rad_, o.rad_, MPFR_RNDU);
    }
    Ball(Ball&& o) noexcept {
        mpfr_init2(mid_, MPFR_PREC_MIN);
        mpfr_init2(rad_, MPFR_PREC_MIN);
        mpfr_swap(mid_, o.mid_);
        mpfr_swap(rad_, o.rad_);
    }
    Ball& operator=(const Ball& o) {
        if (this != &o) {
            mpfr_set_prec(mid_, mpfr_get_prec(o.mid_));
            mpfr_set(mid_, o.mid_, MPFR_RNDN);
            mpfr_set(rad_, o.rad_, MPFR_RNDU);
        }
        return *this;
    }
    Ball& operator=(Ball&& o) noexcept {
        mpfr_swap(mid_, o.mid_);
        mpfr_swap(rad_, o.rad_);
        return *this;
    }
    ~Ball() {
        mpfr_clear(mid_);
        mpfr_clear(rad_);
    }

    static Ball zero(Precision p) { return Ball(p); }

    static Ball from_long(long v, Precision p) {
        Ball r(p);
        int t = mpfr_set_si(r.mid_, v, MPFR_RNDN);
        r.bump_round_err(t);
        return r;
    }

    static Ball from_double(double v, Precision p) {
        if (!std::isfinite(v)) throw DomainViolation("from_double: non-finite input");
        Ball r(p);
        int t = mpfr_set_d(r.mid_, v, MPFR_RNDN);
        r.bump_round_err(t);
        return r;
    }

    static Ball from_ratio(long num, long den, Precision p) {
        if (den == 0) throw DivisionByEnclosedZero("from_ratio: zero denominator");
        Ball r(p);
        int t = mpfr_set_si(r.mid_, num, MPFR_RNDN);
        r.bump_round_err(t);
        t = mpfr_div_si(r.mid_, r.mid_, den, MPFR_RNDN);
        r.bump_round_err(t);
        return r;
    }

    static Ball pi(Precision p) {
        Ball r(p);
        int t = mpfr_const_pi(r.mid_, MPFR_RNDN);
        r.bump_round_err(t);
        return r;
    }

    // Point ball at an MPFR value (radius covers re-rounding only).
    static Ball from_mpfr(mpfr_srcptr v, Precision p) {
        Ball r(p);
        int t = mpfr_set(r.mid_, v, MPFR_RNDN);
        r.bump_round_err(t);
        return r;
    }

    long prec() const { return mpfr_get_prec(mid_); }
    bool is_finite() const { return mpfr_number_p(mid_) && mpfr_number_p(rad_); }
    bool is_exact() const { return mpfr_zero_p(rad_); }
    mpfr_srcptr mid_ptr() const { return mid_; }
    mpfr_srcptr rad_ptr() const { return rad_; }

    double mid_d() const { return mpfr_get_d(mid_, MPFR_RNDN); }
    double rad_d() const { return mpfr_get_d(rad_, MPFR_RNDU); }
    double lower_d() const {
        mpfr_t t;
        mpfr_init2(t, 53);
        mpfr_sub(t, mid_, rad_, MPFR_RNDD);
        double v = mpfr_get_d(t, MPFR_RNDD);
        mpfr_clear(t);
        return v;
    }
    double upper_d() const {
        mpfr_t t;
        mpfr_init2(t, 53);
        mpfr_add(t, mid_, rad_, MPFR_RNDU);
        double v = mpfr_get_d(t, MPFR_RNDU);
        mpfr_clear(t);
        return v;
    }

    bool contains_zero() const { return mpfr_cmpabs(mid_, rad_) <= 0; }
    bool definitely_positive() const { return mpfr_sgn(mid_) > 0 && mpfr_cmpabs(mid_, rad_) > 0; }
    bool definitely_negative() const { return mpfr_sgn(mid_) < 0 && mpfr_cmpabs(mid_, rad_) > 0; }

    // Containment of a point given exactly as an MPFR value.
    bool contains(mpfr_srcptr v) const {
        mpfr_t d;
        mpfr_init2(d, std::max(mpfr_get_prec(v), mpfr_get_prec(mid_)) + 8);
        mpfr_sub(d, v, mid_, MPFR_RNDA);
        bool in = mpfr_cmpabs(d, rad_) <= 0;
        mpfr_clear(d);
        return in;
    }
    bool contains(double v) const {
        mpfr_t t;
        mpfr_init2(t, 53);
        mpfr_set_d(t, v, MPFR_RNDN);
        bool in = contains(t);
        mpfr_clear(t);
        return in;
    }
    // Interval containment: [o] subset of [this].
    bool contains(const Ball& o) const {
        mpfr_t d, slack;
        mpfr_init2(d, std::max(prec(), o.prec()) + 8);
        mpfr_init2(slack, detail::kRadiusPrec);
        mpfr_sub(d, o.mid_, mid_, MPFR_RNDA);
        mpfr_abs(d, d, MPFR_RNDU);
        mpfr_add(d, d, o.rad_, MPFR_RNDU);
        bool in = mpfr_cmp(d, rad_) <= 0;
        mpfr_clear(d);
        mpfr_clear(slack);
        return in;
    }
    bool same_bits(const Ball& o) const {
        return mpfr_get_prec(mid_) == mpfr_get_prec(o.mid_) && mpfr_equal_p(mid_, o.mid_) &&
               mpfr_equal_p(rad_, o.rad_) && mpfr_signbit(mid_) == mpfr_signbit(o.mid_);
    }

    bool overlaps(const Ball& o) const {
        mpfr_t d, s;
        mpfr_init2(d, std::max(prec(), o.prec()) + 8);
        mpfr_init2(s, detail::kRadiusPrec + 8);
        mpfr_sub(d, mid_, o.mid_, MPFR_RNDZ);  // toward zero: lower bound on |mid gap|
        mpfr_abs(d, d, MPFR_RNDZ);
        mpfr_add(s, rad_, o.rad_, MPFR_RNDU);
        bool ov = mpfr_cmp(d, s) <= 0;
        mpfr_clear(d);
        mpfr_clear(s);
        return ov;
    }

    static Ball neg(const Ball& a) {
        Ball r(a);
        mpfr_neg(r.mid_, r.mid_, MPFR_RNDN);  // exact
        return r;
    }

    static Ball add(const Ball& a, const Ball& b, Precision p) {
        Ball r(p);
        int t = mpfr_add(r.mid_, a.mid_, b.mid_, MPFR_RNDN);
        mpfr_add(r.rad_, a.rad_, b.rad_, MPFR_RNDU);
        r.bump_round_err(t);
        r.check_finite("add");
        return r;
    }

    static Ball sub(const Ball& a, const Ball& b, Precision p) {
        Ball r(p);
        int t = mpfr_sub(r.mid_, a.mid_, b.mid_, MPFR_RNDN);
        mpfr_add(r.rad_, a.rad_, b.rad_, MPFR_RNDU);
        r.bump_round_err(t);
        r.check_finite("sub");
        return r;
    }

    static Ball mul(const Ball& a, const Ball& b, Precision p) {
        Ball r(p);
        int t = mpfr_mul(r.mid_, a.mid_, b.mid_, MPFR_RNDN);
        // rad = |a.mid| rb + |b.mid| ra + ra rb
        mpfr_t u, v;
        mpfr_init2(u, detail::kRadiusPrec);
        mpfr_init2(v, detail::kRadiusPrec);
        mpfr_abs_up(u, a.mid_);
        mpfr_mul(u, u, b.rad_, MPFR_RNDU);
        mpfr_abs_up(v, b.mid_);
        mpfr_mul(v, v, a.rad_, MPFR_RNDU);
        mpfr_add(u, u, v, MPFR_RNDU);
        mpfr_mul(v, a.rad_, b.rad_, MPFR_RNDU);
        mpfr_add(r.rad_, u, v, MPFR_RNDU);
        mpfr_clear(u);
        mpfr_clear(v);
        r.bump_round_err(t);
        r.check_finite("mul");
        return r;
    }

    static Ball mul_si(const Ball& a, long s, Precision p) {
        Ball r(p);
        int t = mpfr_mul_si(r.mid_, a.mid_, s, MPFR_RNDN);
        mpfr_t u;
        mpfr_init2(u, detail::kRadiusPrec);
        mpfr_set_si(u, s, MPFR_RNDU);
        mpfr_abs(u, u, MPFR_RNDU);
        mpfr_mul(r.rad_, a.rad_, u, MPFR_RNDU);
        mpfr_clear(u);
        r.bump_round_err(t);
        r.check_finite("mul_si");
        return r;
    }

    static Ball div(const Ball& a, const Ball& b, Precision p) {
        if (b.contains_zero()) throw DivisionByEnclosedZero("div: divisor interval contains 0");
        Ball r(p);
        int t = mpfr_div(r.mid_, a.mid_, b.mid_, MPFR_RNDN);
        // |x/y - ma/mb| <= (ra|mb| + rb|ma|) / (|mb| (|mb| - rb))
        mpfr_t num, den, bm;
        mpfr_init2(num, detail::kRadiusPrec);
        mpfr_init2(den, detail::kRadiusPrec);
        mpfr_init2(bm, detail::kRadiusPrec);
        mpfr_abs_up(bm, b.mid_);
        mpfr_mul(num, a.rad_, bm, MPFR_RNDU);
        mpfr_abs_up(den, a.mid_);
        mpfr_mul(den, den, b.rad_, MPFR_RNDU);
        mpfr_add(num, num, den, MPFR_RNDU);
        mpfr_abs_down(bm, b.mid_);
        mpfr_sub(den, bm, b.rad_, MPFR_RNDD);
        mpfr_mul(den, den, bm, MPFR_RNDD);
        mpfr_div(num, num, den, MPFR_RNDU);
        mpfr_add(r.rad_, r.rad_, num, MPFR_RNDU);
        mpfr_clear(num);
        mpfr_clear(den);
        mpfr_clear(bm);
        r.bump_round_err(t);
        r.check_finite("div");
        return r;
    }

    static Ball div_ui(const Ball& a, unsigned long s, Precision p) {
        if (s == 0) throw DivisionByEnclosedZero("div_ui: divisor 0");
        Ball r(p);
        int t = mpfr_div_ui(r.mid_, a.mid_, s, MPFR_RNDN);
        mpfr_div_ui(r.rad_, a.rad_, s, MPFR_RNDU);
        r.bump_round_err(t);
        r.check_finite("div_ui");
        return r;
    }

    // Exact scaling by 2^e.
    static Ball mul_2si(const Ball& a, long e, Precision p) {
        Ball r(p);
        int t = mpfr_mul_2si(r.mid_, a.mid_, e, MPFR_RNDN);
        mpfr_mul_2si(r.rad_, a.rad_, e, MPFR_RNDU);
        r.bump_round_err(t);
        r.check_finite("mul_2si");
        return r;
    }

    static Ball sqrt(const Ball& a, Precision p) {
        mpfr_t lo, hi;
        a.endpoints(lo, hi, p.bits + 8);
        if (mpfr_sgn(lo) < 0) {
            mpfr_clear(lo);
            mpfr_clear(hi);
            throw DomainViolation("sqrt: interval extends below 0");
        }
        mpfr_sqrt(lo, lo, MPFR_RNDD);
        mpfr_sqrt(hi, hi, MPFR_RNDU);
        Ball r = from_endpoints(lo, hi, p);
        mpfr_clear(lo);
        mpfr_clear(hi);
        return r;
    }

    static Ball exp_(const Ball& a, Precision p) {
        mpfr_t lo, hi;
        a.endpoints(lo, hi, p.bits + 8);
        mpfr_exp(lo, lo, MPFR_RNDD);
        mpfr_exp(hi, hi, MPFR_RNDU);
        Ball r = from_endpoints(lo, hi, p);
        mpfr_clear(lo);
        mpfr_clear(hi);
        r.check_finite("exp");
        return r;
    }

    static Ball log_(const Ball& a, Precision p) {
        mpfr_t lo, hi;
        a.endpoints(lo, hi, p.bits + 8);
        if (mpfr_sgn(lo) <= 0) {
            mpfr_clear(lo);
            mpfr_clear(hi);
            throw DomainViolation("log: interval not strictly positive");
        }
        mpfr_log(lo, lo, MPFR_RNDD);
        mpfr_log(hi, hi, MPFR_RNDU);
        Ball r = from_endpoints(lo, hi, p);
        mpfr_clear(lo);
        mpfr_clear(hi);
        return r;
    }

    // sin/cos: evaluate at the midpoint, widen by the radius (Lipschitz
    // constant 1), clamp into [-1, 1].
    static Ball sin_(const Ball& a, Precision p) { return trig(a, p, /*cosine=*/false); }
    static Ball cos_(const Ball& a, Precision p) { return trig(a, p, /*cosine=*/true); }

    static Ball pow_int(const Ball& a, long e, Precision p) {
        if (e == 0) return from_long(1, p);
        if (e < 0) {
            Ball q = pow_int(a, -e, p);
            return div(from_long(1, p), q, p);
        }
        mpfr_t lo, hi, plo, phi;
        a.endpoints(lo, hi, p.bits + 8);
        mpfr_init2(plo, p.bits + 8);
        mpfr_init2(phi, p.bits + 8);
        if (e % 2 == 1) {
            mpfr_pow_si(plo, lo, e, MPFR_RNDD);
            mpfr_pow_si(phi, hi, e, MPFR_RNDU);
        } else if (mpfr_sgn(lo) >= 0) {
            mpfr_pow_si(plo, lo, e, MPFR_RNDD);
            mpfr_pow_si(phi, hi, e, MPFR_RNDU);
        } else if (mpfr_sgn(hi) <= 0) {
            mpfr_pow_si(plo, hi, e, MPFR_RNDD);
            mpfr_pow_si(phi, lo, e, MPFR_RNDU);
        } else {
            // interval straddles 0, even power: [0, max(|lo|, |hi|)^e]
            mpfr_set_ui(plo, 0, MPFR_RNDN);
            if (mpfr_cmpabs(lo, hi) > 0) mpfr_set(phi, lo, MPFR_RNDA);
            else mpfr_set(phi, hi, MPFR_RNDA);
            mpfr_abs(phi, phi, MPFR_RNDU);
            mpfr_pow_si(phi, phi, e, MPFR_RNDU);
        }
        Ball r = from_endpoints(plo, phi, p);
        mpfr_clear(lo);
        mpfr_clear(hi);
        mpfr_clear(plo);
        mpfr_clear(phi);
        r.check_finite("pow_int");
        return r;
    }

    static Ball gamma_(const Ball& a, Precision p) {
        mpfr_t lo, hi;
        a.endpoints(lo, hi, p.bits + 8);
        if (mpfr_sgn(lo) > 0) {
            Ball r = gamma_positive(lo, hi, p);
            mpfr_clear(lo);
            mpfr_clear(hi);
            return r;
        }
        // Negative arguments via reflection Gamma(x) = pi / (sin(pi x) Gamma(1-x)),
        // provided the interval excludes integers.
        if (mpfr_sgn(hi) >= 0) {
            mpfr_clear(lo);
            mpfr_clear(hi);
            throw DomainViolation("gamma: interval contains a nonpositive integer");
        }
        long fl = lfloor(lo), fh = lfloor(hi);
        bool hits_integer = (fl != fh) || mpfr_integer_p(lo) || mpfr_integer_p(hi);
        mpfr_clear(lo);
        mpfr_clear(hi);
        if (hits_integer) throw DomainViolation("gamma: interval contains a nonpositive integer");
        Precision pw(p.bits + 16);
        Ball px = mul(pi(pw), a, pw);
        Ball s = sin_(px, pw);
        Ball one_minus = sub(from_long(1, pw), a, pw);
        Ball g = gamma_(one_minus, pw);
        Ball den = mul(s, g, pw);
        if (den.contains_zero()) throw DomainViolation("gamma: reflection denominator encloses 0");
        return round_to(div(pi(pw), den, pw), p);
    }

    // Smallest ball containing both intervals.
    static Ball hull(const Ball& a, const Ball& b, Precision p) {
        mpfr_t alo, ahi, blo, bhi;
        a.endpoints(alo, ahi, p.bits + 8);
        b.endpoints(blo, bhi, p.bits + 8);
        if (mpfr_cmp(blo, alo) < 0) mpfr_set(alo, blo, MPFR_RNDD);
        if (mpfr_cmp(bhi, ahi) > 0) mpfr_set(ahi, bhi, MPFR_RNDU);
        Ball r = from_endpoints(alo, ahi, p);
        mpfr_clear(alo);
        mpfr_clear(ahi);
        mpfr_clear(blo);
        mpfr_clear(bhi);
        return r;
    }

    static std::optional<Ball> intersect(const Ball& a, const Ball& b, Precision p) {
        mpfr_t alo, ahi, blo, bhi;
        a.endpoints(alo, ahi, p.bits + 8);
        b.endpoints(blo, bhi, p.bits + 8);
        if (mpfr_cmp(blo, alo) > 0) mpfr_set(alo, blo, MPFR_RNDD);
        if (mpfr_cmp(bhi, ahi) < 0) mpfr_set(ahi, bhi, MPFR_RNDU);
        std::optional<Ball> r;
        if (mpfr_cmp(alo, ahi) <= 0) r = from_endpoints(alo, ahi, p);
        mpfr_clear(alo);
        mpfr_clear(ahi);
        mpfr_clear(blo);
        mpfr_clear(bhi);
        return r;
    }

    // Enclosure of |x| over the interval.
    static Ball abs_enclosure(const Ball& a, Precision p) {
        mpfr_t lo, hi;
        a.endpoints(lo, hi, p.bits + 8);
        if (mpfr_sgn(lo) >= 0) {
            Ball r = from_endpoints(lo, hi, p);
            mpfr_clear(lo);
            mpfr_clear(hi);
            return r;
        }
        if (mpfr_sgn(hi) <= 0) {
            mpfr_t nlo, nhi;
            mpfr_init2(nlo, p.bits + 8);
            mpfr_init2(nhi, p.bits + 8);
            mpfr_neg(nlo, hi, MPFR_RNDD);
            mpfr_neg(nhi, lo, MPFR_RNDU);
            Ball r = from_endpoints(nlo, nhi, p);
            mpfr_clear(lo);
            mpfr_clear(hi);
            mpfr_clear(nlo);
            mpfr_clear(nhi);
            return r;
        }
        mpfr_abs(lo, lo, MPFR_RNDU);
        if (mpfr_cmp(lo, hi) > 0) mpfr_set(hi, lo, MPFR_RNDU);
        mpfr_set_ui(lo, 0, MPFR_RNDN);
        Ball r = from_endpoints(lo, hi, p);
        mpfr_clear(lo);
        mpfr_clear(hi);
        return r;
    }

    // Upper bound of |x| over the interval, as a coarse upward-rounded value.
    double abs_upper_d() const {
        mpfr_t t;
        mpfr_init2(t, detail::kRadiusPrec);
        mpfr_abs_up_static(t, mid_);
        mpfr_add(t, t, rad_, MPFR_RNDU);
        double v = mpfr_get_d(t, MPFR_RNDU);
        mpfr_clear(t);
        return v;
    }

    static Ball round_to(const Ball& a, Precision p) {
        Ball r(p);
        int t = mpfr_set(r.mid_, a.mid_, MPFR_RNDN);
        mpfr_set(r.rad_, a.rad_, MPFR_RNDU);
        r.bump_round_err(t);
        return r;
    }

    // Add a nonnegative bound e to the radius.
    static Ball widen(const Ball& a, const Ball& e) {
        Ball r(a);
        mpfr_t u;
        mpfr_init2(u, detail::kRadiusPrec);
        mpfr_abs_up_static(u, e.mid_);
        mpfr_add(u, u, e.rad_, MPFR_RNDU);
        mpfr_add(r.rad_, r.rad_, u, MPFR_RNDU);
        mpfr_clear(u);
        return r;
    }

    // Decimal serialization "mid +/- rad".  Both components are written as
    // exact decimals (binary floating-point values always have one), so
    // parsing at the same precision reproduces the Ball bit for bit; at any
    // other precision the parsed Ball still contains the original interval.
    std::string str() const {
        return mpfr_to_exact_decimal(mid_) + " +/- " + mpfr_to_exact_decimal(rad_);
    }

    static Ball parse(const std::string& s, Precision p) {
        auto sep = s.find("+/-");
        if (sep == std::string::npos) throw Error("Ball::parse: missing '+/-' in \"" + s + "\"");
        Ball r(p);
        int t = parse_component(r.mid_, trim(s.substr(0, sep)));
        mpfr_t rv;
        mpfr_init2(rv, detail::kRadiusPrec);
        int tr = parse_component(rv, trim(s.substr(sep + 3)));
        if (mpfr_sgn(rv) < 0) {
            mpfr_clear(rv);
            throw Error("Ball::parse: negative radius");
        }
        mpfr_set(r.rad_, rv, MPFR_RNDU);
        mpfr_clear(rv);
        r.bump_round_err(t);
        if (tr != 0) {
            // Radius re-rounding may have gone down; restore rigor.
            if (!mpfr_zero_p(r.rad_)) {
                mpfr_t u;
                mpfr_init2(u, detail::kRadiusPrec);
                mpfr_set_ui_2exp(u, 1, mpfr_get_exp(r.rad_) - detail::kRadiusPrec, MPFR_RNDU);
                mpfr_add(r.rad_, r.rad_, u, MPFR_RNDU);
                mpfr_clear(u);
            }
        }
        return r;
    }

    // Lower/upper endpoint into caller-initialized targets (directed).
    void lower(mpfr_ptr out) const { mpfr_sub(out, mid_, rad_, MPFR_RNDD); }
    void upper(mpfr_ptr out) const { mpfr_add(out, mid_, rad_, MPFR_RNDU); }

    // Upper bound as a Ball with zero radius (for bound formulas).
    Ball upper_bound_ball(Precision p) const {
        Ball r(p);
        mpfr_add(r.mid_, mid_, rad_, MPFR_RNDU);
        return r;
    }

  private:
    mpfr_t mid_;
    mpfr_t rad_;

    void init(long bits) {
        mpfr_init2(mid_, bits);
        mpfr_init2(rad_, detail::kRadiusPrec);
        mpfr_set_zero(mid_, 1);
        mpfr_set_zero(rad_, 1);
    }

    // rad += half ulp of mid_ when the preceding midpoint op was inexact.
    void bump_round_err(int ternary) {
        if (ternary == 0) return;
        bump_ulp();
    }
    void bump_ulp() {
        if (mpfr_zero_p(mid_)) {
            if (!mpfr_number_p(mid_)) return;
            // Inexact zero cannot occur with the default exponent range.
            throw PrecisionExhausted("ball: inexact underflow to zero");
        }
        if (!mpfr_number_p(mid_)) return;
        mpfr_t u;
        mpfr_init2(u, detail::kRadiusPrec);
        mpfr_set_ui_2exp(u, 1, mpfr_get_exp(mid_) - mpfr_get_prec(mid_), MPFR_RNDU);
        mpfr_add(rad_, rad_, u, MPFR_RNDU);
        mpfr_clear(u);
    }

    void check_finite(const char* op) const {
        if (!is_finite())
            throw PrecisionExhausted(std::string("ball ") + op + ": non-finite result");
    }

    static void mpfr_abs_up_static(mpfr_ptr out, mpfr_srcptr v) {
        mpfr_abs(out, v, MPFR_RNDU);
    }
    static void mpfr_abs_up(mpfr_ptr out, mpfr_srcptr v) { mpfr_abs(out, v, MPFR_RNDU); }
    static void mpfr_abs_down(mpfr_ptr out, mpfr_srcptr v) { mpfr_abs(out, v, MPFR_RNDD); }

    void endpoints(mpfr_t lo, mpfr_t hi, long bits) const {
        mpfr_init2(lo, bits);
        mpfr_init2(hi, bits);
        mpfr_sub(lo, mid_, rad_, MPFR_RNDD);
        mpfr_add(hi, mid_, rad_, MPFR_RNDU);
    }

    static Ball from_endpoints(mpfr_srcptr lo, mpfr_srcptr hi, Precision p) {
        Ball r(p);
        int t = mpfr_add(r.mid_, lo, hi, MPFR_RNDN);
        t |= mpfr_div_2ui(r.mid_, r.mid_, 1, MPFR_RNDN);
        mpfr_t d;
        mpfr_init2(d, detail::kRadiusPrec);
        mpfr_sub(d, hi, r.mid_, MPFR_RNDU);
        mpfr_sub(r.rad_, r.mid_, lo, MPFR_RNDU);
        if (mpfr_cmp(d, r.rad_) > 0) mpfr_set(r.rad_, d, MPFR_RNDU);
        if (mpfr_sgn(r.rad_) < 0) mpfr_set_zero(r.rad_, 1);
        mpfr_clear(d);
        (void)t;
        r.check_finite("from_endpoints");
        return r;
    }

    static Ball trig(const Ball& a, Precision p, bool cosine) {
        if (!a.is_finite()) throw DomainViolation("trig: non-finite argument");
        Ball r(p);
        int t = cosine ? mpfr_cos(r.mid_, a.mid_, MPFR_RNDN) : mpfr_sin(r.mid_, a.mid_, MPFR_RNDN);
        mpfr_set(r.rad_, a.rad_, MPFR_RNDU);  // |sin'|, |cos'| <= 1
        r.bump_round_err(t);
        return clamp_unit(r, p);
    }

    // Intersect with [-1, 1]; valid whenever the represented quantity is
    // known to lie in [-1, 1].
    static Ball clamp_unit(const Ball& a, Precision p) {
        mpfr_t lo, hi;
        a.endpoints(lo, hi, p.bits + 8);
        bool lo_in = mpfr_cmp_si(lo, -1) >= 0;
        bool hi_in = mpfr_cmp_si(hi, 1) <= 0;
        if (lo_in && hi_in) {
            mpfr_clear(lo);
            mpfr_clear(hi);
            return a;
        }
        if (!lo_in) mpfr_set_si(lo, -1, MPFR_RNDD);
        if (!hi_in) mpfr_set_si(hi, 1, MPFR_RNDU);
        Ball r = from_endpoints(lo, hi, p);
        mpfr_clear(lo);
        mpfr_clear(hi);
        return r;
    }

    static Ball gamma_positive(mpfr_srcptr lo, mpfr_srcptr hi, Precision p) {
        // Gamma has a single positive minimum at x0 = 1.46163...; it is
        // decreasing left of x0 and increasing right of it.
        mpfr_t glo, ghi;
        mpfr_init2(glo, p.bits + 8);
        mpfr_init2(ghi, p.bits + 8);
        bool left = mpfr_cmp_d(hi, 1.4616321) <= 0;
        bool right = mpfr_cmp_d(lo, 1.4616322) >= 0;
        if (left) {
            mpfr_gamma(glo, hi, MPFR_RNDD);
            mpfr_gamma(ghi, lo, MPFR_RNDU);
        } else if (right) {
            mpfr_gamma(glo, lo, MPFR_RNDD);
            mpfr_gamma(ghi, hi, MPFR_RNDU);
        } else {
            // Straddles the minimum: certified lower bound for min Gamma,
            // upper bound from the endpoints.
            mpfr_set_d(glo, 0.8856031944, MPFR_RNDD);
            mpfr_t g2;
            mpfr_init2(g2, p.bits + 8);
            mpfr_gamma(ghi, lo, MPFR_RNDU);
            mpfr_gamma(g2, hi, MPFR_RNDU);
            if (mpfr_cmp(g2, ghi) > 0) mpfr_set(ghi, g2, MPFR_RNDU);
            mpfr_clear(g2);
        }
        Ball r = from_endpoints(glo, ghi, p);
        mpfr_clear(glo);
        mpfr_clear(ghi);
        return r;
    }

    static long lfloor(mpfr_srcptr v) {
        mpfr_t f;
        mpfr_init2(f, 64);
        mpfr_floor(f, v);
        long r = mpfr_get_si(f, MPFR_RNDN);
        mpfr_clear(f);
        return r;
    }

    static std::string trim(const std::string& s) {
        size_t b = s.find_first_not_of(" \t");
        size_t e = s.find_last_not_of(" \t");
        if (b == std::string::npos) return "";
        return s.substr(b, e - b + 1);
    }

    // Exact decimal expansion: v = M * 2^k needs about p*log10(2) digits
    // plus |k|*log10(5) fractional digits when k < 0.
    static std::string mpfr_to_exact_decimal(mpfr_srcptr v) {
        if (mpfr_zero_p(v)) return "0";
        if (!mpfr_number_p(v)) return mpfr_sgn(v) > 0 ? "inf" : "-inf";
        long p = mpfr_get_prec(v);
        long k = mpfr_get_exp(v) - p;
        long digits = static_cast<long>(0.30103 * static_cast<double>(p)) + 4;
        if (k >= 0) digits += static_cast<long>(0.30103 * static_cast<double>(k));
        else digits += static_cast<long>(0.69897 * static_cast<double>(-k));
        mpfr_exp_t e;
        char* s = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(digits), v, MPFR_RNDN);
        std::string all(s);
        mpfr_free_str(s);
        std::string sign;
        if (!all.empty() && all[0] == '-') {
            sign = "-";
            all = all.substr(1);
        }
        size_t last = all.find_last_not_of('0');
        if (last == std::string::npos) last = 0;
        all = all.substr(0, last + 1);
        return sign + "0." + all + "e" + std::to_string(static_cast<long>(e));
    }

    // Returns the parse ternary (0 when the decimal was represented exactly).
    static int parse_component(mpfr_ptr out, const std::string& s) {
        char* end = nullptr;
        int t = mpfr_strtofr(out, s.c_str(), &end, 10, MPFR_RNDN);
        if (end == s.c_str() || (end && *end != '\0'))
            throw Error("Ball::parse: bad number \"" + s + "\"");
        return t;
    }
};

// Spec-level dispatchers.
enum class BinOp { add, sub, mul, div };
enum class ElemFn { sqrt, exp, ln, sin, cos, pow_int, gamma };

inline Ball ball_binop(BinOp op, const Ball& a, const Ball& b, Precision p) {
    switch (op) {
        case BinOp::add: return Ball::add(a, b, p);
        case BinOp::sub: return Ball::sub(a, b, p);
        case BinOp::mul: return Ball::mul(a, b, p);
        case BinOp::div: return Ball::div(a, b, p);
    }
    throw Error("ball_binop: bad op");
}

inline Ball ball_elem(ElemFn fn, const Ball& a, Precision p, long pow_exp = 2) {
    switch (fn) {
        case ElemFn::sqrt: return Ball::sqrt(a, p);
        case ElemFn::exp: return Ball::exp_(a, p);
        case ElemFn::ln: return Ball::log_(a, p);
        case ElemFn::sin: return Ball::sin_(a, p);
        case ElemFn::cos: return Ball::cos_(a, p);
        case ElemFn::pow_int: return Ball::pow_int(a, pow_exp, p);
        case ElemFn::gamma: return Ball::gamma_(a, p);
    }
    throw Error("ball_elem: bad fn");
}

inline Ball ball_union(const Ball& a, const Ball& b) {
    return Ball::hull(a, b, Precision(std::max(a.prec(), b.prec())));
}

}  // namespace bandcert
