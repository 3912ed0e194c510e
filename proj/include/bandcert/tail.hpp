#pragma once

// Tail of the Bessel-product integral: the z^{-2}, z^{-3}, z^{-4} main
// terms of (pi/2)^3 prod_j J_{n_j}(z) z are expanded into finite cosine
// sums cos(f z + q pi/4) via product-to-sum identities, integrated on
// [T, inf) in closed form (zero frequency) or by a certified
// integration-by-parts series (nonzero frequency).  Phases stay exact
// multiples of pi/4 until final evaluation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "bandcert/ball.hpp"
#include "bandcert/errors.hpp"
#include "bandcert/rational.hpp"

namespace bandcert {

struct TrigTerm {
    int freq;            // coefficient of z in the phase; even, >= 0
    int phase_eighths;   // q with phase = q pi/4, reduced mod 8
    Ball coeff;

    Ball phase(Precision p) const {
        return Ball::mul_si(Ball::mul_2si(Ball::pi(p), -2, p), phase_eighths, p);
    }
};

using TrigPoly = std::vector<TrigTerm>;

struct TailCoefficients {
    TrigPoly A_terms;  // attached to z^{-2}
    TrigPoly B_terms;  // attached to z^{-3}
    TrigPoly C_terms;  // attached to z^{-4}
};

namespace detail {

inline int mod8(int q) {
    int r = q % 8;
    return r < 0 ? r + 8 : r;
}

// Accumulates c cos(f z + q pi/4) terms with canonical (f >= 0) keys.
class TrigBuilder {
  public:
    explicit TrigBuilder(Precision p) : p_(p) {}

    static TrigBuilder cos_factor(int q, Precision p) {
        TrigBuilder b(p);
        b.add_term(1, q, Ball::from_long(1, p));
        return b;
    }
    static TrigBuilder sin_factor(int q, Precision p) {
        // sin(theta) = cos(theta - pi/2)
        TrigBuilder b(p);
        b.add_term(1, q - 2, Ball::from_long(1, p));
        return b;
    }

    void add_term(int f, int q, const Ball& c) {
        if (f < 0) {
            f = -f;
            q = -q;
        }
        q = mod8(q);
        if (f == 0 && q > 4) q = 8 - q;  // cos(q pi/4) = cos((8-q) pi/4)
        auto key = std::make_pair(f, q);
        auto it = terms_.find(key);
        if (it == terms_.end()) terms_.emplace(key, c);
        else it->second = Ball::add(it->second, c, p_);
    }

    TrigBuilder operator*(const TrigBuilder& o) const {
        TrigBuilder out(p_);
        for (const auto& [ka, ca] : terms_) {
            for (const auto& [kb, cb] : o.terms_) {
                Ball half = Ball::mul_2si(Ball::mul(ca, cb, p_), -1, p_);
                out.add_term(ka.first + kb.first, ka.second + kb.second, half);
                out.add_term(ka.first - kb.first, ka.second - kb.second, half);
            }
        }
        return out;
    }

    TrigBuilder& operator+=(const TrigBuilder& o) {
        for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
        return *this;
    }

    TrigBuilder scaled(const Ball& s) const {
        TrigBuilder out(p_);
        for (const auto& [k, c] : terms_) out.add_term(k.first, k.second, Ball::mul(c, s, p_));
        return out;
    }

    TrigPoly poly() const {
        TrigPoly out;
        out.reserve(terms_.size());
        for (const auto& [k, c] : terms_) out.push_back(TrigTerm{k.first, k.second, c});
        return out;
    }

  private:
    Precision p_;
    std::map<std::pair<int, int>, Ball> terms_;
};

}  // namespace detail

// Per-factor weight (n^2 - 1/4)/2 of the sine term in the order-1
// coefficient of the expansion.
inline Rational tail_b_prefactor(long n) { return Rational(4 * n * n - 1, 8); }

// Expand A, B, C for six orders into merged cosine sums.
inline TailCoefficients expand_products(const std::array<long, 6>& k, Precision p = Precision(128)) {
    using detail::TrigBuilder;
    std::array<TrigBuilder, 6> cosf = {TrigBuilder(p), TrigBuilder(p), TrigBuilder(p),
                                       TrigBuilder(p), TrigBuilder(p), TrigBuilder(p)};
    std::array<TrigBuilder, 6> sinf = cosf;
    for (int j = 0; j < 6; ++j) {
        int q = detail::mod8(static_cast<int>(-1 - 2 * (k[static_cast<size_t>(j)] % 8)));
        cosf[static_cast<size_t>(j)] = TrigBuilder::cos_factor(q, p);
        sinf[static_cast<size_t>(j)] = TrigBuilder::sin_factor(q, p);
    }

    auto product_with = [&](int sin_at_1, int sin_at_2) {
        TrigBuilder acc = (0 == sin_at_1 || 0 == sin_at_2) ? sinf[0] : cosf[0];
        for (int j = 1; j < 6; ++j) {
            const TrigBuilder& f =
                (j == sin_at_1 || j == sin_at_2) ? sinf[static_cast<size_t>(j)] : cosf[static_cast<size_t>(j)];
            acc = acc * f;
        }
        return acc;
    };

    TailCoefficients out;

    TrigBuilder a = product_with(-1, -1);
    out.A_terms = a.poly();

    TrigBuilder b(p);
    for (int j = 0; j < 6; ++j) {
        Ball w = Ball::neg(tail_b_prefactor(k[static_cast<size_t>(j)]).to_ball(p));
        b += product_with(j, -1).scaled(w);
    }
    out.B_terms = b.poly();

    TrigBuilder c(p);
    for (int j1 = 0; j1 < 6; ++j1) {
        for (int j2 = j1 + 1; j2 < 6; ++j2) {
            long n1 = k[static_cast<size_t>(j1)], n2 = k[static_cast<size_t>(j2)];
            Ball w = Rational((4 * n1 * n1 - 1) * (4 * n2 * n2 - 1), 64).to_ball(p);
            c += product_with(j1, j2).scaled(w);
        }
    }
    std::int64_t cc = 0;
    for (long n : k) cc += (4 * n * n - 1) * (4 * n * n - 9);
    c += a.scaled(Ball::neg(Rational(cc, 128).to_ball(p)));
    out.C_terms = c.poly();
    return out;
}

// Evaluate a cosine sum at a point (identity checks).
inline Ball trig_poly_eval(const TrigPoly& poly, const Ball& z, Precision p) {
    Ball acc = Ball::zero(p);
    Ball quarter_pi = Ball::mul_2si(Ball::pi(p), -2, p);
    for (const TrigTerm& t : poly) {
        Ball arg = Ball::add(Ball::mul_si(z, t.freq, p),
                             Ball::mul_si(quarter_pi, t.phase_eighths, p), p);
        acc = Ball::add(acc, Ball::mul(t.coeff, Ball::cos_(arg, p), p), p);
    }
    return acc;
}

// Sum of the frequency-zero components (constants) of a cosine sum.
inline Ball trig_poly_mean(const TrigPoly& poly, Precision p) {
    Ball acc = Ball::zero(p);
    Ball quarter_pi = Ball::mul_2si(Ball::pi(p), -2, p);
    for (const TrigTerm& t : poly) {
        if (t.freq != 0) continue;
        acc = Ball::add(acc, Ball::mul(t.coeff, Ball::cos_(Ball::mul_si(quarter_pi, t.phase_eighths, p), p), p), p);
    }
    return acc;
}

namespace detail {

// int_T^inf z^{-P} cos(f z + q pi/4) dz by repeated integration by parts;
// the left-over integral after each step is majorized through |trig| <= 1
// and absorbed once it is below target.
inline Ball byparts_integral(int P, int f, int q, const Rational& T, Precision p, int min_depth) {
    if (f <= 0) throw Error("byparts_integral: frequency must be positive");
    double fT = static_cast<double>(f) * T.to_double();
    if (fT < static_cast<double>(P + 4))
        throw NonConvergence("byparts_integral: |f| T = " + std::to_string(fT) +
                             " too small against power " + std::to_string(P));
    Precision pw(p.bits + 16);
    Ball Tb = T.to_ball(pw);
    Ball invT = Ball::div(Ball::from_long(1, pw), Tb, pw);
    Ball invf = Ball::from_ratio(1, f, pw);
    Ball theta = Ball::add((T * f).to_ball(pw),
                           Ball::mul_si(Ball::mul_2si(Ball::pi(pw), -2, pw), q, pw), pw);
    Ball ct = Ball::cos_(theta, pw);
    Ball st = Ball::sin_(theta, pw);

    Ball acc = Ball::zero(pw);
    Ball Tpow = Ball::pow_int(invT, P, pw);  // T^{-Q}, Q starts at P
    Ball pref = Ball::from_long(1, pw);      // accumulated signed (Q/f) factors
    bool cosine = true;
    int Q = P;
    double target = std::ldexp(1.0, -static_cast<int>(p.bits + 20));
    // The remainder majorant is valid at every depth; stop at the target or
    // at the minimizing depth (the series is asymptotic in 1/(fT)).
    double best = -1.0;
    Ball best_acc(pw), best_rem(pw);
    for (int depth = 0; depth < 96; ++depth) {
        Ball boundary;
        if (cosine) {
            // -T^{-Q} sin(theta)/f, then (Q/f) * integral of z^{-Q-1} sin
            boundary = Ball::neg(Ball::mul(Ball::mul(Tpow, st, pw), invf, pw));
        } else {
            boundary = Ball::mul(Ball::mul(Tpow, ct, pw), invf, pw);
        }
        acc = Ball::add(acc, Ball::mul(pref, boundary, pw), pw);
        Ball next_pref = Ball::mul(Ball::mul_si(pref, cosine ? Q : -Q, pw), invf, pw);
        pref = next_pref;
        cosine = !cosine;
        Q += 1;
        Tpow = Ball::mul(Tpow, invT, pw);
        // Remainder majorant: |pref| int_T^inf z^{-Q} dz = |pref| T^{1-Q}/(Q-1)
        Ball rem = Ball::div_ui(Ball::mul(Ball::abs_enclosure(pref, pw),
                                          Ball::mul(Tpow, Tb, pw), pw),
                                static_cast<unsigned long>(Q - 1), pw);
        double ru = rem.abs_upper_d();
        if (depth + 1 >= min_depth) {
            if (ru <= target) {
                acc = Ball::widen(acc, rem.upper_bound_ball(Precision(64)));
                return Ball::round_to(acc, p);
            }
            if (best < 0.0 || ru < best) {
                best = ru;
                best_acc = acc;
                best_rem = rem;
            } else if (ru > 4.0 * best) {
                break;  // past the minimal term
            }
        }
    }
    if (best < 0.0) throw NonConvergence("byparts_integral: no usable truncation depth");
    best_acc = Ball::widen(best_acc, best_rem.upper_bound_ball(Precision(64)));
    return Ball::round_to(best_acc, p);
}

}  // namespace detail

// (2/pi)^3 * sum over powers of int_T^inf z^{-power} (cosine sum) dz.
// min_depth forces extra integration-by-parts steps (stability checks).
inline Ball tail_integral(const TailCoefficients& coeffs, const Rational& T, Precision p,
                          int min_depth = 0) {
    Precision pw(p.bits + 16);
    Ball acc = Ball::zero(pw);
    Ball Tb = T.to_ball(pw);
    Ball invT = Ball::div(Ball::from_long(1, pw), Tb, pw);
    Ball quarter_pi = Ball::mul_2si(Ball::pi(pw), -2, pw);
    const std::array<std::pair<const TrigPoly*, int>, 3> parts = {
        std::make_pair(&coeffs.A_terms, 2), std::make_pair(&coeffs.B_terms, 3),
        std::make_pair(&coeffs.C_terms, 4)};
    for (const auto& [poly, P] : parts) {
        Ball closed = Ball::div_ui(Ball::pow_int(invT, P - 1, pw),
                                   static_cast<unsigned long>(P - 1), pw);
        for (const TrigTerm& t : *poly) {
            Ball piece;
            if (t.freq == 0) {
                Ball c = Ball::cos_(Ball::mul_si(quarter_pi, t.phase_eighths, pw), pw);
                piece = Ball::mul(c, closed, pw);
            } else {
                piece = detail::byparts_integral(P, t.freq, t.phase_eighths, T, pw, min_depth);
            }
            acc = Ball::add(acc, Ball::mul(t.coeff, piece, pw), pw);
        }
    }
    // (2/pi)^3 = 8 / pi^3
    Ball factor = Ball::div(Ball::from_long(8, pw), Ball::pow_int(Ball::pi(pw), 3, pw), pw);
    return Ball::round_to(Ball::mul(factor, acc, pw), p);
}

inline Ball tail_main(const std::array<long, 6>& k, const Rational& T, Precision p,
                      int min_depth = 0) {
    return tail_integral(expand_products(k, p), T, p, min_depth);
}

namespace detail {
inline Ball tail_error_formula(long N, const Rational& T, Precision p) {
    Ball nb = Ball::from_long(N, p);
    Ball invT = Ball::div(Ball::from_long(1, p), T.to_ball(p), p);
    auto piece = [&](long cnum, long cden, int npow, int tpow) {
        Ball v = Ball::from_ratio(cnum, cden, p);
        v = Ball::mul(v, Ball::pow_int(nb, npow, p), p);
        return Ball::mul(v, Ball::pow_int(invT, tpow, p), p);
    };
    Ball acc = piece(19, 1, 6, 5);
    acc = Ball::add(acc, piece(68, 100, 8, 5), p);
    acc = Ball::add(acc, piece(35, 100, 10, 6), p);
    acc = Ball::add(acc, piece(13, 100, 12, 7), p);
    acc = Ball::add(acc, piece(16, 1, 14, 8), p);
    return acc;
}
}  // namespace detail

// 19 N^6/T^5 + 0.68 N^8/T^5 + 0.35 N^10/T^6 + 0.13 N^12/T^7 + 16 N^14/T^8,
// the uniform bound on the tail approximation error.
inline Ball tail_error(long N, const Rational& T, Precision p = Precision(128)) {
    if (N < 20) throw ValidityViolation("tail_error: requires N >= 20");
    if (T < Rational(10 * N * N, 1))
        throw ValidityViolation("tail_error: requires T >= 10 N^2, got T = " + T.str());
    return detail::tail_error_formula(N, T, p);
}

}  // namespace bandcert
