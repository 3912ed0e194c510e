#include "bandcert/ball.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <thread>
#include <vector>

using namespace bandcert;

namespace {
const Precision p128(128);
const Precision p64(64);
}

TEST_CASE("exact integer addition", "[ball]") {
    Ball a = Ball::from_long(1, p128);
    Ball b = Ball::from_long(2, p128);
    Ball c = Ball::add(a, b, p128);
    REQUIRE(c.contains(3.0));
    REQUIRE(c.is_exact());
}

TEST_CASE("multiplication by exact zero annihilates", "[ball]") {
    Ball z = Ball::zero(p128);
    Ball x = Ball::widen(Ball::from_double(17.25, p128), Ball::from_double(0.5, p128));
    Ball c = Ball::mul(z, x, p128);
    REQUIRE(c.contains(0.0));
    REQUIRE(c.is_exact());
}

TEST_CASE("division 1/3 carries a positive radius", "[ball]") {
    Precision p53(53);
    Ball c = Ball::div(Ball::from_long(1, p53), Ball::from_long(3, p53), p53);
    REQUIRE(c.contains(1.0 / 3.0));
    REQUIRE_FALSE(c.is_exact());
    REQUIRE(c.rad_d() > 0);
}

TEST_CASE("division by an interval enclosing zero is rejected", "[ball]") {
    Ball b = Ball::widen(Ball::from_long(0, p128), Ball::from_long(1, p128));
    REQUIRE_THROWS_AS(Ball::div(Ball::from_long(1, p128), b, p128), DivisionByEnclosedZero);
}

TEST_CASE("elementary functions hit their anchors", "[ball]") {
    REQUIRE(Ball::cos_(Ball::zero(p128), p128).contains(1.0));
    Ball e1 = Ball::exp_(Ball::from_long(1, p128), p128);
    REQUIRE(Ball::log_(e1, p128).contains(1.0));
    Ball g = Ball::gamma_(Ball::from_ratio(1, 2, p128), p128);
    Ball sqrt_pi = Ball::sqrt(Ball::pi(p128), p128);
    REQUIRE(g.overlaps(sqrt_pi));
    REQUIRE(std::abs(g.mid_d() - std::sqrt(std::acos(-1.0))) < 1e-15);
}

TEST_CASE("domain violations throw", "[ball]") {
    Ball neg = Ball::from_long(-1, p128);
    REQUIRE_THROWS_AS(Ball::sqrt(neg, p128), DomainViolation);
    REQUIRE_THROWS_AS(Ball::log_(Ball::zero(p128), p128), DomainViolation);
    Ball span = Ball::widen(Ball::from_long(-1, p128), Ball::from_long(2, p128));
    REQUIRE_THROWS_AS(Ball::gamma_(span, p128), DomainViolation);
}

TEST_CASE("gamma on negative non-integer interval via reflection", "[ball]") {
    Ball x = Ball::from_ratio(-3, 2, p128);
    Ball g = Ball::gamma_(x, p128);
    // Gamma(-3/2) = 4 sqrt(pi) / 3
    Ball ref = Ball::div_ui(Ball::mul_si(Ball::sqrt(Ball::pi(p128), p128), 4, p128), 3, p128);
    REQUIRE(g.overlaps(ref));
}

TEST_CASE("union covers both operands", "[ball]") {
    Ball a = Ball::from_long(1, p128);
    REQUIRE(ball_union(a, a).contains(a));

    Ball b = Ball::widen(Ball::zero(p128), Ball::from_long(1, p128));
    Ball c = Ball::from_long(2, p128);
    Ball u = ball_union(b, c);
    REQUIRE(u.contains(-1.0));
    REQUIRE(u.contains(2.0));
}

TEST_CASE("containment is monotone under operand refinement", "[ball]") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> val(-8.0, 8.0);
    std::uniform_real_distribution<double> rad(0.0, 0.5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int iter = 0; iter < 200; ++iter) {
        double ma = val(rng), mb = val(rng);
        double ra = rad(rng), rb = rad(rng);
        Ball a = Ball::widen(Ball::from_double(ma, p128), Ball::from_double(ra, p128));
        Ball b = Ball::widen(Ball::from_double(mb, p128), Ball::from_double(rb, p128));
        double xa = ma + ra * unit(rng);
        double xb = mb + rb * unit(rng);
        Ball r_add = Ball::add(a, b, p128);
        REQUIRE(r_add.contains(xa + xb));
        Ball r_sub = Ball::sub(a, b, p128);
        REQUIRE(r_sub.contains(xa - xb));
        Ball r_mul = Ball::mul(a, b, p128);
        REQUIRE(r_mul.contains(xa * xb));
        if (!b.contains_zero()) {
            Ball r_div = Ball::div(a, b, p128);
            REQUIRE(r_div.contains(xa / xb));
        }
        Ball r_cos = Ball::cos_(a, p128);
        REQUIRE(r_cos.contains(std::cos(xa)));
        Ball r_pow = Ball::pow_int(a, 3, p128);
        REQUIRE(r_pow.contains(xa * xa * xa));
    }
}

TEST_CASE("results are bit-identical across threads", "[ball]") {
    auto work = [] {
        Ball acc = Ball::from_long(1, p128);
        for (int i = 1; i <= 50; ++i) {
            acc = Ball::add(acc, Ball::div(Ball::from_long(1, p128),
                                           Ball::from_long(i * i + 1, p128), p128),
                            p128);
            acc = Ball::cos_(acc, p128);
        }
        return acc.str();
    };
    std::string serial = work();
    std::vector<std::string> results(4);
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i)
        threads.emplace_back([&results, i, &work] { results[i] = work(); });
    for (auto& t : threads) t.join();
    for (const auto& r : results) REQUIRE(r == serial);
}

TEST_CASE("doubling precision does not grow radii on point inputs", "[ball]") {
    for (long bits : {64L, 128L, 256L}) {
        Precision lo(bits), hi(2 * bits);
        Ball xl = Ball::from_ratio(355, 113, lo);
        Ball xh = Ball::from_ratio(355, 113, hi);
        REQUIRE(Ball::cos_(xl, lo).rad_d() >= Ball::cos_(xh, hi).rad_d());
        REQUIRE(Ball::div(Ball::from_long(1, lo), xl, lo).rad_d() >=
                Ball::div(Ball::from_long(1, hi), xh, hi).rad_d());
        REQUIRE(Ball::sqrt(xl, lo).rad_d() >= Ball::sqrt(xh, hi).rad_d());
    }
}

TEST_CASE("serialization round trip", "[ball]") {
    Ball x = Ball::div(Ball::pi(p128), Ball::from_long(3, p128), p128);
    std::string s = x.str();

    SECTION("same precision reproduces the value bit for bit") {
        Ball y = Ball::parse(s, p128);
        REQUIRE(y.same_bits(x));
        REQUIRE(y.str() == s);
    }
    SECTION("other precisions still contain the original") {
        Ball y64 = Ball::parse(s, p64);
        REQUIRE(y64.contains(x));
        Ball y256 = Ball::parse(s, Precision(256));
        REQUIRE(y256.contains(x));
    }
    SECTION("zero serializes cleanly") {
        Ball z = Ball::zero(p128);
        REQUIRE(z.str() == "0 +/- 0");
        REQUIRE(Ball::parse(z.str(), p128).same_bits(z));
    }
    SECTION("garbage rejected") {
        REQUIRE_THROWS_AS(Ball::parse("1.0", p128), Error);
        REQUIRE_THROWS_AS(Ball::parse("x +/- 0", p128), Error);
        REQUIRE_THROWS_AS(Ball::parse("1 +/- -2", p128), Error);
    }
}

TEST_CASE("spec-level dispatchers", "[ball]") {
    Ball a = Ball::from_long(2, p128);
    REQUIRE(ball_binop(BinOp::mul, a, a, p128).contains(4.0));
    REQUIRE(ball_elem(ElemFn::sqrt, ball_elem(ElemFn::pow_int, a, p128, 2), p128).contains(2.0));
}
