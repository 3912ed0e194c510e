#include "bandcert/bessel.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracle.hpp"

using namespace bandcert;

namespace {
const Precision p128(128);

// Independent double-precision series oracle with explicit truncation.
double series_oracle_j0(double x) {
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 40; ++m) {
        term *= -(x / 2) * (x / 2) / (static_cast<double>(m) * m);
        sum += term;
    }
    return sum;
}
}

TEST_CASE("values at the origin", "[bessel]") {
    Ball z = Ball::zero(p128);
    Ball j0 = bessel_j(0, z, p128);
    REQUIRE(j0.contains(1.0));
    REQUIRE(j0.is_exact());
    Ball j3 = bessel_j(3, z, p128);
    REQUIRE(j3.contains(0.0));
    REQUIRE(j3.is_exact());
}

TEST_CASE("J_0(1) against the independent series oracle", "[bessel]") {
    Ball v = bessel_j(0, Ball::from_long(1, p128), p128);
    // frozen oracle value: alternating series with remainder < 1e-16
    REQUIRE(std::abs(v.mid_d() - 0.7651976865579665514497) < 1e-15);
    REQUIRE(std::abs(v.mid_d() - series_oracle_j0(1.0)) < 1e-15);
    REQUIRE(v.rad_d() < std::ldexp(1.0, -(128 - 20)));
}

TEST_CASE("domain gate", "[bessel]") {
    REQUIRE_THROWS_AS(bessel_j(0, Ball::from_long(-1, p128), p128), DomainViolation);
    Ball straddle = Ball::widen(Ball::zero(p128), Ball::from_long(1, p128));
    REQUIRE_THROWS_AS(bessel_j(0, straddle, p128), DomainViolation);
}

TEST_CASE("reflection returns identical balls", "[bessel]") {
    for (double xv : {0.3, 2.0, 40.0, 300.0}) {
        Ball x = Ball::from_double(xv, p128);
        for (long n : {1L, 2L, 5L, 8L}) {
            Ball neg = bessel_j(-n, x, p128);
            Ball ref = bessel_j(n, x, p128);
            if (n % 2 == 1) ref = Ball::neg(ref);
            REQUIRE(neg.same_bits(ref));
        }
    }
}

TEST_CASE("recurrence, reflection, and magnitude invariants on random samples", "[bessel]") {
    std::mt19937_64 rng(7252025);
    std::uniform_real_distribution<double> xs(0.05, 400.0);
    std::uniform_int_distribution<long> ns(1, 20);
    const long N = 20;
    for (int iter = 0; iter < 1000; ++iter) {
        double xv = xs(rng);
        long n = ns(rng);
        Ball x = Ball::from_double(xv, p128);
        Ball jm = bessel_j(n - 1, x, p128);
        Ball j = bessel_j(n, x, p128);
        Ball jp = bessel_j(n + 1, x, p128);
        // J_{n-1} + J_{n+1} - (2n/x) J_n encloses 0
        Ball res = Ball::sub(Ball::add(jm, jp, p128),
                             Ball::div(Ball::mul_si(j, 2 * n, p128), x, p128), p128);
        REQUIRE(res.contains(0.0));
        // |J_n| <= 1 on the real line
        REQUIRE(j.upper_d() <= 1.0 + j.rad_d());
        REQUIRE(j.lower_d() >= -1.0 - j.rad_d());
        // double-precision cross-check
        REQUIRE(std::abs(j.mid_d() - oracle::bessel_j(static_cast<int>(n), xv)) < 1e-10);
        (void)N;
    }
}

TEST_CASE("oscillatory-regime magnitude bound 3.36 x^{-1/2}", "[bessel]") {
    const long N = 20;
    double floor_x = 0.95 * std::pow(20.0, 1.5) * std::log(20.0);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> xs(floor_x + 1.0, 10.0 * floor_x);
    std::uniform_int_distribution<long> ns(0, N);
    for (int iter = 0; iter < 300; ++iter) {
        double xv = xs(rng);
        long n = ns(rng);
        Ball j = bessel_j(n, Ball::from_double(xv, p128), p128);
        double bound = 3.36 / std::sqrt(xv);
        REQUIRE(std::abs(j.mid_d()) - j.rad_d() <= bound);
    }
}

TEST_CASE("table columns at zero and the recurrence identity", "[bessel]") {
    std::vector<Ball> nodes = {Ball::zero(p128), Ball::from_double(3.5, p128),
                               Ball::from_double(55.0, p128), Ball::from_double(260.0, p128)};
    BesselTable tab(6, nodes, p128);
    REQUIRE(tab.at(0, 0).contains(1.0));
    for (long o = 1; o <= 6; ++o) REQUIRE(tab.at(o, 0).contains(0.0));
    for (size_t i = 1; i < nodes.size(); ++i) {
        for (long n = 1; n <= 5; ++n) {
            Ball res = Ball::sub(Ball::add(tab.at(n - 1, i), tab.at(n + 1, i), p128),
                                 Ball::div(Ball::mul_si(tab.at(n, i), 2 * n, p128), nodes[i], p128),
                                 p128);
            REQUIRE(res.contains(0.0));
        }
        for (long n = 0; n <= 6; ++n)
            REQUIRE(std::abs(tab.at(n, i).mid_d() -
                             oracle::bessel_j(static_cast<int>(n), nodes[i].mid_d())) < 1e-10);
    }
}

TEST_CASE("table round trip through the cache format", "[bessel]") {
    std::vector<Ball> nodes = {Ball::from_double(1.25, p128), Ball::from_double(77.0, p128)};
    BesselTable tab(3, nodes, p128);
    std::stringstream ss;
    tab.save(ss, "N+1=3 scheme=deadbeef prec=128");
    auto back = BesselTable::load(ss, "N+1=3 scheme=deadbeef prec=128");
    REQUIRE(back.has_value());
    REQUIRE(back->node_count() == 2);
    for (long o = 0; o <= 3; ++o)
        for (size_t i = 0; i < 2; ++i) REQUIRE(back->at(o, i).same_bits(tab.at(o, i)));

    std::stringstream ss2;
    tab.save(ss2, "N+1=3 scheme=deadbeef prec=128");
    REQUIRE_FALSE(BesselTable::load(ss2, "N+1=3 scheme=other prec=128").has_value());
}
