#pragma once

// Test-only oracles, independent of the library's evaluation paths:
// GSL special functions and adaptive Gauss-Kronrod quadrature in doubles,
// plus direct formula evaluations.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>

#include <array>
#include <cmath>
#include <memory>
#include <vector>

namespace oracle {

inline double bessel_j(int n, double x) { return gsl_sf_bessel_Jn(n, x); }

struct SixOrders {
    std::array<long, 6> k;
};

inline double product_integrand(double r, void* params) {
    const auto* o = static_cast<const SixOrders*>(params);
    double v = r;
    for (long n : o->k) v *= gsl_sf_bessel_Jn(static_cast<int>(n), r);
    return v;
}

struct Quadrature {
    double value;
    double abserr;
};

// Adaptive Gauss-Kronrod over [a, b]; roundoff warnings are tolerated and
// reported through abserr.
inline Quadrature integrate_product(const std::array<long, 6>& orders, double a, double b,
                                    double epsabs = 1e-10) {
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    SixOrders o{orders};
    gsl_function f;
    f.function = &product_integrand;
    f.params = &o;
    size_t limit = 400000;
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(limit);
    double value = 0, err = 0;
    int status = gsl_integration_qag(&f, a, b, epsabs, 0.0, limit, GSL_INTEG_GAUSS61, ws, &value,
                                     &err);
    gsl_integration_workspace_free(ws);
    gsl_set_error_handler(old);
    if (status != GSL_SUCCESS && status != GSL_EROUND && status != GSL_EMAXITER) err += 1e-6;
    return {value, err};
}

// Mean of prod_j cos(z - pi/4 - k_j pi/2) over one period: the trapezoid
// rule is exact for trigonometric polynomials of degree <= 6 at >= 14
// points; 256 leaves only floating-point noise.
inline double cos_product_mean(const std::array<long, 6>& orders) {
    const int n = 256;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = 2.0 * M_PI * i / n;
        double v = 1.0;
        for (long kj : orders) v *= std::cos(z - M_PI / 4 - kj * M_PI / 2);
        acc += v;
    }
    return acc / n;
}

struct TailEstimate {
    double main;       // (2/pi)^3 * c0 / T
    double majorant;   // bound on everything else past T
};

// One-step integration-by-parts majorant for the tail of the product
// integral past T: the constant component of the leading z^{-2} term is
// integrated exactly, the oscillatory rest and the z^{-3}, z^{-4}, and
// higher-order pieces are bounded.
inline TailEstimate tail_beyond(const std::array<long, 6>& orders, double T) {
    double c0 = cos_product_mean(orders);
    double pref = std::pow(2.0 / M_PI, 3);
    double main = pref * c0 / T;

    double bsum = 0.0, csum = 0.0, nmax = 0.0;
    for (long kj : orders) {
        double k2 = static_cast<double>(kj) * static_cast<double>(kj);
        bsum += (k2 - 0.25) / 2.0;
        nmax = std::max(nmax, std::abs(static_cast<double>(kj)));
    }
    for (size_t i = 0; i < 6; ++i)
        for (size_t j = i + 1; j < 6; ++j) {
            double a = static_cast<double>(orders[i]) * static_cast<double>(orders[i]) - 0.25;
            double b = static_cast<double>(orders[j]) * static_cast<double>(orders[j]) - 0.25;
            csum += a * b / 4.0;
        }
    double c2 = 0.0;
    for (long kj : orders) {
        double k2 = static_cast<double>(kj) * static_cast<double>(kj);
        c2 += (k2 - 0.25) * (k2 - 2.25);
    }
    csum += std::abs(c2) / 8.0;

    double osc_a = 2.0 / (T * T);               // sum |c_f| <= 1, one by-parts step
    double bpart = bsum / (2.0 * T * T);        // |B| <= bsum
    double cpart = csum / (3.0 * T * T * T);    // |C| <= csum
    // Paper-style bound on the orders beyond z^{-4}.
    double n2 = std::max(nmax * nmax, 1.0);
    double rest = 19.0 * std::pow(nmax, 6) / std::pow(T, 5) +
                  0.68 * std::pow(nmax, 8) / std::pow(T, 5) +
                  0.35 * std::pow(nmax, 10) / std::pow(T, 6) +
                  0.13 * std::pow(nmax, 12) / std::pow(T, 7) +
                  16.0 * std::pow(n2, 7) / std::pow(T, 8);
    return {main, pref * (osc_a + bpart + cpart) + rest};
}

// Composite Simpson for smooth one-dimensional reference integrals.
template <typename F>
double simpson(F&& f, double a, double b, int n) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace oracle
