#pragma once

// Scalar gamma-family evaluations on the complex plane: principal log-gamma,
// digamma, trigamma, plus the real Hurwitz zeta tails used by the product-form
// double gamma oracle.  Stirling series with upward recurrence; the branch of
// log-gamma is the analytic continuation from (0,inf), which on the cut plane
// C \ (-inf,0] equals the sum of principal logs accumulated by the recurrence.

#include <cmath>
#include <complex>
#include <limits>

#include "mbk/errors.hpp"

namespace mbk {

using cplx = std::complex<double>;

inline constexpr double euler_gamma = 0.57721566490153286060651209008;
inline constexpr double ln_two_pi = 1.83787706640934548356065947281;

namespace detail {

// B_{2k}/(2k(2k-1)) for the Stirling series of ln Gamma.
inline constexpr double stirling_coeff[] = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
};

// Bernoulli numbers B_2..B_30.
inline constexpr double bernoulli2n[] = {
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0, 43867.0 / 798.0,
    -174611.0 / 330.0, 854513.0 / 138.0, -236364091.0 / 2730.0,
    8553103.0 / 6.0, -23749461029.0 / 870.0, 8615841276005.0 / 14322.0,
};

inline bool is_nonpositive_integer(cplx z, double tol = 1e-13) {
    if (std::abs(z.imag()) > tol) return false;
    double r = std::round(z.real());
    return r <= 0.0 && std::abs(z.real() - r) <= tol * std::max(1.0, std::abs(z.real()));
}

} // namespace detail

namespace detail {

// exp(w) - 1 without cancellation for small |w|.
inline cplx cexpm1(cplx w) {
    if (std::abs(w) > 0.5) return std::exp(w) - 1.0;
    const double er = std::expm1(w.real());
    const double ci = std::cos(w.imag());
    const double si = std::sin(w.imag());
    const double half = std::sin(0.5 * w.imag());
    return {er * ci - 2.0 * half * half, (er + 1.0) * si};
}

cplx log_gamma_impl(cplx z); // forward

// Reflection for Re(z) << 0: ln Gamma(z) = ln pi - lnsin(pi z) - ln Gamma(1-z)
// with the log-sine unwound analytically on each half-plane; this matches the
// principal branch (verified against the recurrence in the unit tests).
inline cplx log_gamma_reflect(cplx z) {
    const bool upper = (z.imag() > 0.0) || (z.imag() == 0.0 && !std::signbit(z.imag()));
    const cplx zc = upper ? z : std::conj(z);
    // Im(zc) >= 0: ln sin(pi zc) = -i pi zc + i pi/2 - ln 2 + ln(1 - e^{2 pi i zc})
    const double n = std::round(zc.real());
    const cplx d = zc - n;     // e^{2 pi i zc} = e^{2 pi i d}
    const cplx one_minus = -cexpm1(cplx(0.0, 2.0 * M_PI) * d);
    const cplx lnsin = cplx(0.0, -M_PI) * zc + cplx(std::log(0.5), 0.5 * M_PI)
                     + std::log(one_minus);
    const cplx r = std::log(M_PI) - lnsin - log_gamma_impl(1.0 - zc);
    return upper ? r : std::conj(r);
}

inline cplx log_gamma_impl(cplx z) {
    if (z.real() < -8.0) return log_gamma_reflect(z);
    cplx shift = 0.0;
    while (z.real() < 10.0) {
        shift -= std::log(z);
        z += 1.0;
    }
    const cplx zi = 1.0 / z;
    const cplx zi2 = zi * zi;
    cplx series = 0.0, p = zi;
    for (double c : stirling_coeff) {
        series += c * p;
        p *= zi2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * ln_two_pi + series + shift;
}

} // namespace detail

// Principal log-gamma: Stirling at Re(z) >= 10, recurrence in a band to the
// left of it, reflection deep in the left half-plane.
inline cplx log_gamma(cplx z) {
    if (detail::is_nonpositive_integer(z))
        throw pole_error("log_gamma: pole at nonpositive integer", z);
    return detail::log_gamma_impl(z);
}


// digamma = Gamma'/Gamma, valid off the nonpositive integers.
inline cplx digamma(cplx z) {
    if (detail::is_nonpositive_integer(z))
        throw pole_error("digamma: pole at nonpositive integer", z);
    cplx shift = 0.0;
    while (z.real() < 10.0) {
        shift -= 1.0 / z;
        z += 1.0;
    }
    const cplx zi = 1.0 / z;
    const cplx zi2 = zi * zi;
    // psi(z) ~ ln z - 1/(2z) - sum B_2n / (2n z^{2n})
    cplx series = 0.0, p = zi2;
    static constexpr int nmax = 10;
    for (int n = 1; n <= nmax; ++n) {
        series += detail::bernoulli2n[n - 1] / (2.0 * n) * p;
        p *= zi2;
    }
    return std::log(z) - 0.5 * zi - series + shift;
}

// trigamma = psi'.
inline cplx trigamma(cplx z) {
    if (detail::is_nonpositive_integer(z))
        throw pole_error("trigamma: pole at nonpositive integer", z);
    cplx shift = 0.0;
    while (z.real() < 10.0) {
        shift += 1.0 / (z * z);
        z += 1.0;
    }
    const cplx zi = 1.0 / z;
    const cplx zi2 = zi * zi;
    // psi'(z) ~ 1/z + 1/(2z^2) + sum B_2n z^{-2n-1}
    cplx series = 0.0, p = zi * zi2;
    static constexpr int nmax = 10;
    for (int n = 1; n <= nmax; ++n) {
        series += detail::bernoulli2n[n - 1] * p;
        p *= zi2;
    }
    return zi + 0.5 * zi2 + series + shift;
}

// Gamma(z) as a value; finite (with sign) for real negative non-integers.
inline cplx gamma_fn(cplx z) {
    if (z.imag() == 0.0) {
        double g = std::tgamma(z.real());
        if (std::isfinite(g)) return cplx(g, 0.0);
    }
    if (z.real() < 0.5) {
        // reflection keeps the argument of log_gamma in the right half-plane
        const cplx s = std::sin(M_PI * z);
        if (s == cplx(0.0, 0.0)) throw pole_error("gamma: pole", z);
        return M_PI / (s * std::exp(log_gamma(1.0 - z)));
    }
    return std::exp(log_gamma(z));
}

// Hurwitz zeta(s, x) for integer s >= 2 and real x > 0, via upward recurrence
// into the asymptotic (Euler-Maclaurin) region.
inline double hurwitz_zeta(int s, double x) {
    if (s < 2) throw domain_error("hurwitz_zeta: s must be >= 2");
    if (x <= 0.0) throw domain_error("hurwitz_zeta: x must be > 0");
    double acc = 0.0;
    while (x < 30.0) {
        acc += std::pow(x, -s);
        x += 1.0;
    }
    // zeta(s,x) ~ x^{1-s}/(s-1) + x^{-s}/2 + sum_j B_2j (s)_{2j-1} x^{-s-2j+1}/(2j)!
    const double xi = 1.0 / x;
    double v = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
    double pref = std::pow(x, -s - 1.0);
    double rising = s; // (s)_1
    double fact = 2.0; // (2j)!
    for (int j = 1; j <= 7; ++j) {
        v += detail::bernoulli2n[j - 1] * rising / fact * pref;
        // advance (s)_{2j-1} -> (s)_{2j+1}, (2j)! -> (2j+2)!, x^{-s-2j+1} -> ...
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        pref *= xi * xi;
    }
    return v + acc;
}

// Real polygamma psi^{(k)}(x), k >= 1, x > 0, through Hurwitz zeta.
inline double polygamma(int k, double x) {
    double sign = (k % 2 == 0) ? -1.0 : 1.0;
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    return sign * kfact * hurwitz_zeta(k + 1, x);
}

} // namespace mbk
