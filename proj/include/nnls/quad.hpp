#pragma once

// Minimal complex arithmetic in binary128, enough for the series that
// lose many digits to cancellation in double.

#include "core.hpp"

#include <quadmath.h>

namespace nnls::quad {

using real = __float128;

struct cplx {
    real re = 0, im = 0;

    cplx() = default;
    cplx(real r, real i = 0) : re(r), im(i) {}
    cplx(double r) : re(r), im(0) {}
    cplx(int r) : re(r), im(0) {}
    explicit cplx(Complex z) : re(z.real()), im(z.imag()) {}

    Complex to_double() const { return {double(re), double(im)}; }

    cplx& operator+=(const cplx& o) { re += o.re; im += o.im; return *this; }
    cplx& operator-=(const cplx& o) { re -= o.re; im -= o.im; return *this; }
    cplx& operator*=(const cplx& o) {
        const real r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    cplx& operator/=(const cplx& o) {
        // Smith's algorithm
        if (fabsq(o.re) >= fabsq(o.im)) {
            const real t = o.im / o.re, d = o.re + o.im * t;
            const real r = (re + im * t) / d;
            im = (im - re * t) / d;
            re = r;
        } else {
            const real t = o.re / o.im, d = o.re * t + o.im;
            const real r = (re * t + im) / d;
            im = (im * t - re) / d;
            re = r;
        }
        return *this;
    }
};

inline cplx operator+(cplx a, const cplx& b) { return a += b; }
inline cplx operator-(cplx a, const cplx& b) { return a -= b; }
inline cplx operator*(cplx a, const cplx& b) { return a *= b; }
inline cplx operator/(cplx a, const cplx& b) { return a /= b; }
inline cplx operator-(const cplx& a) { return {-a.re, -a.im}; }
inline cplx operator*(real s, const cplx& a) { return {s * a.re, s * a.im}; }

inline real abs(const cplx& z) { return hypotq(z.re, z.im); }
inline real arg(const cplx& z) { return atan2q(z.im, z.re); }
inline cplx exp(const cplx& z) {
    const real m = expq(z.re);
    return {m * cosq(z.im), m * sinq(z.im)};
}
inline cplx log(const cplx& z) { return {logq(abs(z)), arg(z)}; }
inline cplx pow(const cplx& z, const cplx& w) { return exp(w * log(z)); }
inline cplx sqrt(const cplx& z) {
    const real r = sqrtq(abs(z));
    const real h = arg(z) / 2;
    return {r * cosq(h), r * sinq(h)};
}

inline const real pi = acosq(-1);

namespace detail {
// B_{2k} / (2k (2k-1)), k = 1..15
inline real stirling_coeff(int k) {
    static const real num[15] = {1, -1, 1, -1, 5, -691, 7, -3617, 43867, -174611,
                                 854513, -236364091, 8553103, -23749461029.0, 8615841276005.0};
    static const real den[15] = {6, 30, 42, 30, 66, 2730, 6, 510, 798, 330, 138, 2730, 6, 870, 14322};
    const real n = 2 * k;
    return num[k - 1] / den[k - 1] / (n * (n - 1));
}
}  // namespace detail

// log Gamma via a shifted Stirling series; accurate to ~1e-33.
inline cplx log_gamma(cplx z) {
    // Reflection keeps the shift short for Re z << 0.
    if (z.re < 0) {
        const cplx s = {sinq(pi * z.re) * coshq(pi * z.im), cosq(pi * z.re) * sinhq(pi * z.im)};
        return cplx(logq(pi)) - log(s) - log_gamma(cplx(1) - z);
    }
    cplx shift_log(0);
    cplx w = z;
    cplx prod(1);
    int n = 0;
    while (w.re < 30) {
        prod *= w;
        w += cplx(1);
        if (++n % 16 == 0) {  // keep the product in range
            shift_log += log(prod);
            prod = cplx(1);
        }
    }
    shift_log += log(prod);
    const cplx inv = cplx(1) / w;
    const cplx inv2 = inv * inv;
    cplx series(0), p = inv;
    for (int k = 1; k <= 15; ++k) {
        series += detail::stirling_coeff(k) * p;
        p *= inv2;
    }
    const cplx lg = (w - cplx(real(1) / 2)) * log(w) - w + cplx(logq(2 * pi) / 2) + series;
    return lg - shift_log;
}

// 1/Gamma(z), exact zeros at non-positive integers.
inline cplx rgamma(cplx z) {
    cplx prod(1);
    cplx w = z;
    while (w.re < 30) {
        prod *= w;
        w += cplx(1);
    }
    if (prod.re == 0 && prod.im == 0) return cplx(0);
    return prod * exp(-log_gamma(w));
}

}  // namespace nnls::quad
