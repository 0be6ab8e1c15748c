#pragma once

// Parabolic cylinder function D_a(eta) for complex order and argument.
//
// Everything is evaluated in binary128 and rounded at the end. Three
// representations are used depending on where eta sits:
//   * Maclaurin series (no cancellation near the origin or when D grows),
//   * the large-|eta| expansion, with the Stokes term for |ph eta| > pi/2,
//   * Taylor continuation of the Weber ODE between the two, stepping in the
//     stable direction (inward where D is recessive, outward otherwise).

#include "core.hpp"
#include "gamma.hpp"
#include "quad.hpp"

#include <optional>

namespace nnls {

inline constexpr double weber_max_order = 10.0;
inline constexpr double weber_max_argument = 50.0;

namespace detail::weber {

using quad::cplx;
using quad::real;

struct Value {
    cplx d, dp;  // D and dD/deta
};

inline real qabs(const cplx& z) { return quad::abs(z); }

inline Value origin_data(const cplx& a) {
    // D_a(0) = 2^{a/2} sqrt(pi) / Gamma((1-a)/2),  D_a'(0) = -2^{(a+1)/2} sqrt(pi) / Gamma(-a/2)
    const cplx ln2(logq(real(2)));
    const real sp = sqrtq(quad::pi);
    const cplx half(real(1) / 2);
    const cplx d0 = sp * quad::exp(half * a * ln2) * quad::rgamma(half * (cplx(1) - a));
    const cplx d1 = -sp * quad::exp(half * (a + cplx(1)) * ln2) * quad::rgamma(-(half * a));
    return {d0, d1};
}

// Taylor expansion of the Weber ODE about `c` with data (y, yp), evaluated at c + h.
// Returns nullopt if the series does not settle. `loss` receives the ratio of
// the largest term to the result (cancellation indicator).
inline std::optional<Value> taylor(const cplx& a, const cplx& c, const Value& v, const cplx& h, real* loss = nullptr) {
    const cplx p0 = real(1) / 4 * c * c - a - cplx(real(1) / 2);
    const cplx p1 = real(1) / 2 * c;
    const real p2 = real(1) / 4;
    cplx ym2(0), ym1(0), y0 = v.d, y1 = v.dp;
    cplx sum = y0 + y1 * h, dsum = y1;
    cplx hp = h;  // h^n for the current n = 1
    real biggest = fmaxq(qabs(y0), qabs(y1 * h));
    int quiet = 0;
    for (int n = 0; n < 6000; ++n) {
        // y_{n+2}
        const cplx y2 = (p0 * y0 + p1 * ym1 + p2 * ym2) / cplx(real((n + 2) * (n + 1)));
        const cplx dterm = real(n + 2) * y2 * hp;
        hp *= h;
        const cplx term = y2 * hp;
        sum += term;
        dsum += dterm;
        const real mag = qabs(term);
        biggest = fmaxq(biggest, mag);
        const real scale = fmaxq(qabs(sum), biggest * real(1e-30));
        if (mag <= real(1e-36) * scale && qabs(dterm) <= real(1e-36) * fmaxq(qabs(dsum), biggest * real(1e-30)))
            ++quiet;
        else
            quiet = 0;
        if (quiet >= 4 && n > 8) {
            if (loss) *loss = biggest / fmaxq(qabs(sum), scalbnq(real(1), -16000));
            return Value{sum, dsum};
        }
        ym2 = ym1;
        ym1 = y0;
        y0 = y1;
        y1 = y2;
    }
    return std::nullopt;
}

inline std::optional<Value> maclaurin(const cplx& a, const cplx& eta, real* loss) {
    return taylor(a, cplx(0), origin_data(a), eta, loss);
}

// Large-argument expansion; nullopt unless the terms fall below `target`.
inline std::optional<cplx> asymptotic(const cplx& a, const cplx& eta, real target) {
    const cplx inv = cplx(1) / (real(2) * eta * eta);
    auto series = [&](const cplx& p, real sign, cplx& out) {
        // sum_s sign^s (p)_{2s} / (s! (2 eta^2)^s)
        cplx term(1), sum(1);
        real prev = 1;
        for (int s = 0; s < 400; ++s) {
            const cplx f = (p + cplx(real(2 * s))) * (p + cplx(real(2 * s + 1))) * inv / cplx(real(s + 1));
            term *= sign * f;
            const real mag = qabs(term);
            if (mag > prev && s > 2) return false;  // started diverging
            sum += term;
            prev = mag;
            if (mag < target * qabs(sum)) {
                out = sum;
                return true;
            }
        }
        return false;
    };
    cplx s1;
    if (!series(-a, -1, s1)) return std::nullopt;
    const cplx log_eta = quad::log(eta);
    cplx result = quad::exp(a * log_eta - real(1) / 4 * eta * eta) * s1;
    const real ph = quad::arg(eta);
    if (fabsq(ph) > quad::pi / 2) {
        cplx s2;
        if (!series(a + cplx(1), 1, s2)) return std::nullopt;
        const real sgn = ph > 0 ? 1 : -1;
        const cplx rg = quad::rgamma(-a);
        const cplx stokes_phase = quad::exp(cplx(0, sgn * quad::pi) * a);
        const cplx e = quad::exp(real(1) / 4 * eta * eta - (a + cplx(1)) * log_eta);
        result -= sqrtq(2 * quad::pi) * rg * stokes_phase * e * s2;
    }
    return result;
}

inline constexpr real asym_target = 1e-26;
inline constexpr real loss_limit = 1e14;  // tolerable cancellation in 34 digits

// Walk the Weber ODE from (c, v) to `to` with Taylor steps sized to the local scale.
inline std::optional<Value> continue_to(const cplx& a, cplx c, Value v, const cplx& to) {
    const cplx dir = to - c;
    const real len = qabs(dir);
    if (len == 0) return v;
    real done = 0;
    int guard = 0;
    while (done < len) {
        if (++guard > 200000) return std::nullopt;
        const real scale = fmaxq(real(1), qabs(c) + sqrtq(qabs(a) + 1));
        real step = fminq(real(1), real(3) / scale);
        if (done + step > len) step = len - done;
        const cplx h = (step / len) * dir;
        auto next = taylor(a, c, v, h);
        if (!next) return std::nullopt;
        v = *next;
        c += h;
        done += step;
    }
    return v;
}

inline cplx evaluate(const cplx& a, const cplx& eta) {
    const real r = qabs(eta);
    if (r >= 9) {
        if (auto v = asymptotic(a, eta, asym_target)) return *v;
    }
    real loss = 0;
    auto m = maclaurin(a, eta, &loss);
    if (m && loss < loss_limit) return m->d;

    const cplx dir = r > 0 ? (real(1) / r) * eta : cplx(1);
    const real ph = fabsq(quad::arg(eta));
    const bool recessive = ph < quad::pi / 4 + real(0.05);
    if (recessive) {
        // Start far out where the expansion is excellent and come back in.
        for (real R = fmaxq(r, real(9)) * real(1.25); R < 400; R *= real(1.25)) {
            const cplx far = R * dir;
            auto d = asymptotic(a, far, asym_target);
            auto dm1 = asymptotic(a - cplx(1), far, asym_target);
            if (!d || !dm1) continue;
            // D_a' = -(eta/2) D_a + a D_{a-1}
            const Value start{*d, -(real(1) / 2) * far * *d + a * *dm1};
            if (auto v = continue_to(a, far, start, eta)) return v->d;
            break;
        }
    } else {
        const real r0 = fminq(r, real(6));
        const cplx near = r0 * dir;
        real l0 = 0;
        auto start = maclaurin(a, near, &l0);
        if (start && l0 < loss_limit) {
            if (auto v = continue_to(a, near, *start, eta)) return v->d;
        }
    }
    throw SeriesNonConvergence("parabolic cylinder evaluation did not converge for a=(" +
                               fmt_num(double(a.re)) + "," + fmt_num(double(a.im)) + ") eta=(" +
                               fmt_num(double(eta.re)) + "," + fmt_num(double(eta.im)) + ")");
}

}  // namespace detail::weber

// D_a(eta) without the validity-box check; used internally for neighbouring orders.
inline Complex weber_d_unchecked(Complex a, Complex eta) {
    using detail::weber::cplx;
    return detail::weber::evaluate(cplx(a), cplx(eta)).to_double();
}

// D_a(eta) on |a| <= 10, |eta| <= 50.
inline Complex weber_d(Complex a, Complex eta) {
    if (!(std::abs(a) <= weber_max_order) || !(std::abs(eta) <= weber_max_argument))
        throw OutOfValidityBox("weber_d: (a, eta) outside |a|<=10, |eta|<=50");
    return weber_d_unchecked(a, eta);
}

// dD_a/deta = (eta/2) D_a - D_{a+1}
inline Complex weber_d_derivative(Complex a, Complex eta) {
    if (!(std::abs(a) <= weber_max_order) || !(std::abs(eta) <= weber_max_argument))
        throw OutOfValidityBox("weber_d_derivative: (a, eta) outside the validity box");
    return 0.5 * eta * weber_d_unchecked(a, eta) - weber_d_unchecked(a + 1.0, eta);
}

}  // namespace nnls
