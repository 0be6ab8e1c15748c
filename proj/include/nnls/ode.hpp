#pragma once

// Adaptive Dormand-Prince 5(4) with a hard cap on the step size.

#include "core.hpp"

#include <algorithm>
#include <initializer_list>
#include <utility>

namespace nnls {

struct OdeOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    double h_max = 0.05;
    double h_min = 1e-14;
    std::size_t max_steps = 2'000'000;
};

inline double ode_max_abs(const Mat2& m) { return m.norm_inf(); }
inline double ode_max_abs(Complex z) { return std::abs(z); }
inline double ode_max_abs(const Vec2& v) { return std::max(std::abs(v.u), std::abs(v.v)); }

namespace detail {
template <class S>
S axpy(const S& y, double h, std::initializer_list<std::pair<double, const S*>> terms) {
    S out = y;
    for (auto& [c, k] : terms)
        if (c != 0.0) out = out + (*k) * Complex(h * c);
    return out;
}
}  // namespace detail

// Integrate y' = f(x, y) from x0 to x1 (either direction). Returns y(x1).
template <class State, class Rhs>
State integrate_dopri5(Rhs&& f, double x0, State y, double x1, const OdeOptions& opt) {
    using detail::axpy;
    const double span = x1 - x0;
    if (span == 0.0) return y;
    const double dir = span > 0 ? 1.0 : -1.0;
    double x = x0;
    double h = std::min(opt.h_max, std::abs(span));
    static constexpr double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
    static constexpr double a21 = 1. / 5;
    static constexpr double a31 = 3. / 40, a32 = 9. / 40;
    static constexpr double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
    static constexpr double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561, a54 = -212. / 729;
    static constexpr double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
                            a65 = -5103. / 18656;
    static constexpr double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192, b5 = -2187. / 6784, b6 = 11. / 84;
    static constexpr double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
                            e6 = 22. / 525, e7 = -1. / 40;
    State k1 = f(x, y);
    std::size_t steps = 0;
    while (dir * (x1 - x) > 0) {
        if (++steps > opt.max_steps) throw IntegratorDivergence("ODE integrator exceeded the step budget");
        const bool last = h >= std::abs(x1 - x);
        if (last) h = std::abs(x1 - x);
        const double hs = dir * h;
        const State k2 = f(x + c2 * hs, axpy(y, hs, {{a21, &k1}}));
        const State k3 = f(x + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
        const State k4 = f(x + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = f(x + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 = f(x + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State yn = axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = f(x + hs, yn);
        const State err = axpy(State{}, hs, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
        const double scale = opt.atol + opt.rtol * std::max(ode_max_abs(y), ode_max_abs(yn));
        const double en = ode_max_abs(err) / scale;
        if (!std::isfinite(en)) throw IntegratorDivergence("ODE integrator produced a non-finite state");
        if (en <= 1.0) {
            x = last ? x1 : x + hs;
            y = yn;
            k1 = k7;
        }
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        h = std::min(opt.h_max, h * (en <= 1.0 ? fac : std::min(fac, 1.0)));
        if (h < opt.h_min) throw IntegratorDivergence("ODE step size underflow");
    }
    return y;
}

}  // namespace nnls
