#pragma once

// Direct scattering: Jost solutions, scattering matrix, genericity checks.

#include "core.hpp"
#include "ode.hpp"
#include "parallel.hpp"
#include "potential.hpp"

#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace nnls {

struct LaxMatrix {
    Complex q12{}, q21{};
    Mat2 matrix() const { return {0.0, q12, q21, 0.0}; }
};

// Q(x; q) = [[0, q(x)], [-sigma conj(q(-x)), 0]]; zero outside [-L, L].
inline LaxMatrix build_lax_matrix(const Potential& p, double x) {
    if (x < -p.half_width || x > p.half_width) return {};
    return {p(x), -double(p.sigma) * std::conj(p(-x))};
}

enum class JostSide { minus, plus };

struct ScatteringOptions {
    OdeOptions ode{1e-13, 1e-15, 0.05, 1e-14, 2'000'000};
    double step_constant = 1.0;  // h <= step_constant / |z|
    double z_max = 16.0;
    std::size_t points = 2049;
    double eps_a = 1e-6;
    double eps_generic = 1e-6;
    double cross_check_tol = 1e-8;
    unsigned threads = 0;
};

struct JostSolution {
    JostSide side = JostSide::minus;
    Complex z{};
    std::vector<double> x;
    std::vector<Mat2> Y;
};

struct ScatteringData {
    int sigma = 1;
    std::vector<double> z;
    std::vector<Complex> a, b, a_breve, b_breve, r, r_breve;
    double truncation_error = 0.0;
    double cross_check_max = 0.0;  // max |a_det - a_product| over the grid

    std::size_t size() const { return z.size(); }
    Mat2 matrix(std::size_t i) const { return {a[i], b_breve[i], b[i], a_breve[i]}; }
};

namespace detail {

inline OdeOptions jost_ode_options(const ScatteringOptions& opt, Complex z) {
    OdeOptions o = opt.ode;
    if (std::abs(z) > 0) o.h_max = std::min(o.h_max, opt.step_constant / std::abs(z));
    return o;
}

// Y' = e^{ixz ad sigma3}[Q] Y for a matrix or a single column.
template <class State>
State jost_rhs(const Potential& p, Complex z, double x, const State& y) {
    const LaxMatrix q = build_lax_matrix(p, x);
    const Complex e = std::exp(2.0 * I * x * z);
    const Mat2 m{0.0, e * q.q12, q.q21 / e, 0.0};
    return m * y;
}

// Propagate from xa to xb, stopping at the potential's breakpoints.
template <class State>
State propagate(const Potential& p, Complex z, State y, double xa, double xb, const OdeOptions& o) {
    std::vector<double> stops;
    for (double b : p.breakpoints())
        if ((b - xa) * (b - xb) < 0) stops.push_back(b);
    if (xb < xa) std::reverse(stops.begin(), stops.end());
    stops.push_back(xb);
    double x = xa;
    auto rhs = [&](double s, const State& v) { return jost_rhs(p, z, s, v); };
    for (double s : stops) {
        y = integrate_dopri5(rhs, x, y, s, o);
        x = s;
    }
    return y;
}

inline std::vector<double> symmetric_grid(double z_max, std::size_t n) {
    if (n < 2) throw InvalidInput("spectral grid needs at least two points");
    std::vector<double> z(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = z_max * (2.0 * double(j) / double(n - 1) - 1.0);
    for (std::size_t j = 0; j < n / 2; ++j) z[n - 1 - j] = -z[j];
    if (n % 2 == 1) z[n / 2] = 0.0;
    return z;
}

inline double truncation_estimate(const Potential& p) {
    if (p.kind != PotentialKind::gaussian) return 0.0;
    // L1 mass of the gaussian outside [-L, L]
    const double s = std::sqrt(2.0) * p.width;
    const double tail = 0.5 * std::sqrt(2 * pi) * p.width *
                        (std::erfc((p.half_width - p.center) / s) + std::erfc((p.half_width + p.center) / s));
    return std::abs(p.amplitude) * tail;
}

}  // namespace detail

// Y^-(z, x) normalised at -L, or Y^+(z, x) normalised at +L, recorded on `grid` (ascending).
inline JostSolution compute_jost(const Potential& p, Complex z, JostSide side, const std::vector<double>& grid,
                                 const ScatteringOptions& opt = {}) {
    JostSolution s{side, z, grid, std::vector<Mat2>(grid.size())};
    const OdeOptions o = detail::jost_ode_options(opt, z);
    const double L = p.half_width;
    Mat2 y = Mat2::identity();
    if (side == JostSide::minus) {
        double x = -L;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] > x) y = detail::propagate(p, z, y, x, grid[i], o), x = grid[i];
            s.Y[i] = y;
        }
    } else {
        double x = L;
        for (std::size_t i = grid.size(); i-- > 0;) {
            if (grid[i] < x) y = detail::propagate(p, z, y, x, grid[i], o), x = grid[i];
            s.Y[i] = y;
        }
    }
    return s;
}

// S(z) at a single real z, from both Jost solutions meeting at x = 0.
// Also returns Y^-(z, 0) for the product cross-check.
inline Mat2 scattering_matrix_at(const Potential& p, double z, const ScatteringOptions& opt, Mat2* y_minus0 = nullptr) {
    const OdeOptions o = detail::jost_ode_options(opt, z);
    const Mat2 ym = detail::propagate(p, Complex(z), Mat2::identity(), -p.half_width, 0.0, o);
    const Mat2 yp = detail::propagate(p, Complex(z), Mat2::identity(), p.half_width, 0.0, o);
    if (y_minus0) *y_minus0 = ym;
    const Vec2 m1{ym.a11, ym.a21}, m2{ym.a12, ym.a22}, p1{yp.a11, yp.a21}, p2{yp.a12, yp.a22};
    // a = det(Y-_1, Y+_2), b = det(Y+_1, Y-_1), b~ = det(Y-_2, Y+_2), a~ = det(Y+_1, Y-_2)
    return {det(m1, p2), det(m2, p2), det(p1, m1), det(p1, m2)};
}

// Product route: a(z) = Y-_11(z,x) conj(Y-_11(-z,-x)) - sigma Y-_21(z,x) conj(Y-_21(-z,-x)).
inline Complex a_from_product(const Mat2& y_z_x, const Mat2& y_mz_mx, int sigma) {
    return y_z_x.a11 * std::conj(y_mz_mx.a11) - double(sigma) * y_z_x.a21 * std::conj(y_mz_mx.a21);
}

inline ScatteringData compute_scattering(const Potential& p, const ScatteringOptions& opt = {}) {
    ScatteringData d;
    d.sigma = p.sigma;
    d.z = detail::symmetric_grid(opt.z_max, opt.points);
    const std::size_t n = d.z.size();
    d.a.resize(n), d.b.resize(n), d.a_breve.resize(n), d.b_breve.resize(n), d.r.resize(n), d.r_breve.resize(n);
    std::vector<Mat2> y0(n);
    parallel_for(n, opt.threads, [&](std::size_t i) {
        const Mat2 s = scattering_matrix_at(p, d.z[i], opt, &y0[i]);
        d.a[i] = s.a11, d.b_breve[i] = s.a12, d.b[i] = s.a21, d.a_breve[i] = s.a22;
    });
    for (std::size_t i = 0; i < n; ++i) {
        const Complex ap = a_from_product(y0[i], y0[n - 1 - i], p.sigma);
        const double diff = std::abs(ap - d.a[i]);
        d.cross_check_max = std::max(d.cross_check_max, diff);
        if (diff > opt.cross_check_tol * std::max(1.0, std::abs(d.a[i])))
            throw IntegratorDivergence("determinant and product formulas for a(z) disagree at z=" + fmt_num(d.z[i]) +
                                       " by " + fmt_num(diff));
        if (std::abs(d.a[i]) < opt.eps_a || std::abs(d.a_breve[i]) < opt.eps_a)
            throw GenericityViolation("a(z) or a~(z) vanishes near z=" + fmt_num(d.z[i]));
        d.r[i] = d.b[i] / d.a[i];
        d.r_breve[i] = d.b_breve[i] / d.a_breve[i];
        if (std::abs(1.0 - d.r[i] * d.r_breve[i]) < opt.eps_generic)
            throw GenericityViolation("1 - r r~ vanishes near z=" + fmt_num(d.z[i]));
    }
    d.truncation_error = detail::truncation_estimate(p);
    return d;
}

// Transfer-matrix oracle for piecewise-constant data: exact up to rounding.
inline ScatteringData exact_box_scattering(const Potential& p, const std::vector<double>& zs) {
    if (p.kind != PotentialKind::box && p.kind != PotentialKind::zero)
        throw NotPiecewiseConstant("exact transfer matrices need box (piecewise-constant) data");
    ScatteringData d;
    d.sigma = p.sigma;
    d.z = zs;
    const auto br = p.breakpoints();
    const double L = p.half_width;
    for (double z : zs) {
        Mat2 t = Mat2::identity();
        for (std::size_t k = 0; k + 1 < br.size(); ++k) {
            const double dx = br[k + 1] - br[k];
            const LaxMatrix q = build_lax_matrix(p, 0.5 * (br[k] + br[k + 1]));
            const Mat2 m{-I * z, q.q12, q.q21, I * z};
            const Complex mu = std::sqrt(q.q12 * q.q21 - z * z);
            const Complex w = dx * mu;
            Complex c, sc;  // cosh(w), sinh(w)/mu
            if (std::abs(w) < 1e-3) {
                const Complex w2 = w * w;
                c = 1.0 + w2 / 2.0 * (1.0 + w2 / 12.0 * (1.0 + w2 / 30.0));
                sc = dx * (1.0 + w2 / 6.0 * (1.0 + w2 / 20.0 * (1.0 + w2 / 42.0)));
            } else {
                c = std::cosh(w);
                sc = std::sinh(w) / mu;
            }
            t = (Mat2::identity() * c + m * sc) * t;
        }
        const Mat2 e = diag(std::exp(I * L * z), std::exp(-I * L * z));
        const Mat2 s = e * t * e;
        d.a.push_back(s.a11), d.b_breve.push_back(s.a12), d.b.push_back(s.a21), d.a_breve.push_back(s.a22);
        d.r.push_back(s.a21 / s.a11);
        d.r_breve.push_back(s.a12 / s.a22);
    }
    return d;
}

// a(z) for Im z >= 0 and a~(z) for Im z <= 0, from the analytic columns only.
inline Complex a_analytic(const Potential& p, Complex z, const ScatteringOptions& opt = {}) {
    const OdeOptions o = detail::jost_ode_options(opt, z);
    const Vec2 m1 = detail::propagate(p, z, Vec2{1.0, 0.0}, -p.half_width, 0.0, o);
    const Vec2 p2 = detail::propagate(p, z, Vec2{0.0, 1.0}, p.half_width, 0.0, o);
    return det(m1, p2);
}
inline Complex a_breve_analytic(const Potential& p, Complex z, const ScatteringOptions& opt = {}) {
    const OdeOptions o = detail::jost_ode_options(opt, z);
    const Vec2 p1 = detail::propagate(p, z, Vec2{1.0, 0.0}, p.half_width, 0.0, o);
    const Vec2 m2 = detail::propagate(p, z, Vec2{0.0, 1.0}, -p.half_width, 0.0, o);
    return det(p1, m2);
}

struct GenericityReport {
    double min_abs_a = 0;
    double min_abs_a_breve = 0;
    double min_abs_one_minus_rr = 0;
    int winding_a = 0;        // zeros of a in the upper half-disc
    int winding_a_breve = 0;  // zeros of a~ in the lower half-disc
    double radius = 0;
    bool passed = false;
    std::vector<std::string> reasons;
};

namespace detail {
// Winding number of f along a closed polyline, refining segments where the phase jumps.
template <class F>
int winding_number(F&& f, const std::vector<Complex>& contour) {
    double total = 0;
    for (std::size_t k = 0; k + 1 < contour.size(); ++k) {
        Complex za = contour[k], fa = f(za);
        Complex zb = contour[k + 1], fb = f(zb);
        // iterative bisection
        std::vector<std::pair<Complex, Complex>> todo{{zb, fb}};
        while (!todo.empty()) {
            auto [zt, ft] = todo.back();
            const double d = std::arg(ft / fa);
            if (std::abs(d) > 0.5 && std::abs(zt - za) > 1e-9) {
                const Complex zm = 0.5 * (za + zt);
                todo.push_back({zm, f(zm)});
                continue;
            }
            total += d;
            za = zt, fa = ft;
            todo.pop_back();
        }
    }
    return int(std::lround(total / (2 * pi)));
}
}  // namespace detail

inline GenericityReport check_genericity(const Potential& p, const ScatteringData& d, const ScatteringOptions& opt = {},
                                         double radius = -1) {
    GenericityReport g;
    g.min_abs_a = g.min_abs_a_breve = g.min_abs_one_minus_rr = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.size(); ++i) {
        g.min_abs_a = std::min(g.min_abs_a, std::abs(d.a[i]));
        g.min_abs_a_breve = std::min(g.min_abs_a_breve, std::abs(d.a_breve[i]));
        g.min_abs_one_minus_rr = std::min(g.min_abs_one_minus_rr, std::abs(1.0 - d.r[i] * d.r_breve[i]));
    }
    g.radius = radius > 0 ? radius : std::max(std::abs(d.z.front()), std::abs(d.z.back()));
    const std::size_t m = 128;
    std::vector<Complex> upper, lower;
    // upper: -R -> R along the axis, back over the arc; lower: -R over the lower arc to R, back along the axis.
    for (std::size_t k = 0; k <= m; ++k) upper.push_back(-g.radius + 2 * g.radius * double(k) / m);
    for (std::size_t k = 1; k <= m; ++k) upper.push_back(g.radius * std::exp(I * (pi * double(k) / m)));
    for (std::size_t k = 0; k <= m; ++k) lower.push_back(g.radius * std::exp(-I * (pi - pi * double(k) / m)));
    for (std::size_t k = 1; k <= m; ++k) lower.push_back(g.radius - 2 * g.radius * double(k) / m);
    if (g.min_abs_a > 0 && g.min_abs_a_breve > 0) {
        g.winding_a = detail::winding_number([&](Complex z) { return a_analytic(p, z, opt); }, upper);
        g.winding_a_breve = detail::winding_number([&](Complex z) { return a_breve_analytic(p, z, opt); }, lower);
    }
    if (g.min_abs_a < opt.eps_a) g.reasons.push_back("min |a| = " + fmt_num(g.min_abs_a) + " below eps_a");
    if (g.min_abs_a_breve < opt.eps_a)
        g.reasons.push_back("min |a~| = " + fmt_num(g.min_abs_a_breve) + " below eps_a");
    if (g.min_abs_one_minus_rr < opt.eps_generic)
        g.reasons.push_back("min |1 - r r~| = " + fmt_num(g.min_abs_one_minus_rr) + " below eps_gen");
    if (g.winding_a != 0) g.reasons.push_back("a(z) has " + std::to_string(g.winding_a) + " zero(s) in the upper half-plane");
    if (g.winding_a_breve != 0)
        g.reasons.push_back("a~(z) has " + std::to_string(g.winding_a_breve) + " zero(s) in the lower half-plane");
    g.passed = g.reasons.empty();
    return g;
}

inline void require_generic(const GenericityReport& g) {
    if (!g.passed) {
        std::string msg = "genericity check failed:";
        for (auto& r : g.reasons) msg += " " + r + ";";
        throw GenericityViolation(msg);
    }
}

// Time-t0 reflection data: r e^{4iz^2 t0}, r~ e^{-4iz^2 t0}; a and a~ unchanged.
inline ScatteringData evolve_reflection(ScatteringData d, double t0) {
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double z = d.z[i];
        const Complex ph = std::exp(4.0 * I * z * z * t0);
        d.r[i] *= ph;
        d.r_breve[i] /= ph;
        d.b[i] = d.r[i] * d.a[i];
        d.b_breve[i] = d.r_breve[i] * d.a_breve[i];
    }
    return d;
}

inline void write_scattering_csv(std::ostream& os, const ScatteringData& d) {
    os << "z,re_a,im_a,re_b,im_b,re_abreve,im_abreve,re_bbreve,im_bbreve,re_r,im_r,re_rbreve,im_rbreve\n";
    char buf[64];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << (last ? '\n' : ',');
    };
    for (std::size_t i = 0; i < d.size(); ++i) {
        put(d.z[i]);
        for (Complex c : {d.a[i], d.b[i], d.a_breve[i], d.b_breve[i], d.r[i]}) put(c.real()), put(c.imag());
        put(d.r_breve[i].real()), put(d.r_breve[i].imag(), true);
    }
}

}  // namespace nnls
