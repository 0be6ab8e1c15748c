#pragma once

// Globally adaptive Gauss-Kronrod (15-point rule from Boost) for complex
// integrands, with combined absolute/relative tolerance.

#include "core.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <queue>
#include <vector>

namespace nnls {

struct QuadratureOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-15;
    std::size_t max_intervals = 4000;  // subdivisions beyond the initial pieces
};

struct QuadratureResult {
    Complex value{};
    double error = 0.0;
};

namespace detail {
// Global adaptivity over all pieces: always split the worst interval.
template <class F>
QuadratureResult adaptive_gk(F& f, const std::vector<double>& pts, const QuadratureOptions& o) {
    using boost::math::quadrature::gauss_kronrod;
    struct Piece {
        double a, b;
        Complex v;
        double e;
        bool operator<(const Piece& other) const { return e < other.e; }
    };
    auto rule = [&](double lo, double hi) {
        double err = 0;
        const Complex v = gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0.0, &err);
        // Boost reports the non-adaptive error on the reference interval [-1, 1].
        return Piece{lo, hi, v, err * 0.5 * (hi - lo)};
    };
    std::priority_queue<Piece> heap;
    Complex total{};
    double err = 0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        heap.push(rule(pts[k], pts[k + 1]));
        total += heap.top().v;
    }
    {
        auto copy = heap;
        total = 0;
        while (!copy.empty()) total += copy.top().v, err += copy.top().e, copy.pop();
    }
    const std::size_t budget = heap.size() + o.max_intervals;
    while (err > std::max(o.abs_tol, o.rel_tol * std::abs(total))) {
        if (heap.size() >= budget)
            throw QuadratureFailure("adaptive quadrature exceeded its interval budget on [" + fmt_num(pts.front()) +
                                    ", " + fmt_num(pts.back()) + "], error estimate " + fmt_num(err));
        const Piece p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) throw QuadratureFailure("adaptive quadrature cannot subdivide further");
        const Piece l = rule(p.a, mid), r = rule(mid, p.b);
        total += l.v + r.v - p.v;
        err += l.e + r.e - p.e;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to shed accumulated rounding in the running totals
    Complex v{};
    double e = 0;
    while (!heap.empty()) v += heap.top().v, e += heap.top().e, heap.pop();
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw QuadratureFailure("non-finite integrand");
    return {v, e};
}
}  // namespace detail

// Integrates f over [a, b], splitting at every point of `cuts` that lies inside.
template <class F>
QuadratureResult integrate_pieces(F&& f, double a, double b, std::vector<double> cuts, const QuadratureOptions& o) {
    QuadratureResult res;
    if (a == b) return res;
    const double sgn = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    std::vector<double> pts{lo};
    std::sort(cuts.begin(), cuts.end());
    const double gap = 1e-13 * std::max(1.0, hi - lo);
    for (double c : cuts)
        if (c > pts.back() + gap && c < hi - gap) pts.push_back(c);
    pts.push_back(hi);
    res = detail::adaptive_gk(f, pts, o);
    res.value *= sgn;
    return res;
}

}  // namespace nnls
