#pragma once

// Phase objects of the steepest-descent deformation: nu(s), delta(z), beta(z, xi), delta0(xi).

#include "core.hpp"
#include "interp.hpp"
#include "quadrature.hpp"
#include "scattering.hpp"

#include <json.hpp>

namespace nnls {

inline double stationary_point(double x, double t) {
    if (!(t > 0)) throw NonpositiveTime("stationary point needs t > 0");
    return -x / (4.0 * t);
}

struct PhaseOptions {
    QuadratureOptions quad{};
    double eps_generic = 1e-6;
    double tail_band = 0.05;  // leftmost fraction of the window used to fit nu ~ C / s^2
};

// nu(s) = -log(1 - r r~) / (2 pi) with r, r~ spline-interpolated and the
// argument unwrapped from the left end of the grid.
class NuProfile {
public:
    NuProfile() = default;
    explicit NuProfile(const ScatteringData& d, PhaseOptions o = {}) : opt_(o) {
        if (d.size() < 4) throw InvalidInput("phase: scattering grid too small");
        const double h = (d.z.back() - d.z.front()) / double(d.size() - 1);
        r_ = UniformSpline(d.z.front(), h, d.r);
        rb_ = UniformSpline(d.z.front(), h, d.r_breve);
        unwrapped_.resize(d.size());
        double prev = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) {
            const Complex w = 1.0 - d.r[k] * d.r_breve[k];
            if (std::abs(w) < opt_.eps_generic)
                throw GenericityViolation("1 - r r~ vanishes near s=" + fmt_num(d.z[k]));
            double a = std::arg(w);
            if (k > 0) a += 2 * pi * std::round((prev - a) / (2 * pi));
            unwrapped_[k] = prev = a;
            branch_max_arg_ = std::max(branch_max_arg_, std::abs(a));
        }
        if (branch_max_arg_ >= pi) throw BranchViolation("unwrapped arg(1 - r r~) reaches pi");
        // Tail model nu ~ C / s^2 beyond the left edge of the window.
        const std::size_t band = std::max<std::size_t>(2, std::size_t(opt_.tail_band * double(d.size())));
        Complex sum{};
        for (std::size_t k = 0; k < band; ++k) {
            const Complex v = nu(d.z[k]) * d.z[k] * d.z[k];
            sum += v;
            tail_max_ = std::max(tail_max_, std::abs(v));
        }
        tail_mean_ = sum / double(band);
    }

    double front() const { return r_.front(); }
    double back() const { return r_.back(); }
    double spacing() const { return r_.spacing(); }
    double branch_max_arg() const { return branch_max_arg_; }
    const PhaseOptions& options() const { return opt_; }
    Complex tail_coefficient() const { return tail_mean_; }
    double tail_bound_coefficient() const { return tail_max_; }

    Complex r(double s) const { return r_(s); }
    Complex r_breve(double s) const { return rb_(s); }

    Complex nu(double s) const {
        const Complex w = 1.0 - r_(s) * rb_(s);
        if (std::abs(w) < opt_.eps_generic) throw GenericityViolation("1 - r r~ vanishes near s=" + fmt_num(s));
        // branch: nearest to the interpolated unwrapped argument
        const double u = std::clamp((s - front()) / spacing(), 0.0, double(unwrapped_.size() - 1));
        const std::size_t i = std::min<std::size_t>(std::size_t(u), unwrapped_.size() - 2);
        const double t = u - double(i);
        const double ref = (1 - t) * unwrapped_[i] + t * unwrapped_[i + 1];
        double a = std::arg(w);
        a += 2 * pi * std::round((ref - a) / (2 * pi));
        if (std::abs(a) >= pi) throw BranchViolation("arg(1 - r r~) reaches pi at s=" + fmt_num(s));
        return -Complex(std::log(std::abs(w)), a) / (2 * pi);
    }

    // Knots inside (a, b), used as quadrature cut points.
    std::vector<double> knots_between(double a, double b) const {
        std::vector<double> k;
        const double lo = std::min(a, b), hi = std::max(a, b);
        const long i0 = long(std::ceil((lo - front()) / spacing()));
        const long i1 = long(std::floor((hi - front()) / spacing()));
        for (long i = std::max(0L, i0); i <= i1 && i < long(r_.size()); ++i) k.push_back(r_.knot(std::size_t(i)));
        return k;
    }

    // Analytic tail beyond the left window edge m: int_{-inf}^{m} (C/s^2) / (s - z) ds.
    Complex tail_cauchy(Complex z) const {
        if (tail_mean_ == Complex{}) return 0.0;
        const double m = front();
        auto f = [&](double u) { return -tail_mean_ * u / (m * (m - z * u)); };
        QuadratureOptions q = opt_.quad;
        return integrate_pieces(f, 0.0, 1.0, {}, q).value;
    }

private:
    PhaseOptions opt_{};
    UniformSpline r_, rb_;
    std::vector<double> unwrapped_;
    double branch_max_arg_ = 0.0;
    Complex tail_mean_{};
    double tail_max_ = 0.0;
};

namespace detail {

inline void require_in_window(const NuProfile& p, double xi) {
    if (!(xi - 1.0 > p.front() && xi < p.back()))
        throw WindowExceeded("xi=" + fmt_num(xi) + " is outside the interior of the spectral window");
}

inline bool on_cut(Complex z, double xi) { return z.imag() == 0.0 && z.real() <= xi; }

// I(z) = int_{-inf}^{xi} nu(s)/(s - z) ds, with the value at c = clamp(Re z) subtracted.
inline Complex cauchy_nu(const NuProfile& p, double xi, Complex z) {
    const double m = p.front();
    const double c = std::clamp(z.real(), m, xi);
    const Complex nc = p.nu(c);
    auto f = [&](double s) { return (p.nu(s) - nc) / (s - z); };
    auto cuts = p.knots_between(m, xi);
    cuts.push_back(c);
    const Complex j1 = integrate_pieces(f, m, xi, cuts, p.options().quad).value;
    const Complex j2 = nc * (std::log(Complex(xi) - z) - std::log(Complex(m) - z));
    return j1 + j2 + p.tail_cauchy(z);
}

}  // namespace detail

inline Complex nu_at(const NuProfile& p, double s) {
    if (s < p.front() || s > p.back()) throw WindowExceeded("nu requested outside the spectral window");
    return p.nu(s);
}

// delta(z) = exp( i int_{-inf}^{xi} nu(s)/(s - z) ds ), z off (-inf, xi].
inline Complex delta(const NuProfile& p, double xi, Complex z) {
    detail::require_in_window(p, xi);
    if (detail::on_cut(z, xi)) throw CutEvaluation("delta evaluated on the cut (-inf, xi]");
    return std::exp(I * detail::cauchy_nu(p, xi, z));
}

// z (delta(z) - 1), computed without cancellation for large |z|.
inline Complex delta_moment(const NuProfile& p, double xi, Complex z) {
    detail::require_in_window(p, xi);
    if (detail::on_cut(z, xi)) throw CutEvaluation("delta evaluated on the cut (-inf, xi]");
    const Complex w = I * detail::cauchy_nu(p, xi, z);
    // expm1 for complex argument
    const Complex em1 = std::abs(w) < 1e-5 ? w * (1.0 + w / 2.0 * (1.0 + w / 3.0 * (1.0 + w / 4.0))) : std::exp(w) - 1.0;
    return z * em1;
}

enum class BoundarySide { plus, minus };

// delta_+(s) (from above) or delta_-(s) (from below) for s in the interior of (-inf, xi).
inline Complex delta_boundary(const NuProfile& p, double xi, double s, BoundarySide side) {
    detail::require_in_window(p, xi);
    if (!(s > p.front() && s < xi)) throw InvalidInput("boundary value requested off the open cut");
    const double eps = 1e-6 * (1.0 + std::abs(xi));
    const double sg = side == BoundarySide::plus ? 1.0 : -1.0;
    const Complex l1 = detail::cauchy_nu(p, xi, Complex(s, sg * eps));
    const Complex l2 = detail::cauchy_nu(p, xi, Complex(s, sg * eps / 2));
    return std::exp(I * (2.0 * l2 - l1));
}

// beta(z, xi) = int_{-inf}^{xi} (nu(s) - chi(s) nu(xi)) / (s - z) ds - nu(xi) Log(z - xi + 1),
// chi the indicator of [xi - 1, xi]. Finite at z = xi.
inline Complex beta(const NuProfile& p, double xi, Complex z) {
    detail::require_in_window(p, xi);
    if (z.imag() == 0.0 && z.real() < xi) throw CutEvaluation("beta evaluated on the cut (-inf, xi)");
    const double m = p.front();
    const double split = xi - 1.0;
    const Complex nx = p.nu(xi);
    const auto& q = p.options().quad;

    // [m, xi - 1], with the same subtraction as delta
    const double c = std::clamp(z.real(), m, split);
    const Complex nc = p.nu(c);
    auto f1 = [&](double s) { return (p.nu(s) - nc) / (s - z); };
    auto cuts = p.knots_between(m, split);
    cuts.push_back(c);
    const Complex p1 = integrate_pieces(f1, m, split, cuts, q).value +
                       nc * (std::log(Complex(split) - z) - std::log(Complex(m) - z));

    // [xi - 1, xi] in u with s = xi - u^2
    auto f2 = [&](double u) {
        const double s = xi - u * u;
        const Complex dz = Complex(s) - z;
        if (dz == Complex{}) return Complex{};
        return 2.0 * u * (p.nu(s) - nx) / dz;
    };
    std::vector<double> ucuts;
    for (double s : p.knots_between(split, xi)) ucuts.push_back(std::sqrt(std::max(0.0, xi - s)));
    if (z.real() < xi && z.real() > split) ucuts.push_back(std::sqrt(xi - z.real()));
    const Complex p2 = integrate_pieces(f2, 0.0, 1.0, ucuts, q).value;

    return p1 + p2 - nx * std::log(z - xi + 1.0) + p.tail_cauchy(z);
}

inline Complex delta0(const NuProfile& p, double xi) { return std::exp(I * beta(p, xi, Complex(xi))); }

struct TailIntegral {
    Complex value{};
    double error = 0.0;  // quadrature error plus a bound on the modelled tail
};

// int_{-inf}^{xi} nu(s) ds
inline TailIntegral nu_tail_integral(const NuProfile& p, double xi) {
    detail::require_in_window(p, xi);
    const double m = p.front();
    auto f = [&](double s) { return p.nu(s); };
    const auto in = integrate_pieces(f, m, xi, p.knots_between(m, xi), p.options().quad);
    TailIntegral t;
    t.value = in.value + p.tail_coefficient() / std::abs(m);
    t.error = in.error + p.tail_bound_coefficient() / std::abs(m);
    return t;
}

struct PhaseData {
    double xi = 0;
    Complex nu_at_xi{};
    Complex delta0{};
    Complex nu_tail_integral{};
    double nu_tail_error = 0;
    double branch_max_arg = 0;
};

inline PhaseData compute_phase_data(const NuProfile& p, double xi) {
    PhaseData d;
    d.xi = xi;
    d.nu_at_xi = nu_at(p, xi);
    d.delta0 = delta0(p, xi);
    const auto t = nu_tail_integral(p, xi);
    d.nu_tail_integral = t.value;
    d.nu_tail_error = t.error;
    d.branch_max_arg = p.branch_max_arg();
    return d;
}

inline nlohmann::json to_json(const PhaseData& d) {
    return {{"xi", d.xi},
            {"nu", complex_to_json(d.nu_at_xi)},
            {"delta0", complex_to_json(d.delta0)},
            {"nu_tail", complex_to_json(d.nu_tail_integral)},
            {"branch_max_arg", d.branch_max_arg}};
}

// Convenience forms on raw scattering data.
inline Complex nu_at(const ScatteringData& d, double s) { return nu_at(NuProfile(d), s); }
inline Complex delta(const ScatteringData& d, double xi, Complex z) { return delta(NuProfile(d), xi, z); }
inline Complex beta(const ScatteringData& d, double xi, Complex z) { return beta(NuProfile(d), xi, z); }
inline Complex delta0(const ScatteringData& d, double xi) { return delta0(NuProfile(d), xi); }
inline TailIntegral nu_tail_integral(const ScatteringData& d, double xi) { return nu_tail_integral(NuProfile(d), xi); }

}  // namespace nnls
