#pragma once

// Leading long-time term q(x, t) ~ alpha(xi, t) t^{Im nu - 1/2}, xi = -x/(4t).

#include "core.hpp"
#include "gamma.hpp"
#include "model.hpp"
#include "phase.hpp"

#include <map>
#include <mutex>
#include <string>

namespace nnls {

struct AsymptoticOptions {
    double t_min = 10.0;
    double im_nu_bound = 0.25;  // |Im nu| at or above this is refused
    double eps_margin = 0.02;
};

enum class Validity { valid, marginal, invalid };

inline std::string to_string(Validity v) {
    switch (v) {
        case Validity::valid: return "valid";
        case Validity::marginal: return "marginal";
        case Validity::invalid: return "invalid";
    }
    return "?";
}

struct AsymptoticEvaluation {
    double x = 0, t = 0, xi = 0;
    Complex nu{};
    Complex alpha{};
    Complex q_leading{};
    double im_nu = 0;
    Validity validity = Validity::valid;
    std::string remainder = "O(t^-3/4)";
};

inline Validity classify(Complex nu, const AsymptoticOptions& o) {
    const double m = std::abs(nu.imag());
    if (m >= o.im_nu_bound) return Validity::invalid;
    if (m >= o.im_nu_bound - o.eps_margin) return Validity::marginal;
    return Validity::valid;
}

// alpha = sqrt(pi) e^{-pi nu/2 + i pi/4 + 4 i t xi^2} t^{-i Re nu} delta0^2 / (r(xi) 8^{i nu} Gamma(-i nu))
inline Complex alpha(Complex r_xi, Complex r_breve_xi, const PhaseData& ph, double t, const AsymptoticOptions& o = {},
                     double eps_degenerate = 1e-8) {
    if (!(t > 0)) throw NonpositiveTime("alpha needs t > 0");
    const Complex nu = ph.nu_at_xi;
    if (classify(nu, o) == Validity::invalid)
        throw ValidityViolation("|Im nu(xi)| = " + fmt_num(std::abs(nu.imag())) + " is at or above 1/4 at xi=" +
                                fmt_num(ph.xi));
    const double xi = ph.xi;
    const Complex pre = std::sqrt(pi) * std::exp(-pi * nu / 2.0 + I * pi / 4.0 + 4.0 * I * t * xi * xi) *
                        std::exp(-I * nu.real() * std::log(t)) * ph.delta0 * ph.delta0 /
                        std::exp(I * nu * std::log(8.0));
    if (std::abs(r_xi) >= eps_degenerate && std::abs(nu) >= eps_degenerate) return pre * rgamma(-I * nu) / r_xi;
    // 1/(r Gamma(-i nu)) = -i (nu/r) / Gamma(1 - i nu), nu/r = r~ (-log(1-w)/w) / (2 pi)
    const Complex nu_over_r = r_breve_xi * detail::log_ratio(r_xi * r_breve_xi) / (2 * pi);
    return pre * (-I) * nu_over_r / gamma(1.0 - I * nu);
}

inline Complex q_from_alpha(Complex a, Complex nu, double t) { return a * std::exp((nu.imag() - 0.5) * std::log(t)); }

// Holds the nu profile of one data set and memoises phase data per xi.
class AsymptoticSolver {
public:
    explicit AsymptoticSolver(const ScatteringData& d, AsymptoticOptions o = {}, PhaseOptions po = {})
        : profile_(d, po), opt_(o) {}

    const NuProfile& profile() const { return profile_; }
    const AsymptoticOptions& options() const { return opt_; }

    PhaseData phase(double xi) const {
        {
            std::lock_guard lock(mutex_);
            auto it = cache_.find(xi);
            if (it != cache_.end()) return it->second;
        }
        PhaseData p = compute_phase_data(profile_, xi);
        std::lock_guard lock(mutex_);
        return cache_.emplace(xi, p).first->second;
    }

    Complex alpha(double xi, double t) const {
        const PhaseData p = phase(xi);
        return nnls::alpha(profile_.r(xi), profile_.r_breve(xi), p, t, opt_);
    }

    ModelCoefficients model(double xi, double t) const {
        const PhaseData p = phase(xi);
        return connection_coefficients(profile_.r(xi), profile_.r_breve(xi), p.nu_at_xi, p.delta0, xi, t);
    }

    // Second route: q ~ 2 beta1 / sqrt(8t)
    Complex q_via_model(double x, double t) const {
        const double xi = stationary_point(x, t);
        check(xi, t);
        return 2.0 * model(xi, t).beta1 / std::sqrt(8.0 * t);
    }

    AsymptoticEvaluation evaluate(double x, double t) const {
        AsymptoticEvaluation e;
        e.x = x, e.t = t;
        e.xi = stationary_point(x, t);
        check(e.xi, t);
        const PhaseData p = phase(e.xi);
        e.nu = p.nu_at_xi;
        e.im_nu = e.nu.imag();
        e.validity = classify(e.nu, opt_);
        e.alpha = nnls::alpha(profile_.r(e.xi), profile_.r_breve(e.xi), p, t, opt_);
        e.q_leading = q_from_alpha(e.alpha, e.nu, t);
        return e;
    }

private:
    void check(double xi, double t) const {
        if (t < opt_.t_min) throw WindowExceeded("t=" + fmt_num(t) + " is below t_min=" + fmt_num(opt_.t_min));
        if (!(xi - 1.0 > profile_.front() && xi < profile_.back()))
            throw WindowExceeded("xi=" + fmt_num(xi) + " is outside the spectral window interior");
    }

    NuProfile profile_;
    AsymptoticOptions opt_;
    mutable std::mutex mutex_;
    mutable std::map<double, PhaseData> cache_;
};

inline AsymptoticEvaluation q_asymptotic(double x, double t, const ScatteringData& d, const AsymptoticOptions& o = {}) {
    return AsymptoticSolver(d, o).evaluate(x, t);
}

}  // namespace nnls
