#pragma once

// Parabolic-cylinder model problem at the stationary point.
//
// Jump on the real zeta axis: Psi_+ = Psi_- V, V = [[1 - r0 r0~, -r0~], [r0, 1]],
// normalisation Psi e^{i zeta^2/4 sigma3} zeta^{-i nu sigma3} -> I, with
//   r0  = r(xi)  delta0^{-2} (8t)^{ i nu} e^{-4 i t xi^2},
//   r0~ = r~(xi) delta0^{2}  (8t)^{-i nu} e^{ 4 i t xi^2}.

#include "core.hpp"
#include "gamma.hpp"
#include "weber.hpp"

#include <ostream>

namespace nnls {

struct ModelCoefficients {
    double xi = 0, t = 0;
    Complex nu{}, delta0{1.0};
    Complex r_at_xi{}, r_breve_at_xi{};
    Complex rho0{}, rho0_breve{};  // r0, r0~ above
    Complex beta1{}, beta2{};      // beta1 = beta_12, beta2 = beta_21 = nu / beta1
    bool degenerate = false;       // evaluated through the stabilised nu / r form
};

namespace detail {
// -log(1 - w) / w, finite at w = 0
inline Complex log_ratio(Complex w) {
    if (std::abs(w) < 1e-4) return 1.0 + w * (0.5 + w * (1.0 / 3.0 + w * 0.25));
    return -std::log(1.0 - w) / w;
}
}  // namespace detail

inline ModelCoefficients connection_coefficients(Complex r_xi, Complex r_breve_xi, Complex nu, Complex delta0, double xi,
                                                 double t, double eps_degenerate = 1e-8) {
    if (!(t > 0)) throw NonpositiveTime("connection coefficients need t > 0");
    ModelCoefficients c;
    c.xi = xi, c.t = t, c.nu = nu, c.delta0 = delta0, c.r_at_xi = r_xi, c.r_breve_at_xi = r_breve_xi;
    const Complex p8 = std::exp(I * nu * std::log(8.0 * t));  // (8t)^{i nu}
    const Complex ph = std::exp(4.0 * I * t * xi * xi);
    const Complex d2 = delta0 * delta0;
    c.rho0 = r_xi / d2 * p8 / ph;
    c.rho0_breve = r_breve_xi * d2 / p8 * ph;
    const double s2p = std::sqrt(2 * pi);
    const Complex e_pos = std::exp(I * pi / 4.0), e_neg = std::exp(-I * pi / 4.0);
    const Complex g1 = gamma(1.0 - I * nu);
    c.beta2 = c.rho0 * e_pos * std::exp(pi * nu / 2.0) * g1 / s2p;
    c.degenerate = std::abs(r_xi) < eps_degenerate || std::abs(nu) < eps_degenerate;
    if (!c.degenerate) {
        c.beta1 = s2p * e_pos * std::exp(-pi * nu / 2.0) * rgamma(-I * nu) / c.rho0;
    } else {
        // nu / r0 without the 0/0: nu / r(xi) = r~(xi) (-log(1-w)/w) / (2 pi), w = r r~
        const Complex nu_over_r = r_breve_xi * detail::log_ratio(r_xi * r_breve_xi) / (2 * pi);
        const Complex nu_over_r0 = nu_over_r * d2 / p8 * ph;
        c.beta1 = s2p * e_neg * std::exp(-pi * nu / 2.0) * nu_over_r0 / g1;
        if (c.beta2 == Complex{}) return c;
    }
    if (c.beta1 != Complex{} && !c.degenerate) c.beta2 = nu / c.beta1;
    return c;
}

inline Mat2 jump_matrix(const ModelCoefficients& c) {
    return {1.0 - c.rho0 * c.rho0_breve, -c.rho0_breve, c.rho0, 1.0};
}

enum class HalfPlane { upper, lower };

struct ModelMatrix {
    Complex zeta{};
    Mat2 Psi{};
    HalfPlane half_plane = HalfPlane::upper;
};

// Psi in the given half-plane's representation (entire in zeta, so this also
// yields the boundary values on the real axis).
inline Mat2 psi_branch(Complex zeta, const ModelCoefficients& c, HalfPlane hp) {
    const Complex nu = c.nu, a = I * nu;
    Complex cz, f, dz, g;
    if (hp == HalfPlane::upper) {
        cz = std::exp(-3.0 * I * pi / 4.0), f = std::exp(-3.0 * pi * nu / 4.0);
        dz = std::exp(-I * pi / 4.0), g = std::exp(pi * nu / 4.0);
    } else {
        cz = std::exp(I * pi / 4.0), f = std::exp(pi * nu / 4.0);
        dz = std::exp(3.0 * I * pi / 4.0), g = std::exp(-3.0 * pi * nu / 4.0);
    }
    const Complex eta1 = cz * zeta, eta2 = dz * zeta;
    if (std::abs(a) > weber_max_order || std::abs(zeta) > weber_max_argument)
        throw OutOfValidityBox("psi: order or argument outside the parabolic-cylinder validity box");
    // Off-diagonal entries use D_a' = -(eta/2) D_a + a D_{a-1}, which collapses
    // the first-order combinations to a single D of order a - 1.
    Mat2 m;
    m.a11 = f * weber_d_unchecked(a, eta1);
    m.a21 = I * c.beta2 * f * cz * weber_d_unchecked(a - 1.0, eta1);
    m.a22 = g * weber_d_unchecked(-a, eta2);
    m.a12 = -I * c.beta1 * g * dz * weber_d_unchecked(-a - 1.0, eta2);
    return m;
}

inline ModelMatrix psi(Complex zeta, const ModelCoefficients& c) {
    const HalfPlane hp = zeta.imag() >= 0 ? HalfPlane::upper : HalfPlane::lower;
    return {zeta, psi_branch(zeta, c, hp), hp};
}

// Psi(zeta) e^{i zeta^2/4 sigma3} zeta^{-i nu sigma3}; tends to I + m1/zeta.
inline Mat2 psi_normalized(Complex zeta, const ModelCoefficients& c) {
    const Mat2 p = psi(zeta, c).Psi;
    const Complex e = std::exp(I * zeta * zeta / 4.0) * std::exp(-I * c.nu * std::log(zeta));
    return p * diag(e, 1.0 / e);
}

inline void write_psi_csv(std::ostream& os, const std::vector<ModelMatrix>& rows) {
    os << "re_zeta,im_zeta,re_psi11,im_psi11,re_psi12,im_psi12,re_psi21,im_psi21,re_psi22,im_psi22\n";
    char buf[64];
    for (const auto& r : rows) {
        const Complex v[5] = {r.zeta, r.Psi.a11, r.Psi.a12, r.Psi.a21, r.Psi.a22};
        for (int k = 0; k < 5; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", v[k].real(), v[k].imag());
            os << buf << (k == 4 ? '\n' : ',');
        }
    }
}

}  // namespace nnls
