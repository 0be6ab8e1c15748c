#pragma once

#include "core.hpp"

#include <array>

namespace nnls {

namespace detail {
// Godfrey's coefficients, g = 607/128, 15 terms.
inline constexpr double lanczos_g = 607.0 / 128.0;
inline constexpr std::array<double, 15> lanczos_c = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,  .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5};

inline Complex lanczos_log_gamma_right(Complex z) {
    // valid for Re z >= 1/2
    z -= 1.0;
    Complex x = lanczos_c[0];
    for (std::size_t i = 1; i < lanczos_c.size(); ++i) x += lanczos_c[i] / (z + double(i));
    const Complex t = z + lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}
}  // namespace detail

// log Gamma(z) on the principal-ish branch (imaginary part is not unwrapped).
inline Complex log_gamma(Complex z) {
    if (z.real() < 0.5) {
        // reflection: Gamma(z)Gamma(1-z) = pi / sin(pi z)
        return std::log(pi) - std::log(std::sin(pi * z)) - detail::lanczos_log_gamma_right(1.0 - z);
    }
    return detail::lanczos_log_gamma_right(z);
}

inline Complex gamma(Complex z) {
    if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma(1.0 - z));
    return std::exp(detail::lanczos_log_gamma_right(z));
}

// 1/Gamma(z), entire: exactly zero at the poles.
inline Complex rgamma(Complex z) {
    if (z.real() < 0.5) {
        return std::sin(pi * z) * gamma(1.0 - z) / pi;
    }
    return std::exp(-detail::lanczos_log_gamma_right(z));
}

}  // namespace nnls
