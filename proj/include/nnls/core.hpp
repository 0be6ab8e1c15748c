#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nnls {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex I{0.0, 1.0};

// Dense 2x2 complex matrix, row-major.
struct Mat2 {
    Complex a11{}, a12{}, a21{}, a22{};

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 zero() { return {}; }

    Complex det() const { return a11 * a22 - a12 * a21; }
    Complex trace() const { return a11 + a22; }

    // Max-abs entry; cheap norm for error control.
    double norm_inf() const {
        return std::max(std::max(std::abs(a11), std::abs(a12)), std::max(std::abs(a21), std::abs(a22)));
    }

    Mat2& operator+=(const Mat2& o) {
        a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22;
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22;
        return *this;
    }
    Mat2& operator*=(Complex s) {
        a11 *= s; a12 *= s; a21 *= s; a22 *= s;
        return *this;
    }
};

inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
inline Mat2 operator*(Mat2 a, Complex s) { return a *= s; }
inline Mat2 operator*(Complex s, Mat2 a) { return a *= s; }
inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}
inline Mat2 inverse(const Mat2& m) {
    const Complex d = m.det();
    return {m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}
inline Mat2 diag(Complex d1, Complex d2) { return {d1, 0.0, 0.0, d2}; }

// Pair of complex numbers (a column, or a value with its derivative).
struct Vec2 {
    Complex u{}, v{};
};
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.u + b.u, a.v + b.v}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.u - b.u, a.v - b.v}; }
inline Vec2 operator*(const Vec2& a, Complex s) { return {a.u * s, a.v * s}; }
inline Vec2 operator*(const Mat2& m, const Vec2& x) { return {m.a11 * x.u + m.a12 * x.v, m.a21 * x.u + m.a22 * x.v}; }
inline Complex det(const Vec2& c1, const Vec2& c2) { return c1.u * c2.v - c2.u * c1.v; }

// Errors. Every failure mode the toolkit reports is a distinct type so
// callers (and the CLI exit-code mapping) can tell them apart.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, unknown kind, inconsistent sizes.
struct InvalidInput : Error { using Error::Error; };
struct MissingInputs : Error { using Error::Error; };
struct NonpositiveTime : InvalidInput { using InvalidInput::InvalidInput; };

// Data-level failures (exit code 2).
struct GenericityViolation : Error { using Error::Error; };

// Numerical failures (exit code 3).
struct NumericalFailure : Error { using Error::Error; };
struct IntegratorDivergence : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct TruncationTooSmall : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct NotPiecewiseConstant : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct BranchViolation : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct CutEvaluation : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct QuadratureFailure : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct OutOfValidityBox : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct SeriesNonConvergence : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct WindowExceeded : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct ValidityViolation : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct BoundaryContamination : NumericalFailure { using NumericalFailure::NumericalFailure; };
struct StepTooLarge : NumericalFailure { using NumericalFailure::NumericalFailure; };

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace nnls
