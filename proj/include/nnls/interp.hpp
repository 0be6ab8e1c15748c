#pragma once

// Natural cubic spline through complex samples on a uniform grid.

#include "core.hpp"

#include <vector>

namespace nnls {

class UniformSpline {
public:
    UniformSpline() = default;
    UniformSpline(double x0, double h, std::vector<Complex> y) : x0_(x0), h_(h), y_(std::move(y)) {
        const std::size_t n = y_.size();
        if (n < 2 || !(h > 0)) throw InvalidInput("spline needs at least two samples and a positive spacing");
        m_.assign(n, Complex{});
        if (n == 2) return;
        // Tridiagonal solve for second derivatives, natural ends (m_0 = m_{n-1} = 0).
        const std::size_t k = n - 2;
        std::vector<double> c(k);
        std::vector<Complex> d(k);
        const double f = 6.0 / (h * h);
        for (std::size_t i = 0; i < k; ++i) d[i] = f * (y_[i] - 2.0 * y_[i + 1] + y_[i + 2]);
        // diagonal 4, off-diagonals 1
        c[0] = 1.0 / 4.0;
        d[0] /= 4.0;
        for (std::size_t i = 1; i < k; ++i) {
            const double den = 4.0 - c[i - 1];
            c[i] = 1.0 / den;
            d[i] = (d[i] - d[i - 1]) / den;
        }
        for (std::size_t i = k - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
        for (std::size_t i = 0; i < k; ++i) m_[i + 1] = d[i];
    }

    double front() const { return x0_; }
    double back() const { return x0_ + h_ * double(y_.size() - 1); }
    double spacing() const { return h_; }
    std::size_t size() const { return y_.size(); }
    const std::vector<Complex>& values() const { return y_; }
    double knot(std::size_t i) const { return x0_ + h_ * double(i); }

    // Evaluates inside [front, back]; clamps to the end intervals outside.
    Complex operator()(double x) const {
        const double u = (x - x0_) / h_;
        std::size_t i = u <= 0 ? 0 : std::min<std::size_t>(std::size_t(u), y_.size() - 2);
        const double t = u - double(i);
        const double s = 1.0 - t;
        const double h2 = h_ * h_ / 6.0;
        return s * y_[i] + t * y_[i + 1] + h2 * ((s * s * s - s) * m_[i] + (t * t * t - t) * m_[i + 1]);
    }

private:
    double x0_ = 0, h_ = 1;
    std::vector<Complex> y_;
    std::vector<Complex> m_;
};

}  // namespace nnls
