#pragma once

// Strang split-step Fourier solver for i q_t + q_xx + 2 sigma q^2 conj(q(-x)) = 0
// on the periodic grid x_j = -L + j dx, dx = 2L/N. The reflection x -> -x maps
// node j to node (N - j) mod N, so the nonlocal term is exact on the grid.

#include "core.hpp"
#include "potential.hpp"

#include <fftw3.h>

#include <bit>
#include <functional>
#include <mutex>
#include <ostream>
#include <vector>

namespace nnls {

namespace detail {
// FFTW's planner is not re-entrant.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

struct PdeOptions {
    double half_width = 512.0;  // L
    std::size_t points = 32768; // N
    double dt = 5e-3;
    double contamination_tol = 1e-6;  // outer-band |q|^2 mass / total
    double outer_band = 0.1;          // fraction of the half-width
    double step_limit = 0.5;          // dt * k_max^2
    double spectral_floor = 1e-10;    // k_max = largest |k| with |q^(k)| above this fraction of the peak
    bool check_boundary = true;
};

struct FieldSnapshot {
    double t = 0;
    double half_width = 0;
    int sigma = 1;
    std::vector<Complex> q;
    Complex nonlocal_mass{};
    std::size_t steps = 0;

    std::size_t size() const { return q.size(); }
    double dx() const { return 2.0 * half_width / double(q.size()); }
    double x(std::size_t j) const { return -half_width + double(j) * dx(); }
};

// dx * sum_j q_j conj(q_{-j})
inline Complex nonlocal_mass(const std::vector<Complex>& q, double dx) {
    const std::size_t n = q.size();
    Complex s{};
    for (std::size_t j = 0; j < n; ++j) s += q[j] * std::conj(q[(n - j) % n]);
    return s * dx;
}

inline double outer_band_fraction(const FieldSnapshot& s, double band) {
    double total = 0, outer = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        const double m = std::norm(s.q[j]);
        total += m;
        if (std::abs(s.x(j)) > (1.0 - band) * s.half_width) outer += m;
    }
    return total > 0 ? outer / total : 0.0;
}

inline FieldSnapshot sample_initial(const Potential& p, const PdeOptions& o) {
    if (o.points < 4 || (o.points & (o.points - 1)) != 0) throw InvalidInput("PDE grid size must be a power of two");
    if (!(o.half_width > 0)) throw InvalidInput("PDE half-width must be positive");
    FieldSnapshot s;
    s.half_width = o.half_width;
    s.sigma = p.sigma;
    s.q.resize(o.points);
    for (std::size_t j = 0; j < o.points; ++j) s.q[j] = p(s.x(j));
    s.nonlocal_mass = nonlocal_mass(s.q, s.dx());
    return s;
}

class SplitStepSolver {
public:
    SplitStepSolver(std::size_t n, double half_width, int sigma) : n_(n), L_(half_width), sigma_(sigma) {
        if (n < 4 || n % 2) throw InvalidInput("PDE grid size must be even and at least 4");
        std::lock_guard lock(detail::fftw_planner_mutex());
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (!buf_) throw std::bad_alloc();
        fwd_ = fftw_plan_dft_1d(int(n), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(int(n), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        k_.resize(n);
        const double base = pi / half_width;  // 2 pi / (2L)
        for (std::size_t j = 0; j < n; ++j) k_[j] = base * (j < n / 2 ? double(j) : double(j) - double(n));
    }
    ~SplitStepSolver() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    SplitStepSolver(const SplitStepSolver&) = delete;
    SplitStepSolver& operator=(const SplitStepSolver&) = delete;

    const std::vector<double>& wavenumbers() const { return k_; }

    std::vector<Complex> spectrum(const std::vector<Complex>& q) {
        load(q);
        fftw_execute(fwd_);
        std::vector<Complex> out(n_);
        for (std::size_t j = 0; j < n_; ++j) out[j] = {buf_[j][0], buf_[j][1]};
        return out;
    }

    // q^ <- q^ e^{-i k^2 dt}
    void linear(std::vector<Complex>& q, double dt) {
        load(q);
        fftw_execute(fwd_);
        const double inv = 1.0 / double(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double ph = -k_[j] * k_[j] * dt;
            const Complex m = Complex(std::cos(ph), std::sin(ph)) * inv;
            const Complex v = Complex(buf_[j][0], buf_[j][1]) * m;
            buf_[j][0] = v.real(), buf_[j][1] = v.imag();
        }
        fftw_execute(bwd_);
        for (std::size_t j = 0; j < n_; ++j) q[j] = {buf_[j][0], buf_[j][1]};
    }

    // q <- q exp(2 i sigma q conj(q(-x)) dt); q conj(q(-x)) is invariant under this flow.
    void nonlinear(std::vector<Complex>& q, double dt) const {
        std::vector<Complex> v(n_);
        for (std::size_t j = 0; j < n_; ++j) v[j] = q[j] * std::conj(q[(n_ - j) % n_]);
        const Complex c = 2.0 * I * double(sigma_) * dt;
        for (std::size_t j = 0; j < n_; ++j) q[j] *= std::exp(c * v[j]);
    }

    void strang_step(std::vector<Complex>& q, double dt) {
        linear(q, dt / 2);
        nonlinear(q, dt);
        linear(q, dt / 2);
    }

private:
    void load(const std::vector<Complex>& q) {
        if (q.size() != n_) throw InvalidInput("field size does not match the solver grid");
        for (std::size_t j = 0; j < n_; ++j) buf_[j][0] = q[j].real(), buf_[j][1] = q[j].imag();
    }

    std::size_t n_;
    double L_;
    int sigma_;
    fftw_complex* buf_ = nullptr;
    fftw_plan fwd_{}, bwd_{};
    std::vector<double> k_;
};

// Single linear substep (exposed for tests); dt may be any real.
inline FieldSnapshot linear_half_step(FieldSnapshot s, double dt) {
    SplitStepSolver solver(s.size(), s.half_width, s.sigma);
    solver.linear(s.q, dt);
    s.t += dt;
    s.nonlocal_mass = nonlocal_mass(s.q, s.dx());
    return s;
}

inline FieldSnapshot nonlinear_step(FieldSnapshot s, double dt) {
    SplitStepSolver solver(s.size(), s.half_width, s.sigma);
    solver.nonlinear(s.q, dt);
    s.t += dt;
    s.nonlocal_mass = nonlocal_mass(s.q, s.dx());
    return s;
}

// Largest |k| carrying spectral weight above `floor` of the peak.
inline double significant_wavenumber(SplitStepSolver& solver, const std::vector<Complex>& q, double floor) {
    const auto spec = solver.spectrum(q);
    double peak = 0;
    for (auto c : spec) peak = std::max(peak, std::abs(c));
    double kmax = 0;
    if (peak == 0) return 0;
    for (std::size_t j = 0; j < spec.size(); ++j)
        if (std::abs(spec[j]) > floor * peak) kmax = std::max(kmax, std::abs(solver.wavenumbers()[j]));
    return kmax;
}

// Evolves the initial field and returns snapshots at each requested time
// (ascending, each a whole number of steps). `on_snapshot` may stream them out.
inline std::vector<FieldSnapshot> evolve(const FieldSnapshot& initial, const std::vector<double>& times,
                                         const PdeOptions& o,
                                         const std::function<void(const FieldSnapshot&)>& on_snapshot = {}) {
    if (!(o.dt > 0)) throw InvalidInput("dt must be positive");
    SplitStepSolver solver(initial.size(), initial.half_width, initial.sigma);
    const double kmax = significant_wavenumber(solver, initial.q, o.spectral_floor);
    if (o.dt * kmax * kmax > o.step_limit)
        throw StepTooLarge("dt * k_max^2 = " + fmt_num(o.dt * kmax * kmax) + " exceeds " + fmt_num(o.step_limit));
    std::vector<std::size_t> marks;
    for (double t : times) {
        if (t < initial.t) throw InvalidInput("snapshot times must not precede the initial time");
        const double steps = (t - initial.t) / o.dt;
        const auto n = std::size_t(std::llround(steps));
        if (std::abs(steps - double(n)) > 1e-6 * std::max(1.0, steps))
            throw InvalidInput("snapshot time " + fmt_num(t) + " is not a multiple of dt");
        if (!marks.empty() && n < marks.back()) throw InvalidInput("snapshot times must be ascending");
        marks.push_back(n);
    }
    std::vector<FieldSnapshot> out;
    std::vector<Complex> q = initial.q;
    auto capture = [&](std::size_t step) {
        FieldSnapshot s;
        s.t = initial.t + double(step) * o.dt;
        s.half_width = initial.half_width;
        s.sigma = initial.sigma;
        s.q = q;
        s.steps = step;
        s.nonlocal_mass = nonlocal_mass(q, s.dx());
        if (o.check_boundary) {
            const double frac = outer_band_fraction(s, o.outer_band);
            if (frac > o.contamination_tol)
                throw BoundaryContamination("outer-band mass fraction " + fmt_num(frac) + " at t=" + fmt_num(s.t));
        }
        if (on_snapshot) on_snapshot(s);
        out.push_back(std::move(s));
    };
    std::size_t mi = 0;
    while (mi < marks.size() && marks[mi] == 0) capture(0), ++mi;
    if (mi == marks.size()) return out;
    const std::size_t last = marks.back();
    // Fused Strang: half linear steps merge between consecutive nonlinear steps.
    solver.linear(q, o.dt / 2);
    for (std::size_t n = 1; n <= last; ++n) {
        solver.nonlinear(q, o.dt);
        if (n == marks[mi]) {
            solver.linear(q, o.dt / 2);
            while (mi < marks.size() && marks[mi] == n) capture(n), ++mi;
            if (n < last) solver.linear(q, o.dt / 2);
        } else {
            solver.linear(q, o.dt);
        }
    }
    return out;
}

// Band-limited interpolation of a periodic snapshot at arbitrary x.
class SpectralInterpolant {
public:
    explicit SpectralInterpolant(const FieldSnapshot& s) : L_(s.half_width), n_(s.size()) {
        SplitStepSolver solver(s.size(), s.half_width, s.sigma);
        coef_ = solver.spectrum(s.q);
        k_ = solver.wavenumbers();
        for (auto& c : coef_) c /= double(n_);
    }
    Complex operator()(double x) const {
        const double u = x + L_;  // offset from the first node
        Complex s{};
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == n_ / 2) {
                s += coef_[j] * std::cos(k_[j] * u);  // split Nyquist mode
                continue;
            }
            s += coef_[j] * std::exp(I * (k_[j] * u));
        }
        return s;
    }

private:
    double L_;
    std::size_t n_;
    std::vector<Complex> coef_;
    std::vector<double> k_;
};

inline void write_snapshot_csv(std::ostream& os, const FieldSnapshot& s) {
    os << "x,re_q,im_q\n";
    char buf[96];
    for (std::size_t j = 0; j < s.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.x(j), s.q[j].real(), s.q[j].imag());
        os << buf;
    }
}

// Raw little-endian float64 pairs (re, im), no header.
inline void write_snapshot_binary(std::ostream& os, const FieldSnapshot& s) {
    static_assert(std::endian::native == std::endian::little, "binary snapshots assume a little-endian host");
    for (auto c : s.q) {
        const double v[2] = {c.real(), c.imag()};
        os.write(reinterpret_cast<const char*>(v), sizeof v);
    }
}

}  // namespace nnls
