#include <nnls/experiment.hpp>
#include <nnls/pde.hpp>

#include <gtest/gtest.h>

using namespace nnls;

namespace {

PdeOptions grid(double L, std::size_t n, double dt) {
    PdeOptions o;
    o.half_width = L;
    o.points = n;
    o.dt = dt;
    return o;
}

double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b, std::size_t stride_b = 1) {
    double e = 0;
    for (std::size_t j = 0; j < a.size(); ++j) e = std::max(e, std::abs(a[j] - b[j * stride_b]));
    return e;
}

double l2_diff(const FieldSnapshot& a, const FieldSnapshot& b) {
    double s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a.q[j] - b.q[j]);
    return std::sqrt(s * a.dx());
}

}  // namespace

TEST(LinearStep, ZeroStepIsIdentity) {
    const auto s = sample_initial(Potential::gaussian(Complex(0.2, 0.1), 1.0, 1, 12.0), grid(16, 256, 0.01));
    EXPECT_LT(max_diff(linear_half_step(s, 0.0).q, s.q), 1e-15);
}

TEST(LinearStep, PlaneWaveAdvancesByPhase) {
    FieldSnapshot s;
    s.half_width = 10.0;
    s.q.resize(128);
    const double k = 5 * pi / s.half_width;
    for (std::size_t j = 0; j < s.size(); ++j) s.q[j] = std::exp(I * (k * s.x(j)));
    const double dt = 0.37;
    const auto out = linear_half_step(s, dt);
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_LT(std::abs(out.q[j] - s.q[j] * std::exp(-I * (k * k * dt))), 1e-12);
}

TEST(LinearStep, ConservesNonlocalMass) {
    const auto s = sample_initial(Potential::gaussian(Complex(0.2, 0.1), 1.0, 1, 12.0, 0.7), grid(16, 256, 0.01));
    const auto out = linear_half_step(s, 0.8);
    EXPECT_LT(std::abs(out.nonlocal_mass - s.nonlocal_mass), 1e-14 * std::abs(s.nonlocal_mass) + 1e-16);
}

TEST(NonlinearStep, IdentityAndLocalReduction) {
    for (int sigma : {1, -1}) {
        const auto s = sample_initial(Potential::gaussian(0.4, 1.0, sigma, 12.0), grid(16, 256, 0.01));
        EXPECT_LT(max_diff(nonlinear_step(s, 0.0).q, s.q), 1e-16);
        const double dt = 0.3;
        const auto out = nonlinear_step(s, dt);
        for (std::size_t j = 0; j < s.size(); ++j)
            EXPECT_LT(std::abs(out.q[j] - s.q[j] * std::exp(2.0 * I * double(sigma) * std::norm(s.q[j]) * dt)), 1e-15);
    }
}

TEST(NonlinearStep, PtPotentialIsInvariant) {
    const auto s = sample_initial(Potential::gaussian(Complex(0.3, -0.2), 1.0, 1, 12.0, 1.3), grid(16, 256, 0.01));
    const auto out = nonlinear_step(s, 0.9);
    const std::size_t n = s.size();
    for (std::size_t j = 0; j < n; ++j) {
        const Complex before = s.q[j] * std::conj(s.q[(n - j) % n]);
        const Complex after = out.q[j] * std::conj(out.q[(n - j) % n]);
        EXPECT_LT(std::abs(after - before), 1e-15);
    }
}

TEST(Evolve, ZeroPotentialStaysZero) {
    const auto s = sample_initial(Potential::zero(), grid(32, 256, 0.01));
    for (const auto& f : evolve(s, {1.0, 2.0}, grid(32, 256, 0.01)))
        for (auto c : f.q) EXPECT_EQ(c, Complex{});
}

TEST(Evolve, SecondOrderInTime) {
    const auto p = Potential::gaussian(0.3, 2.0, 1, 30.0);
    const auto s = sample_initial(p, grid(128, 2048, 0.04));
    std::vector<FieldSnapshot> u;
    for (double dt : {0.04, 0.02, 0.01}) u.push_back(evolve(s, {10.0}, grid(128, 2048, dt)).back());
    const double ratio = l2_diff(u[0], u[1]) / l2_diff(u[1], u[2]);
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
}

TEST(Evolve, SpectrallyAccurateInSpace) {
    const auto p = Potential::gaussian(Complex(0.2, 0.1), 2.0, 1, 30.0);
    const auto coarse = evolve(sample_initial(p, grid(128, 1024, 0.01)), {5.0}, grid(128, 1024, 0.01)).back();
    const auto fine = evolve(sample_initial(p, grid(128, 2048, 0.01)), {5.0}, grid(128, 2048, 0.01)).back();
    EXPECT_LT(max_diff(coarse.q, fine.q, 2), 1e-8);
}

TEST(Evolve, ConservesNonlocalMass) {
    const auto p = Potential::gaussian(0.1, 3.0, 1, 36.0);
    const auto s = sample_initial(p, grid(256, 8192, 5e-3));
    const auto out = evolve(s, {10.0, 40.0}, grid(256, 8192, 5e-3));
    for (const auto& f : out) EXPECT_LT(std::abs(f.nonlocal_mass - s.nonlocal_mass) / std::abs(s.nonlocal_mass), 1e-10);
    EXPECT_EQ(out.back().steps, 8000u);
}

TEST(Evolve, MonitorsStepAndBoundary) {
    const auto p = Potential::gaussian(0.3, 0.5, 1, 12.0);
    EXPECT_THROW(evolve(sample_initial(p, grid(32, 512, 0.5)), {1.0}, grid(32, 512, 0.5)), StepTooLarge);
    const auto narrow = Potential::gaussian(0.3, 1.0, 1, 12.0);
    EXPECT_THROW(evolve(sample_initial(narrow, grid(12, 512, 0.01)), {10.0}, grid(12, 512, 0.01)), BoundaryContamination);
    const auto smooth = Potential::gaussian(0.3, 2.0, 1, 20.0);
    EXPECT_THROW(evolve(sample_initial(smooth, grid(32, 512, 0.01)), {0.015}, grid(32, 512, 0.01)), InvalidInput);
    EXPECT_THROW(sample_initial(p, grid(32, 500, 0.01)), InvalidInput);
}

TEST(Interpolation, ExactAtNodesAndBandLimitedBetween) {
    FieldSnapshot s;
    s.half_width = 8.0;
    s.q.resize(64);
    const double k = 3 * pi / s.half_width;
    for (std::size_t j = 0; j < s.size(); ++j) s.q[j] = Complex(std::cos(k * s.x(j)), 0.5 * std::sin(2 * k * s.x(j)));
    const SpectralInterpolant f(s);
    EXPECT_LT(std::abs(f(s.x(5)) - s.q[5]), 1e-13);
    const double x = 1.2345;
    EXPECT_LT(std::abs(f(x) - Complex(std::cos(k * x), 0.5 * std::sin(2 * k * x))), 1e-13);
}

TEST(SnapshotExport, CsvAndBinary) {
    const auto s = sample_initial(Potential::box(0.2, -1, 1, 1), grid(8, 16, 0.01));
    std::ostringstream csv, bin;
    write_snapshot_csv(csv, s);
    write_snapshot_binary(bin, s);
    EXPECT_EQ(csv.str().substr(0, 12), "x,re_q,im_q\n");
    EXPECT_EQ(bin.str().size(), 16 * 2 * sizeof(double));
    double first[2];
    std::memcpy(first, bin.str().data() + 8 * 2 * sizeof(double), sizeof first);
    EXPECT_EQ(first[0], s.q[8].real());
}

TEST(CompareSelfConvergence, ExponentStableUnderResolutionDoubling) {
    ExperimentConfig c;
    c.potential = Potential::gaussian(0.1, 3.0, 1, 36.0);
    c.rays = {0.5};
    c.times = {40, 80, 160};
    const auto base = compare(c);
    c.pde.points *= 2;
    const auto fine = compare(c);
    EXPECT_LE(std::abs(base.exponents[0] - fine.exponents[0]), 0.05);
}
