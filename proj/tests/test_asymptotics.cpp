#include <nnls/asymptotics.hpp>

#include <gtest/gtest.h>

using namespace nnls;

namespace {

// Smooth synthetic reflection data with r r~ = w0 exp(-s^2).
ScatteringData synthetic(Complex r0, Complex rb0, double z_max = 10.0, std::size_t n = 801) {
    ScatteringData d;
    d.z = detail::symmetric_grid(z_max, n);
    for (double s : d.z) {
        const double g = std::exp(-s * s / 2);
        d.r.push_back(r0 * g);
        d.r_breve.push_back(rb0 * g);
    }
    d.a.assign(n, 1.0);
    d.a_breve.assign(n, 1.0);
    d.b = d.r;
    d.b_breve = d.r_breve;
    return d;
}

class BoxAsymptotics : public ::testing::Test {
protected:
    static void SetUpTestSuite() { solver_ = new AsymptoticSolver(compute_scattering(Potential::box(0.3, -1, 1, 1))); }
    static void TearDownTestSuite() { delete solver_; }
    static AsymptoticSolver* solver_;
};
AsymptoticSolver* BoxAsymptotics::solver_ = nullptr;

}  // namespace

TEST(Asymptotics, ZeroPotentialGivesZero) {
    const auto d = compute_scattering(Potential::zero());
    for (auto [x, t] : {std::pair{-20.0, 10.0}, {0.0, 40.0}, {35.0, 100.0}}) {
        const auto e = q_asymptotic(x, t, d);
        EXPECT_EQ(e.q_leading, Complex{});
        EXPECT_EQ(e.validity, Validity::valid);
        EXPECT_EQ(e.remainder, "O(t^-3/4)");
    }
}

TEST_F(BoxAsymptotics, AlphaModulusIsTimeIndependent) {
    for (double xi : {-0.4, 0.5, 1.7}) {
        const double a1 = std::abs(solver_->alpha(xi, 20.0)), a2 = std::abs(solver_->alpha(xi, 333.0));
        EXPECT_LT(std::abs(a1 - a2), 1e-12 * std::max(1.0, a1));
    }
}

TEST_F(BoxAsymptotics, TwoRoutesAgree) {
    for (auto [xi, t] : {std::pair{0.5, 100.0}, {-1.0, 15.0}, {2.0, 400.0}}) {
        const double x = -4 * xi * t;
        EXPECT_LT(std::abs(solver_->evaluate(x, t).q_leading - solver_->q_via_model(x, t)), 1e-10);
    }
}

TEST_F(BoxAsymptotics, ScalingLawUnderTimeDoubling) {
    const double xi = 0.5;
    const Complex nu = solver_->phase(xi).nu_at_xi;
    const double q1 = std::abs(solver_->evaluate(-4 * xi * 50.0, 50.0).q_leading);
    const double q2 = std::abs(solver_->evaluate(-4 * xi * 100.0, 100.0).q_leading);
    EXPECT_LT(std::abs(q2 / q1 - std::pow(2.0, nu.imag() - 0.5)), 1e-12);
}

TEST_F(BoxAsymptotics, WindowAndTimeGates) {
    EXPECT_THROW(solver_->evaluate(0.0, 5.0), WindowExceeded);
    EXPECT_THROW(solver_->evaluate(-4 * 16.5 * 20.0, 20.0), WindowExceeded);
    EXPECT_THROW(solver_->evaluate(-4 * -15.5 * 20.0, 20.0), WindowExceeded);
    EXPECT_THROW(solver_->evaluate(0.0, -1.0), NonpositiveTime);
}

TEST(Asymptotics, ClassificationBands) {
    const AsymptoticOptions o;
    EXPECT_EQ(classify(Complex(0.1, 0.1), o), Validity::valid);
    EXPECT_EQ(classify(Complex(0.1, -0.24), o), Validity::marginal);
    EXPECT_EQ(classify(Complex(0.1, 0.25), o), Validity::invalid);
    EXPECT_EQ(classify(Complex(0.1, -0.3), o), Validity::invalid);
}

TEST(Asymptotics, RefusesLargeImaginaryNu) {
    const AsymptoticSolver s(synthetic(Complex(1.2, 1.2), 1.0));
    const double im = std::abs(s.phase(0.0).nu_at_xi.imag());
    ASSERT_GE(im, 0.25);
    EXPECT_THROW(s.evaluate(0.0, 50.0), ValidityViolation);
    const auto far = s.evaluate(-4 * -3.0 * 50.0, 50.0);
    EXPECT_LT(std::abs(far.im_nu), 0.25);
    EXPECT_TRUE(std::isfinite(std::abs(far.q_leading)));
}

TEST(Asymptotics, MemoisedPhaseIsReused) {
    const AsymptoticSolver s(synthetic(0.2, 0.1));
    const auto a = s.phase(0.7), b = s.phase(0.7);
    EXPECT_EQ(a.delta0, b.delta0);
    EXPECT_EQ(a.nu_tail_integral, b.nu_tail_integral);
}
