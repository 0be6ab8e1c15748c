#include <nnls/phase.hpp>

#include <gtest/gtest.h>

using namespace nnls;

namespace {

ScatteringData constant_reflection(Complex r, Complex rb, double z_max = 10.0, std::size_t n = 201) {
    ScatteringData d;
    d.z = detail::symmetric_grid(z_max, n);
    d.r.assign(n, r);
    d.r_breve.assign(n, rb);
    d.a.assign(n, 1.0);
    d.a_breve.assign(n, 1.0);
    d.b = d.r;
    d.b_breve = d.r_breve;
    return d;
}

double rel(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

class BoxPhase : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        potential_ = new Potential(Potential::box(0.3, -1, 1, 1));
        data_ = new ScatteringData(compute_scattering(*potential_));
        profile_ = new NuProfile(*data_);
    }
    static void TearDownTestSuite() {
        delete profile_;
        delete data_;
        delete potential_;
    }
    static Potential* potential_;
    static ScatteringData* data_;
    static NuProfile* profile_;
};
Potential* BoxPhase::potential_ = nullptr;
ScatteringData* BoxPhase::data_ = nullptr;
NuProfile* BoxPhase::profile_ = nullptr;

}  // namespace

TEST(StationaryPoint, DirectFormula) {
    EXPECT_DOUBLE_EQ(stationary_point(0.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(stationary_point(-4.0, 1.0), 1.0);
    const double x = 3.7, t = 2.2, xi = stationary_point(x, t);
    EXPECT_NEAR(x / t + 4 * xi, 0.0, 1e-15);
    EXPECT_THROW(stationary_point(1.0, 0.0), NonpositiveTime);
}

TEST(Nu, ClosedFormValues) {
    EXPECT_EQ(nu_at(constant_reflection(0.0, 0.0), 0.3), Complex{});
    const Complex nu = nu_at(constant_reflection(1.0, 1.0 - std::exp(1.0)), 0.3);
    EXPECT_NEAR(std::abs(nu + 1.0 / (2 * pi)), 0.0, 1e-14);
}

TEST(Nu, RejectsNonGenericAndBranchCrossing) {
    EXPECT_THROW(NuProfile(constant_reflection(1.0, 1.0)), GenericityViolation);
    EXPECT_THROW(NuProfile(constant_reflection(1.0, 2.0)), BranchViolation);
}

TEST(Delta, TrivialForZeroReflection) {
    const NuProfile p(constant_reflection(0.0, 0.0));
    EXPECT_EQ(delta(p, 0.5, Complex(0.2, 1.0)), Complex(1.0));
    EXPECT_EQ(beta(p, 0.5, Complex(-1.0, 2.0)), Complex{});
    EXPECT_EQ(delta0(p, 0.5), Complex(1.0));
    EXPECT_EQ(nu_tail_integral(p, 0.5).value, Complex{});
}

TEST(Delta, RefusesCutAndWindow) {
    const NuProfile p(constant_reflection(0.1, 0.1));
    EXPECT_THROW(delta(p, 0.5, Complex(0.2, 0.0)), CutEvaluation);
    EXPECT_NO_THROW(delta(p, 0.5, Complex(0.7, 0.0)));
    EXPECT_THROW(delta(p, 10.5, Complex(0.2, 1.0)), WindowExceeded);
    EXPECT_THROW(delta(p, -9.5, Complex(0.2, 1.0)), WindowExceeded);
}

TEST_F(BoxPhase, NuMatchesOracleData) {
    const auto e = exact_box_scattering(*potential_, {0.0});
    const Complex want = -std::log(1.0 - e.r[0] * e.r_breve[0]) / (2 * pi);
    EXPECT_LT(std::abs(profile_->nu(0.0) - want), 1e-8);
}

TEST_F(BoxPhase, JumpAcrossTheCut) {
    const double xi = 0.2;
    for (double s : {-7.0, -3.0, -1.3, -0.5, 0.1}) {
        const Complex dp = delta_boundary(*profile_, xi, s, BoundarySide::plus);
        const Complex dm = delta_boundary(*profile_, xi, s, BoundarySide::minus);
        const Complex w = 1.0 - profile_->r(s) * profile_->r_breve(s);
        EXPECT_LT(rel(dp / dm, w), 1e-6) << "s=" << s;
    }
}

TEST_F(BoxPhase, FactorisationOffTheCut) {
    const double xi = 0.2;
    const Complex nu = profile_->nu(xi);
    for (Complex z : {Complex(0.5, 0.3), Complex(-2, 1), Complex(0.2, 1e-3), Complex(3, 0), Complex(-4, -2)}) {
        const Complex lhs = delta(*profile_, xi, z);
        const Complex rhs = std::exp(I * beta(*profile_, xi, z)) * std::pow(z - xi, I * nu);
        EXPECT_LT(rel(lhs, rhs), 1e-6) << z;
    }
}

TEST_F(BoxPhase, HolderContinuityAtStationaryPoint) {
    const double xi = 0.2;
    const Complex b0 = beta(*profile_, xi, Complex(xi));
    std::vector<double> lr, lb;
    for (double rho = 1e-4; rho <= 1.01e-2; rho *= std::sqrt(10.0)) {
        lr.push_back(std::log(rho));
        lb.push_back(std::log(std::abs(beta(*profile_, xi, Complex(xi, rho)) - b0)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = double(lr.size());
    for (std::size_t i = 0; i < lr.size(); ++i) sx += lr[i], sy += lb[i], sxx += lr[i] * lr[i], sxy += lr[i] * lb[i];
    EXPECT_GE((n * sxy - sx * sy) / (n * sxx - sx * sx), 0.45);
}

TEST_F(BoxPhase, Delta0IsTheVerticalLimit) {
    const double xi = 0.2;
    const Complex d0 = delta0(*profile_, xi), nu = profile_->nu(xi);
    const Complex z = Complex(xi, 1e-5);
    EXPECT_LT(rel(delta(*profile_, xi, z) * std::pow(z - xi, -I * nu), d0), 1e-4);
}

TEST_F(BoxPhase, Delta0StableUnderQuadratureRefinement) {
    PhaseOptions fine;
    fine.quad.rel_tol = 1e-14;
    fine.quad.abs_tol = 1e-17;
    const NuProfile p(*data_, fine);
    EXPECT_LT(rel(delta0(p, 0.0), delta0(*profile_, 0.0)), 1e-6);
}

TEST_F(BoxPhase, TailIntegralStableUnderWindowDoubling) {
    ScatteringOptions wide;
    wide.z_max = 32.0;
    wide.points = 4097;
    const NuProfile p(compute_scattering(*potential_, wide));
    const auto narrow = nu_tail_integral(*profile_, 0.3), broad = nu_tail_integral(p, 0.3);
    EXPECT_LT(std::abs(narrow.value - broad.value), narrow.error + broad.error);
}

TEST(DeltaLargeZ, MomentIsTheNuIntegral) {
    const auto pot = Potential::gaussian(0.3, 1.0, 1, 12.0);
    const NuProfile p(compute_scattering(pot));
    const double xi = 8.0;
    const Complex want = -I * nu_tail_integral(p, xi).value;
    const Complex got = delta_moment(p, xi, Complex(xi, 1e3));
    EXPECT_LT(rel(got, want), 1e-4);
}

TEST(PhaseData, JsonKeys) {
    const NuProfile p(constant_reflection(0.1, 0.2));
    const auto j = to_json(compute_phase_data(p, 0.5));
    for (const char* k : {"xi", "nu", "delta0", "nu_tail", "branch_max_arg"}) EXPECT_TRUE(j.contains(k)) << k;
}
