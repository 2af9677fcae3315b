#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "rotascope/measure_conj.hpp"
#include "rotascope/staircase.hpp"

using namespace rotascope;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

double golden_parameter() {
    static const double t = inverse_rho(LiftDescriptor::arnold(0.5), kGolden).t;
    return t;
}

}  // namespace

TEST(BirkhoffAverage, RotationHasZeroLogDerivative) {
    auto a = birkhoff_average(FamilyPoint{LiftDescriptor::identity(), kGolden}, Observable::log_fprime(), 0.3, 1000);
    EXPECT_EQ(a.value, 0.0);
    EXPECT_EQ(a.n, 1000);
    EXPECT_EQ(a.observable_tag, "log_fprime");
}

TEST(BirkhoffAverage, LogDerivativeAveragesToZeroOnStandardMap) {
    FamilyPoint fp{LiftDescriptor::arnold(0.5), golden_parameter()};
    double prev = INFINITY;
    for (std::int64_t n : {25'000, 50'000, 100'000, 200'000}) {
        double v = std::fabs(birkhoff_average(fp, Observable::log_fprime(), 0.1, n).value);
        EXPECT_LT(v, 1e-3);
        EXPECT_LT(v, 2.0 * prev);  // no growth along the doubling ladder
        prev = v;
    }
    EXPECT_LT(prev, 1e-5);
}

TEST(BirkhoffAverage, IteratedDerivativeAverageAtLeastOne) {
    FamilyPoint fp{LiftDescriptor::arnold(0.5), golden_parameter()};
    for (auto [i, j] : std::vector<std::pair<int, int>>{{1, 0}, {3, 2}, {8, 5}}) {
        auto a = birkhoff_average(fp, Observable::iter_deriv(i, j), 0.0, 100'000);
        EXPECT_GE(a.value, 1.0 - 1e-3) << a.observable_tag;
    }
}

TEST(BirkhoffAverage, DisplacementMatchesRotationNumber) {
    FamilyPoint fp{LiftDescriptor::arnold(0.5), golden_parameter()};
    const std::int64_t n = 50'000;
    for (Rational pq : {Rational{3, 5}, Rational{5, 8}, Rational{8, 13}}) {
        auto a = birkhoff_average(fp, Observable::displacement(pq), 0.2, n);
        double want = pq.p - pq.q * kGolden;
        // Telescoping: the average differs from p - q rho by at most 2q / n.
        EXPECT_NEAR(a.value, want, 2.0 * pq.q / n + 1e-9) << pq.str();
    }
}

TEST(BirkhoffAverage, CustomObservableAndValidation) {
    FamilyPoint fp{LiftDescriptor::identity(), kGolden};
    auto a = birkhoff_average(fp, Observable::custom("cos", [](double x) { return std::cos(kTau * x); }), 0.0, 100'000);
    EXPECT_NEAR(a.value, 0.0, 1e-4);
    EXPECT_THROW(Observable::iter_deriv(-1, 0), DomainError);
    EXPECT_THROW(Observable::displacement({1, 0}), DomainError);
    EXPECT_THROW(birkhoff_average(fp, Observable::log_fprime(), 0.0, 0), DomainError);
}

TEST(Conjugacy, RotationIsDiagonal) {
    auto c = conjugacy_from_orbit(FamilyPoint{LiftDescriptor::identity(), kGolden}, 500);
    for (std::size_t k = 0; k < c.size(); ++k) EXPECT_NEAR(c.y[k], c.theta[k], 500 * c.alpha_radius + 1e-12);
    EXPECT_NEAR(c.inverse_derivative_integral(), 1.0, 1e-10);
    EXPECT_NEAR(c.h(0.123), 0.123, 500 * c.alpha_radius + 1e-12);
}

TEST(Conjugacy, StandardMapResidualShrinks) {
    FamilyPoint fp{LiftDescriptor::arnold(0.5), golden_parameter()};
    auto coarse = conjugacy_from_orbit(fp, 1024);
    auto fine = conjugacy_from_orbit(fp, 8192);
    EXPECT_LT(fine.residual(fp), coarse.residual(fp));
    EXPECT_LT(fine.residual(fp), 1e-6);
    EXPECT_GT(fine.min_slope(), 0.0);
    for (double th : {0.0, 0.11, 0.5, 0.93}) EXPECT_NEAR(fine.h_inv(fine.h(th)), th, 1e-12);
    for (std::size_t k = 1; k < fine.size(); ++k) {
        EXPECT_GT(fine.theta[k], fine.theta[k - 1]);
        EXPECT_GT(fine.y[k], fine.y[k - 1]);
    }
}

TEST(Conjugacy, WrongRotationBreaksOrder) {
    FamilyPoint fp{LiftDescriptor::arnold(0.5), golden_parameter()};
    EXPECT_THROW(conjugacy_for_alpha(fp, 4096, kGolden + 1e-3), OrderMismatch);
    EXPECT_THROW(conjugacy_from_orbit(FamilyPoint{LiftDescriptor::arnold(0.5), 0.0}, 100), PreconditionFailed);
}

TEST(Derivative, ConjugacyIntegralMatchesDifferenceQuotient) {
    const auto lift = LiftDescriptor::arnold(0.5);
    const double t = golden_parameter();
    double via = derivative_via_conjugacy(lift, t, 8192);
    double fd = rho_difference_quotient(lift, t, 1e-7);
    EXPECT_NEAR(via, fd, 1e-3 * fd);
    EXPECT_GT(via, std::exp(-distortion_constants(lift).M));
}

TEST(Brunovsky, RotationPath) {
    auto r = brunovsky_check(rotation_path(), kGolden, 1e-6);
    EXPECT_NEAR(r.lhs, 1.0, 1e-5);
    EXPECT_NEAR(r.rhs, 1.0, 1e-15);
}

TEST(Brunovsky, PerturbedRotationPath) {
    const double eps = 0.01, t = kGolden;
    auto r = brunovsky_check(perturbed_rotation_path(eps), t, 1e-6);
    double want = 1.0 + kTau * eps * std::cos(kTau * t);
    EXPECT_NEAR(r.rhs, want, 1e-12);
    EXPECT_NEAR(r.lhs, want, 1e-5);
}

TEST(Brunovsky, ConjugatedRotationPathRhsIsNotOne) {
    // rot = t for every t, yet the integral of dg/dt is 1 + eps^2 cos(2 pi t) / 2.
    const double eps = 0.1, t = kGolden;
    auto r = brunovsky_check(conjugated_rotation_path(eps), t, 1e-6);
    EXPECT_NEAR(r.lhs, 1.0, 1e-5);
    EXPECT_NEAR(r.rhs, 1.0 + 0.5 * eps * eps * std::cos(kTau * t), 1e-10);
}

TEST(Brunovsky, LockedPathRejected) {
    EXPECT_THROW(brunovsky_check(rotation_path(), 0.5, 1e-6), PreconditionFailed);
    EXPECT_THROW(brunovsky_check(rotation_path(), kGolden, 0.0), DomainError);
}
