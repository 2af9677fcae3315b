#include <cmath>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <gtest/gtest.h>

#include "rotascope/circle_map.hpp"

using namespace rotascope;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

LiftDescriptor random_harmonic(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    // Keep sum 2 pi k (|c_k| + |d_k|) < 1 so f' > 0 is guaranteed.
    std::vector<double> s{0.05 * U(rng), 0.02 * U(rng)}, c{0.05 * U(rng), 0.01 * U(rng)};
    return LiftDescriptor::harmonic(s, c);
}

}  // namespace

TEST(LiftDescriptor, ArnoldClosedForm) {
    const double K = 0.7;
    auto f = LiftDescriptor::arnold(K);
    for (double x : {0.0, 0.1, 0.25, 0.5, 0.93}) {
        EXPECT_NEAR(f.value(x), x + K / kTau * std::sin(kTau * x), 1e-15);
        EXPECT_NEAR(f.deriv(x), 1.0 + K * std::cos(kTau * x), 1e-15);
        EXPECT_NEAR(f.deriv2(x), -kTau * K * std::sin(kTau * x), 1e-13);
    }
    EXPECT_EQ(f.family(), "arnold");
    EXPECT_DOUBLE_EQ(f.arnold_K(), K);
}

TEST(LiftDescriptor, IdentityIsRotation) {
    auto f = LiftDescriptor::identity();
    EXPECT_TRUE(f.is_rotation());
    EXPECT_EQ(f.value(0.3), 0.3);
    EXPECT_EQ(f.deriv(0.3), 1.0);
    EXPECT_FALSE(LiftDescriptor::arnold(0.1).is_rotation());
}

TEST(LiftDescriptor, RejectsInvalidInput) {
    EXPECT_THROW(LiftDescriptor::arnold(1.0), DomainError);
    EXPECT_THROW(LiftDescriptor::arnold(1.5), DomainError);
    EXPECT_THROW(LiftDescriptor::harmonic({0.0, 0.2}, {}), DomainError);  // f' = 1 + 0.8 pi cos(4 pi x)
    EXPECT_THROW(LiftDescriptor::identity(14), DomainError);
    EXPECT_THROW(LiftDescriptor::identity(33), DomainError);
    EXPECT_THROW(LiftDescriptor::harmonic({NAN}, {}), DomainError);
    EXPECT_NO_THROW(LiftDescriptor::arnold(0.999));
}

TEST(LiftDescriptor, MonotoneBeyondSufficientBound) {
    // sum 2 pi k |c_k| > 1, but f' = 1 + 0.9 cos(2 pi x) + 0.05 cos(4 pi x) stays positive.
    EXPECT_NO_THROW(LiftDescriptor::harmonic({0.9 / kTau, 0.05 / (2 * kTau)}, {}));
}

TEST(LiftDescriptor, ArithmeticFollowsPrecision) {
    EXPECT_EQ(LiftDescriptor::arnold(0.5, 15).arithmetic(), Arithmetic::binary64);
    EXPECT_EQ(LiftDescriptor::arnold(0.5, 16).arithmetic(), Arithmetic::binary64);
    EXPECT_EQ(LiftDescriptor::arnold(0.5, 17).arithmetic(), Arithmetic::double_double);
    EXPECT_EQ(LiftDescriptor::arnold(0.5, 32).arithmetic(), Arithmetic::double_double);
}

TEST(LiftProperty, DegreeOneAndDerivatives) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> X(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto f = random_harmonic(rng);
        for (int i = 0; i < 20; ++i) {
            double x = X(rng);
            EXPECT_NEAR(f.value(x + 1.0), f.value(x) + 1.0, 1e-14);
            const double h = 1e-6;
            EXPECT_NEAR(f.deriv(x), (f.value(x + h) - f.value(x - h)) / (2 * h), 1e-8);
            EXPECT_NEAR(f.deriv2(x), (f.deriv(x + h) - f.deriv(x - h)) / (2 * h), 1e-6);
            EXPECT_GT(f.deriv(x), 0.0);
        }
    }
}

TEST(LiftProperty, ReflectionConjugatesByMinusX) {
    auto f = LiftDescriptor::harmonic({0.03, -0.01}, {0.02, 0.005});
    auto r = f.reflected();
    for (double x : {-0.7, 0.0, 0.2, 0.61}) EXPECT_NEAR(r.value(x), -f.value(-x), 1e-15);
}

TEST(FamilyPoint, EvalLiftOrders) {
    FamilyPoint fp{LiftDescriptor::arnold(0.5), 0.2};
    EXPECT_NEAR(eval_lift(fp, 0.1, 0), fp.lift.value(0.1) + 0.2, 1e-16);
    EXPECT_EQ(eval_lift(fp, 0.1, 1), fp.lift.deriv(0.1));
    EXPECT_EQ(eval_lift(fp, 0.1, 2), fp.lift.deriv2(0.1));
    EXPECT_THROW(eval_lift(fp, 0.1, 3), DomainError);
}

TEST(Iterate, ForwardBackwardRoundTrip) {
    FamilyPoint fp{LiftDescriptor::arnold(0.8), 0.37};
    auto fwd = iterate<double>(fp, 0.123, 200);
    auto back = iterate<double>(fp, fwd.points.back(), -200);
    EXPECT_NEAR(back.points.back(), 0.123, 1e-11);
    EXPECT_NEAR(fwd.derivs.back() * back.derivs.back(), 1.0, 1e-10);
    EXPECT_THROW(iterate<double>(fp, 0.0, 11, 10), CapExceeded);
}

TEST(Iterate, EquivarianceUnderIntegerShift) {
    FamilyPoint fp{LiftDescriptor::harmonic({0.1}, {0.05}), 0.21};
    auto a = iterate<double>(fp, 0.4, 50);
    auto b = iterate<double>(fp, 1.4, 50);
    for (std::size_t j = 0; j < a.points.size(); ++j) {
        EXPECT_NEAR(b.points[j], a.points[j] + 1.0, 1e-12);
        EXPECT_NEAR(b.derivs[j], a.derivs[j], 1e-12 * a.derivs[j]);
    }
}

TEST(Iterate, ChainRuleMatchesFiniteDifference) {
    FamilyPoint fp{LiftDescriptor::arnold(0.6), 0.1};
    const int n = 12;
    auto seg = iterate<double>(fp, 0.3, n);
    const double h = 1e-6;
    double fd = (iterate_point<double>(fp, 0.3 + h, n) - iterate_point<double>(fp, 0.3 - h, n)) / (2 * h);
    EXPECT_NEAR(seg.derivs.back(), fd, 1e-6 * std::fabs(fd));
}

TEST(Iterate, InverseSolvesEquation) {
    FamilyPoint fp{LiftDescriptor::arnold(0.95), -0.3};
    for (double x : {-2.5, -0.01, 0.0, 0.49, 0.5, 7.3}) {
        double y = invert(fp, x);
        EXPECT_NEAR(fp.value(y), x, 1e-13);
    }
}

TEST(Iterate, DoubleDoubleAgreesWithBinary64) {
    FamilyPoint fp{LiftDescriptor::arnold(0.5), 0.6145};
    auto a = iterate<double>(fp, 0.1, 1000);
    auto b = iterate<DoubleDouble>(fp, DoubleDouble(0.1), 1000);
    EXPECT_NEAR(a.points.back(), to_double(b.points.back()), 1e-9);
}

TEST(DoubleDouble, ArithmeticAgainstMultiprecision) {
    using Big = boost::multiprecision::cpp_bin_float_100;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    auto big = [](const DoubleDouble& d) { return Big(d.hi()) + Big(d.lo()); };
    for (int i = 0; i < 200; ++i) {
        DoubleDouble a = DoubleDouble(U(rng)) / DoubleDouble(3.0);
        DoubleDouble b = DoubleDouble(U(rng)) + DoubleDouble(1e-20);
        Big A = big(a), B = big(b);
        auto rel = [](const Big& x, const Big& y) { return static_cast<double>(abs(x - y) / abs(y)); };
        EXPECT_LT(rel(big(a + b), A + B), 1e-30);
        EXPECT_LT(rel(big(a * b), A * B), 1e-30);
        EXPECT_LT(rel(big(a / b), A / B), 1e-30);
    }
}

TEST(DoubleDouble, SinCosAgainstMultiprecision) {
    using Dec = boost::multiprecision::cpp_dec_float_50;
    const Dec tau = 2 * boost::math::constants::pi<Dec>();
    for (double x : {0.0, 0.1, 0.125, 0.3, 0.5, 0.77, 0.999, -0.4, 3.3}) {
        DoubleDouble s, c;
        sincos_2pi(DoubleDouble(x) / DoubleDouble(7.0), s, c);
        Dec X = Dec(x) / 7;
        Dec es = sin(tau * X), ec = cos(tau * X);
        EXPECT_LT(static_cast<double>(abs(Dec(s.hi()) + Dec(s.lo()) - es)), 1e-30) << x;
        EXPECT_LT(static_cast<double>(abs(Dec(c.hi()) + Dec(c.lo()) - ec)), 1e-30) << x;
    }
}

TEST(DistortionConstants, ArnoldMatchesClosedForm) {
    for (double K : {0.1, 0.5, 0.9}) {
        auto dc = distortion_constants(LiftDescriptor::arnold(K));
        double M = kTau * K / std::sqrt(1.0 - K * K);
        EXPECT_NEAR(dc.M, M, 1e-9 * M) << K;
        // Independent dense scan of sup |f''| / f'^2.
        double inv = 0.0;
        for (int i = 0; i < 1'000'000; ++i) {
            double x = i / 1e6;
            double d1 = 1.0 + K * std::cos(kTau * x), d2 = -kTau * K * std::sin(kTau * x);
            inv = std::max(inv, std::fabs(d2) / (d1 * d1));
        }
        EXPECT_NEAR(dc.inverse_side, inv, 1e-6 * inv) << K;
        EXPECT_NEAR(dc.N, std::max(M, inv), 1e-6 * inv) << K;
        EXPECT_GE(dc.N, dc.M);
    }
    EXPECT_NEAR(distortion_constants(LiftDescriptor::arnold(0.5)).M, 3.6276, 1e-4);
}

TEST(DistortionConstants, RotationHasZeroConstants) {
    auto dc = distortion_constants(LiftDescriptor::identity());
    EXPECT_EQ(dc.M, 0.0);
    EXPECT_EQ(dc.N, 0.0);
}
