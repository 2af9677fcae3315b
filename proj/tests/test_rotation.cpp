#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rotascope/rotation.hpp"

using namespace rotascope;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

}  // namespace

TEST(RotationFarey, IdentityAtRationalLocks) {
    auto e = rotation_farey(FamilyPoint{LiftDescriptor::identity(), 0.5});
    ASSERT_TRUE(e.locked.has_value());
    EXPECT_EQ(*e.locked, (Rational{1, 2}));
    EXPECT_EQ(e.value, 0.5);
    EXPECT_EQ(e.radius, 0.0);
}

TEST(RotationFarey, IdentityAtIrrationalEnclosesParameter) {
    for (double t : {kGolden, 0.1234567, std::sqrt(2.0) - 1.0}) {
        auto e = rotation_farey(FamilyPoint{LiftDescriptor::identity(), t}, 1e-10);
        EXPECT_FALSE(e.locked.has_value());
        EXPECT_LE(e.radius, 1e-10);
        EXPECT_LE(std::fabs(e.value - t), e.radius + 1e-15);
    }
}

TEST(RotationFarey, ArnoldInsideZeroPlateau) {
    auto e = rotation_farey(FamilyPoint{LiftDescriptor::arnold(0.5), 0.01});
    ASSERT_TRUE(e.locked.has_value());
    EXPECT_EQ(*e.locked, (Rational{0, 1}));
}

TEST(RotationFarey, TrailFollowsConvergents) {
    // For the identity at the golden mean the Stern-Brocot turning points are the Fibonacci ratios.
    auto e = rotation_farey(FamilyPoint{LiftDescriptor::identity(), kGolden}, 1e-9);
    auto cf = continued_fraction(kGolden, 30);
    ASSERT_GE(e.trail.size(), 10u);
    for (const auto& r : e.trail) {
        bool found = std::find(cf.convergents.begin(), cf.convergents.end(), r) != cf.convergents.end();
        EXPECT_TRUE(found) << r.str();
    }
}

TEST(RotationFarey, BracketContainsValue) {
    auto e = rotation_farey(FamilyPoint{LiftDescriptor::arnold(0.7), 0.31}, 1e-9);
    EXPECT_LE(e.lower.value(), e.value + 1e-15);
    EXPECT_GE(e.upper.value(), e.value - 1e-15);
}

TEST(RotationProperty, FareyAgreesWithBirkhoff) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        double K = 0.95 * U(rng), t = U(rng) - 0.5;
        FamilyPoint fp{LiftDescriptor::arnold(K), t};
        auto f = rotation_farey(fp, 1e-10);
        auto b = rotation_birkhoff(fp, 0.0, 20'000);
        EXPECT_LE(std::fabs(f.value - b.value), f.radius + b.radius) << K << " " << t;
    }
}

TEST(RotationProperty, IntegerShiftAndReflection) {
    auto lift = LiftDescriptor::harmonic({0.08}, {0.03});
    for (double t : {-0.3, 0.05, 0.41}) {
        auto a = rotation_farey(FamilyPoint{lift, t}, 1e-10);
        auto b = rotation_farey(FamilyPoint{lift, t + 1.0}, 1e-10);
        auto r = rotation_farey(FamilyPoint{lift.reflected(), -t}, 1e-10);
        EXPECT_NEAR(b.value, a.value + 1.0, a.radius + b.radius + 1e-15);
        EXPECT_NEAR(r.value, -a.value, a.radius + r.radius + 1e-15);
    }
}

TEST(RotationProperty, MonotoneInParameter) {
    auto lift = LiftDescriptor::arnold(0.8);
    double running_lo = -INFINITY;
    for (int i = 0; i <= 60; ++i) {
        double t = -0.5 + i / 60.0;
        auto e = rotation_farey(FamilyPoint{lift, t}, 1e-10);
        EXPECT_GE(e.hi() + 1e-12, running_lo) << t;
        running_lo = std::max(running_lo, e.lo());
    }
}

TEST(RotationFarey, DoubleDoubleAgrees) {
    auto e64 = rotation_farey(FamilyPoint{LiftDescriptor::arnold(0.5, 15), 0.3}, 1e-10);
    auto edd = rotation_farey(FamilyPoint{LiftDescriptor::arnold(0.5, 24), 0.3}, 1e-10);
    EXPECT_NEAR(e64.value, edd.value, e64.radius + edd.radius);
}

TEST(CompareRotation, SignAgainstTarget) {
    FamilyPoint id{LiftDescriptor::identity(), 0.3};
    EXPECT_EQ(compare_rotation(id, 0.31), -1);
    EXPECT_EQ(compare_rotation(id, 0.29), 1);
    FamilyPoint ar{LiftDescriptor::arnold(0.5), 0.6};
    auto e = rotation_farey(ar, 1e-10);
    EXPECT_EQ(compare_rotation(ar, e.value + 1e-6), -1);
    EXPECT_EQ(compare_rotation(ar, e.value - 1e-6), 1);
}

TEST(RotationBirkhoff, Validation) {
    FamilyPoint fp{LiftDescriptor::identity(), 0.25};
    EXPECT_THROW(rotation_birkhoff(fp, 0.0, 0), DomainError);
    auto b = rotation_birkhoff(fp, 0.0, 1000);
    EXPECT_NEAR(b.value, 0.25, 1e-12);
    EXPECT_DOUBLE_EQ(b.radius, 1e-3);
}
