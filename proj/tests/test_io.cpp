#include <cmath>

#include <gtest/gtest.h>

#include "rotascope/io.hpp"
#include "rotascope/verify.hpp"

using namespace rotascope;

TEST(LiftJson, RoundTrip) {
    for (const auto& lift : {LiftDescriptor::arnold(0.7, 24), LiftDescriptor::identity(),
                             LiftDescriptor::harmonic({0.05, -0.01}, {0.02})}) {
        json j = lift_to_json(lift);
        LiftDescriptor back = lift_from_json(json::parse(j.dump()));
        EXPECT_EQ(back.family(), lift.family());
        EXPECT_EQ(back.precision(), lift.precision());
        for (double x : {0.0, 0.17, 0.5, 0.83}) {
            EXPECT_EQ(back.value(x), lift.value(x));
            EXPECT_EQ(back.deriv(x), lift.deriv(x));
        }
    }
    EXPECT_EQ(lift_to_json(LiftDescriptor::arnold(0.5)).at("K"), 0.5);
}

TEST(LiftJson, RejectsMalformedInput) {
    EXPECT_THROW(lift_from_json(json::parse(R"({"family": "arnold"})")), DomainError);
    EXPECT_THROW(lift_from_json(json::parse(R"({"family": "arnold", "K": 1.2})")), DomainError);
    EXPECT_THROW(lift_from_json(json::parse(R"({"coefficients": {"sin": ["a"], "cos": []}})")), DomainError);
    EXPECT_THROW(lift_from_json(json::parse(R"({"coefficients": {"sin": [0.5], "cos": []}})")), DomainError);
    EXPECT_THROW(lift_from_json(json::parse("[1, 2]")), DomainError);
}

TEST(ResultJson, RotationAndPlateau) {
    auto e = rotation_farey(FamilyPoint{LiftDescriptor::arnold(0.5), 0.01});
    json j = to_json(e);
    EXPECT_EQ(j.at("locked"), "0/1");
    EXPECT_EQ(j.at("method"), "farey");
    auto p = to_json(plateau_endpoints(LiftDescriptor::arnold(0.5), {0, 1}));
    EXPECT_EQ(p.at("p"), 0);
    EXPECT_EQ(p.at("q"), 1);
    EXPECT_NEAR(p.at("t_right").get<double>(), 0.5 / (2.0 * std::numbers::pi), 1e-10);
}

TEST(ResultJson, CertificateCarriesChecks) {
    const auto lift = LiftDescriptor::arnold(0.5);
    double t0 = inverse_rho(lift, (std::sqrt(5.0) - 1.0) / 2.0).t;
    json cert = to_json(hat_ell_bound_check(lift, t0, 0.0, 5));
    ASSERT_TRUE(cert.contains("checks"));
    EXPECT_TRUE(certificate_passes(cert));
    EXPECT_EQ(cert.at("convergent"), "5/8");
    cert["checks"].begin().value() = false;
    EXPECT_FALSE(certificate_passes(cert));
}

TEST(VerifyReport, SchemaHasExactlyTheReportKeys) {
    auto report = run_verify("brunovsky");
    json j = report.to_json();
    ASSERT_EQ(j.at("checks").size(), 1u);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.at("checks")[0].items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"id", "ref", "status", "observed", "bound", "tol", "seconds"}));
    EXPECT_EQ(j.at("checks")[0].at("status"), "pass");
    EXPECT_TRUE(report.all_pass());
}

TEST(VerifyReport, UnknownSuiteRejected) { EXPECT_THROW(run_verify("nonsense"), DomainError); }

TEST(VerifyReport, DeterministicForSeed) {
    auto a = run_verify("oracles", 7);
    auto b = run_verify("oracles", 7);
    EXPECT_EQ(a.checks[0].observed, b.checks[0].observed);
    EXPECT_EQ(a.checks[0].status, b.checks[0].status);
}
