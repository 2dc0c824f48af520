// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <stdexcept>
#include <cstring>

#include <doctest.h>

#include "soundfusion/schedule.hpp"

using namespace soundfusion;

namespace {

bool bit_identical(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

TEST_CASE("two-point schedule hits the frozen endpoint values") {
    const auto s = build_schedule(ScheduleKind::LogLinearLambda, 2, 0.0, -std::log(2.0));
    REQUIRE(s.num_steps() == 2);
    CHECK(s.alpha(0) == doctest::Approx(0.7071067811865475).epsilon(1e-12));
    CHECK(s.sigma(0) == doctest::Approx(0.7071067811865475).epsilon(1e-12));
    CHECK(s.alpha(1) == doctest::Approx(0.4472135954999579).epsilon(1e-12));
    CHECK(s.sigma(1) == doctest::Approx(0.8944271909999159).epsilon(1e-12));
}

TEST_CASE("lambda zero puts alpha and sigma at the crossover") {
    double a, sg;
    alpha_sigma_from_lambda(0.0, &a, &sg);
    CHECK(a == sg);
    CHECK(a == doctest::Approx(0.7071067811865475).epsilon(1e-14));
}

TEST_CASE("grid invariants hold for both kinds") {
    for (ScheduleKind kind : {ScheduleKind::LogLinearLambda, ScheduleKind::Cosine}) {
        CAPTURE(to_string(kind));
        const auto s = build_schedule(kind, 200, 10.0, -10.0);
        REQUIRE(s.num_steps() == 200);
        CHECK(s.lambda(0) == 10.0);
        CHECK(s.lambda(199) == -10.0);
        for (int t = 0; t < 200; ++t) {
            const double a = s.alpha(t), sg = s.sigma(t);
            CHECK(std::abs(a * a + sg * sg - 1.0) <= 1e-12);
            CHECK(std::abs(s.lambda(t) - std::log(a / sg)) <= 1e-12);
            if (t > 0) {
                CHECK(s.lambda(t) < s.lambda(t - 1));
                CHECK(s.alpha(t) < s.alpha(t - 1));
                CHECK(s.sigma(t) > s.sigma(t - 1));
            }
        }
    }
}

TEST_CASE("log-linear grid is uniform, cosine grid is not") {
    const auto lin = build_schedule(ScheduleKind::LogLinearLambda, 200, 10.0, -10.0);
    const double h01 = lin.lambda(0) - lin.lambda(1);
    CHECK(h01 == doctest::Approx(0.1005025125628141).epsilon(1e-13));
    for (int t = 1; t < 200; ++t)
        CHECK(lin.lambda(t - 1) - lin.lambda(t) == doctest::Approx(h01).epsilon(1e-9));

    const auto cos = build_schedule(ScheduleKind::Cosine, 200, 10.0, -10.0);
    const double c01 = cos.lambda(0) - cos.lambda(1);
    const double cmid = cos.lambda(99) - cos.lambda(100);
    CHECK(std::abs(c01 - cmid) > 1e-3); // concentrates points differently
}

TEST_CASE("cosine kind round-trips lambda through its u parameterization") {
    const auto s = build_schedule(ScheduleKind::Cosine, 50, 4.0, -4.0);
    for (int t = 0; t < 50; ++t) {
        // u(lambda(u)) must be the uniform grid value
        const double u = (2.0 / M_PI) * std::atan(std::exp(-s.lambda(t)));
        const double u0 = (2.0 / M_PI) * std::atan(std::exp(-4.0));
        const double u1 = (2.0 / M_PI) * std::atan(std::exp(4.0));
        const double expect = u0 + (u1 - u0) * t / 49.0;
        CHECK(u == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("step_gap measures the lambda distance and direction") {
    const auto s = build_schedule(ScheduleKind::LogLinearLambda, 2, 0.0, -std::log(2.0));
    const StepGap toward_noise = step_gap(s, 0, 1);
    CHECK(toward_noise.h == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(toward_noise.direction == StepDirection::TowardNoise);
    const StepGap toward_data = step_gap(s, 1, 0);
    CHECK(toward_data.h == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(toward_data.direction == StepDirection::TowardData);

    CHECK_THROWS_AS((void)step_gap(s, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)step_gap(s, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS((void)step_gap(s, -1, 0), std::invalid_argument);
}

TEST_CASE("rebuilding from the lambda grid is bit-identical") {
    for (ScheduleKind kind : {ScheduleKind::LogLinearLambda, ScheduleKind::Cosine}) {
        const auto s = build_schedule(kind, 200, 10.0, -10.0);
        const auto r = schedule_from_lambdas(kind, s.lambdas);
        CHECK(bit_identical(s.lambdas, r.lambdas));
        CHECK(bit_identical(s.alphas, r.alphas));
        CHECK(bit_identical(s.sigmas, r.sigmas));
        CHECK(s.fingerprint() == r.fingerprint());
    }
}

TEST_CASE("fingerprint separates kinds, sizes and bounds") {
    const auto a = build_schedule(ScheduleKind::LogLinearLambda, 200, 10.0, -10.0);
    const auto b = build_schedule(ScheduleKind::LogLinearLambda, 201, 10.0, -10.0);
    const auto c = build_schedule(ScheduleKind::Cosine, 200, 10.0, -10.0);
    const auto d = build_schedule(ScheduleKind::LogLinearLambda, 200, 9.0, -10.0);
    CHECK(a.fingerprint() != b.fingerprint());
    CHECK(a.fingerprint() != c.fingerprint());
    CHECK(a.fingerprint() != d.fingerprint());
    CHECK(a.fingerprint() ==
          build_schedule(ScheduleKind::LogLinearLambda, 200, 10.0, -10.0).fingerprint());
}

TEST_CASE("extreme lambdas stay finite on the stable branches") {
    double a, sg;
    alpha_sigma_from_lambda(40.0, &a, &sg);
    CHECK(a == 1.0); // saturated in double precision
    CHECK(sg == doctest::Approx(std::exp(-40.0)).epsilon(1e-12));
    CHECK(std::isfinite(sg));
    alpha_sigma_from_lambda(-40.0, &a, &sg);
    CHECK(sg == 1.0);
    CHECK(a == doctest::Approx(std::exp(-40.0)).epsilon(1e-12));
}

TEST_CASE("schedule construction rejects bad arguments") {
    CHECK_THROWS_AS((void)build_schedule(ScheduleKind::LogLinearLambda, 1, 1.0, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)build_schedule(ScheduleKind::LogLinearLambda, 10, -1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)build_schedule(ScheduleKind::LogLinearLambda, 10, 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        (void)build_schedule(ScheduleKind::LogLinearLambda, 10, std::nan(""), -1.0),
        std::invalid_argument);
    CHECK_THROWS_AS((void)schedule_from_lambdas(ScheduleKind::LogLinearLambda, {1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)schedule_from_lambdas(ScheduleKind::LogLinearLambda, {0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)schedule_kind_from_string("triangular"), std::invalid_argument);
}
