// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <stdexcept>
#include <cstring>

#include <doctest.h>

#include "soundfusion/fusion.hpp"
#include "soundfusion/metrics.hpp"
#include "soundfusion/rng.hpp"

using namespace soundfusion;

namespace {

Vec random_vec(std::uint64_t seed, std::size_t n, double scale = 1.0) {
    CounterRng rng = stream_rng(seed, 55);
    Vec v(n);
    for (auto& x : v) x = scale * (2.0 * rng.next_uniform() - 1.0);
    return v;
}

bool bit_identical(const Vec& a, const Vec& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct Fixture {
    NoiseSchedule schedule = build_schedule(ScheduleKind::LogLinearLambda, 100, 10.0, -10.0);
    Vec x0 = random_vec(1, 16);
    Vec x_ref = random_vec(2, 16);
    InversionRecord record = invert_ode(x0, schedule, 99);
    MemorizingOracle oracle{x_ref, 1.0};
};

} // namespace

TEST_CASE("intervention at t = 0 returns the original exactly") {
    Fixture f;
    FusionConfig config;
    config.intervention_t = 0;
    const FusionResult r = fuse(f.record, f.oracle, config, f.schedule);
    CHECK(bit_identical(r.fused.values, f.x0));
    CHECK(r.dist_original == 0.0);
    CHECK(r.dist_reference > 0.0);
    CHECK(r.intervention_t == 0);
}

TEST_CASE("intervention at the top hands the run to the record") {
    Fixture f;
    // constant-output oracle pinned to x0: whatever the splice injects, the
    // post phase drives back to x0
    const ConstantOutputOracle pinned(f.x0);
    const InversionRecord record = invert_ode(f.x0, f.schedule, 99);
    FusionConfig config;
    config.intervention_t = 99;
    const FusionResult r = fuse(record, pinned, config, f.schedule);
    for (std::size_t i = 0; i < f.x0.size(); ++i)
        CHECK(r.fused.values[i] == doctest::Approx(f.x0[i]).epsilon(1e-6));
    CHECK(r.dist_original <= 1e-6);
}

TEST_CASE("no intervention lands within the analytic distance of the reference") {
    Fixture f;
    FusionConfig config; // intervention_t = nullopt
    const FusionResult r = fuse(f.record, f.oracle, config, f.schedule);
    CHECK(r.intervention_t == -1);

    const auto& s = f.schedule;
    const int top = 99;
    const Vec& start = r.trajectory.states.front().values;
    double norm_start = 0.0, norm_ref = 0.0, err = 0.0;
    for (std::size_t i = 0; i < f.x_ref.size(); ++i) {
        norm_start += start[i] * start[i];
        norm_ref += f.x_ref[i] * f.x_ref[i];
        const double d = r.fused.values[i] - f.x_ref[i];
        err += d * d;
    }
    const double big_h = s.lambda(0) - s.lambda(top);
    const double bound = (s.sigma(0) / s.sigma(top)) * std::sqrt(norm_start) +
                         std::abs(1.0 - s.alpha(0) * (1.0 - std::exp(-big_h))) *
                             std::sqrt(norm_ref);
    CHECK(std::sqrt(err) <= bound * (1.0 + 1e-9));
    CHECK(r.dist_reference < 1e-3);
    CHECK(r.dist_reference < r.dist_original);
}

TEST_CASE("fusion is bit-reproducible and seed-sensitive") {
    Fixture f;
    FusionConfig config;
    config.sampler.mode = SamplerMode::Sde;
    config.sampler.seed = 11;
    config.intervention_t = 40;
    const FusionResult a = fuse(f.record, f.oracle, config, f.schedule);
    const FusionResult b = fuse(f.record, f.oracle, config, f.schedule);
    REQUIRE(a.trajectory.states.size() == b.trajectory.states.size());
    for (std::size_t i = 0; i < a.trajectory.states.size(); ++i)
        CHECK(bit_identical(a.trajectory.states[i].values, b.trajectory.states[i].values));

    config.sampler.seed = 12;
    const FusionResult c = fuse(f.record, f.oracle, config, f.schedule);
    CHECK_FALSE(bit_identical(a.fused.values, c.fused.values));
}

TEST_CASE("phases run under their own conditions") {
    Fixture f;
    f.oracle.reset_counters();
    FusionConfig config;
    config.intervention_t = 30;
    (void)fuse(f.record, f.oracle, config, f.schedule);

    const auto log = f.oracle.call_log();
    REQUIRE(log.size() == 99); // 69 reference-phase + 30 post-phase steps
    for (std::size_t i = 0; i < log.size(); ++i) {
        CAPTURE(i);
        CHECK(log[i].tag == (i < 69 ? ConditionTag::Reference : ConditionTag::Null));
    }
    // phase 1 consults at t = 99..31, the splice hands phase 2 the state at
    // t = 30, so lambda rises strictly across the whole fused run
    for (std::size_t i = 1; i < 99; ++i) CHECK(log[i].lambda > log[i - 1].lambda);
    CHECK(log[68].lambda == f.schedule.lambda(31));
    CHECK(log[69].lambda == f.schedule.lambda(30));
}

TEST_CASE("the spliced state appears twice in the trajectory") {
    Fixture f;
    FusionConfig config;
    config.intervention_t = 25;
    const FusionResult r = fuse(f.record, f.oracle, config, f.schedule);
    // 100 phase-1 states (99..25 is 75), the splice, then 25 more
    REQUIRE(r.trajectory.states.size() == 75 + 1 + 25);
    CHECK(r.trajectory.states[74].t == 25);
    CHECK(r.trajectory.states[75].t == 25);
    CHECK(bit_identical(r.trajectory.states[75].values, f.record.latents[25]));
    CHECK_FALSE(bit_identical(r.trajectory.states[74].values, f.record.latents[25]));
}

TEST_CASE("history policy matters exactly when the order is high") {
    Fixture f;
    FusionConfig persist;
    persist.intervention_t = 50;
    persist.sampler.order = 3;
    FusionConfig reset = persist;
    reset.history_policy = HistoryPolicy::Reset;

    const FusionResult a = fuse(f.record, f.oracle, persist, f.schedule);
    const FusionResult b = fuse(f.record, f.oracle, reset, f.schedule);
    CHECK_FALSE(bit_identical(a.fused.values, b.fused.values));

    FusionConfig p1 = persist, r1 = reset;
    p1.sampler.order = 1;
    r1.sampler.order = 1;
    const FusionResult c = fuse(f.record, f.oracle, p1, f.schedule);
    const FusionResult d = fuse(f.record, f.oracle, r1, f.schedule);
    CHECK(bit_identical(c.fused.values, d.fused.values)); // order 1 ignores history
}

TEST_CASE("distances trade off monotonically along the intervention sweep") {
    Fixture f;
    FusionConfig base; // ode order 1
    const std::vector<int> t_values{0, 20, 40, 60, 80, 99};
    const auto rows = sweep_intervention(f.record, f.oracle, base, {1}, t_values, f.schedule);
    REQUIRE(rows.size() == t_values.size());

    std::vector<double> ts, d_orig, d_ref;
    for (const auto& row : rows) {
        ts.push_back(row.intervention_t);
        d_orig.push_back(row.dist_original);
        d_ref.push_back(row.dist_reference);
    }
    CHECK(spearman(ts, d_orig) >= 0.8);
    CHECK(spearman(ts, d_ref) <= -0.8);
    CHECK(rows.front().dist_original == 0.0);
    CHECK(rows.back().dist_reference < rows.front().dist_reference);
}

TEST_CASE("sweep covers the order/point grid and matches direct fusion") {
    Fixture f;
    FusionConfig base;
    base.sampler.seed = 3;
    const auto rows =
        sweep_intervention(f.record, f.oracle, base, {1, 2, 3}, {10, 50, 90}, f.schedule);
    REQUIRE(rows.size() == 9);
    CHECK(rows[0].order == 1);
    CHECK(rows[8].order == 3);
    CHECK(rows[8].intervention_t == 90);
    for (const auto& row : rows) CHECK(row.seed == 3);

    FusionConfig direct = base;
    direct.sampler.order = 2;
    direct.intervention_t = 50;
    const FusionResult r = fuse(f.record, f.oracle, direct, f.schedule);
    CHECK(rows[4].dist_original == r.dist_original);
    CHECK(rows[4].dist_reference == r.dist_reference);

    CHECK(sweep_intervention(f.record, f.oracle, base, {1}, {}, f.schedule).empty());
}

TEST_CASE("fusion rejects bad setups") {
    Fixture f;

    SUBCASE("intervention beyond the record depth") {
        const InversionRecord shallow = invert_ode(f.x0, f.schedule, 40);
        FusionConfig config;
        config.intervention_t = 60; // valid grid index, absent from the record
        CHECK_THROWS_AS((void)fuse(shallow, f.oracle, config, f.schedule),
                        std::out_of_range);
    }
    SUBCASE("intervention outside the grid") {
        FusionConfig config;
        config.intervention_t = 100;
        CHECK_THROWS_AS((void)fuse(f.record, f.oracle, config, f.schedule),
                        std::invalid_argument);
        config.intervention_t = -3;
        CHECK_THROWS_AS((void)fuse(f.record, f.oracle, config, f.schedule),
                        std::invalid_argument);
    }
    SUBCASE("oracle without a reference") {
        const GaussianPosteriorOracle blind(f.x_ref, 1.0);
        CHECK_THROWS_AS((void)fuse(f.record, blind, FusionConfig{}, f.schedule),
                        std::invalid_argument);
    }
    SUBCASE("reference dimension mismatch") {
        const MemorizingOracle wrong(random_vec(9, 8), 1.0);
        CHECK_THROWS_AS((void)fuse(f.record, wrong, FusionConfig{}, f.schedule),
                        std::invalid_argument);
    }
    SUBCASE("schedule mismatch") {
        const auto other = build_schedule(ScheduleKind::Cosine, 100, 10.0, -10.0);
        CHECK_THROWS_AS((void)fuse(f.record, f.oracle, FusionConfig{}, other),
                        std::invalid_argument);
    }
}
