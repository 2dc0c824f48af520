// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <stdexcept>
#include <cstring>
#include <limits>

#include <doctest.h>

#include "soundfusion/inversion.hpp"
#include "soundfusion/rng.hpp"
#include "soundfusion/sampler.hpp"
#include "soundfusion/schedule.hpp"

using namespace soundfusion;

namespace {

NoiseSchedule two_point() {
    return build_schedule(ScheduleKind::LogLinearLambda, 2, 0.0, -std::log(2.0));
}

Vec random_vec(std::uint64_t seed, std::size_t n, double scale = 1.0) {
    CounterRng rng = stream_rng(seed, 21);
    Vec v(n);
    for (auto& x : v) x = scale * (2.0 * rng.next_uniform() - 1.0);
    return v;
}

bool bit_identical(const Vec& a, const Vec& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Exact solutions for polynomial-in-lambda model outputs, derived by
// integrating e^{-tau} f(lambda_t - tau) (ODE) and 2 e^{-2 tau} f (SDE)
// term by term; the independent oracle for the order-2/3 exactness checks.
double exact_ode(double x, double lam_s, double lam_t, double sig_s, double sig_t,
                 double alp_t, double p, double q, double r) {
    const double h = lam_t - lam_s;
    const double f_t = p + q * lam_t + r * lam_t * lam_t;
    const double fp_t = q + 2.0 * r * lam_t;
    const double i0 = 1.0 - std::exp(-h);
    const double i1 = 1.0 - (1.0 + h) * std::exp(-h);
    const double i2 = 2.0 - (h * h + 2.0 * h + 2.0) * std::exp(-h);
    return (sig_t / sig_s) * x + alp_t * (f_t * i0 - fp_t * i1 + r * i2);
}

double exact_sde(double x, double lam_s, double lam_t, double sig_s, double sig_t,
                 double alp_t, double p, double q, double r) {
    const double h = lam_t - lam_s;
    const double f_t = p + q * lam_t + r * lam_t * lam_t;
    const double fp_t = q + 2.0 * r * lam_t;
    const double i0 = (1.0 - std::exp(-2.0 * h)) / 2.0;
    const double i1 = (1.0 - (1.0 + 2.0 * h) * std::exp(-2.0 * h)) / 4.0;
    const double i2 = (2.0 - (4.0 * h * h + 4.0 * h + 2.0) * std::exp(-2.0 * h)) / 8.0;
    return (sig_t / sig_s) * std::exp(-h) * x +
           2.0 * alp_t * (f_t * i0 - fp_t * i1 + r * i2);
}

} // namespace

TEST_CASE("zero-gap steps are the identity") {
    const auto s = default_schedule();
    const Latent x{random_vec(1, 4), 57};
    const Vec m = random_vec(2, 4);
    CHECK(bit_identical(sde_step_order1(x, m, 57, s, {}).values, x.values));
    CHECK(bit_identical(ode_step_order1(x, m, 57, s).values, x.values));
    CHECK(bit_identical(ddim_step(x, m, 57, s).values, x.values));
}

TEST_CASE("order-1 steps undo the frozen inversion examples") {
    const auto s = two_point();
    const Vec x0{1.0};

    const Vec up_sde = invert_sde_step(x0, x0, s, 1);
    CHECK(up_sde[0] == doctest::Approx(1.188181341634830).epsilon(1e-12));
    const Latent back_sde = sde_step_order1({up_sde, 1}, x0, 0, s, {0.0});
    CHECK(back_sde.values[0] == doctest::Approx(1.0).epsilon(1e-12));

    const Vec up_ode = invert_ode_step(x0, x0, s, 1);
    CHECK(up_ode[0] == doctest::Approx(0.8176974685673938).epsilon(1e-12));
    const Latent back_ode = ode_step_order1({up_ode, 1}, x0, 0, s);
    CHECK(back_ode.values[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ddim matches the order-1 ode step on random states") {
    const auto s = default_schedule();
    CounterRng rng = stream_rng(99, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const int from = 1 + static_cast<int>(rng.next_bits() % 199);
        const int to = static_cast<int>(rng.next_bits() % from);
        const Vec x = rng.gaussian_vector(6);
        const Vec eps = rng.gaussian_vector(6);
        const Latent a = ddim_step({x, from}, eps, to, s);
        const Latent b = ode_step_order1({x, from}, model_output({x, from}, eps, s), to, s);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double tol = 1e-10 * std::max(1.0, std::abs(a.values[i]));
            CHECK(std::abs(a.values[i] - b.values[i]) <= tol);
        }
    }
}

TEST_CASE("noiseless steps preserve the signal manifold") {
    const auto s = default_schedule();
    const Vec c = random_vec(5, 3);
    const Vec zero(3, 0.0);
    for (int t = 199; t >= 1; --t) {
        Vec x(3);
        for (int i = 0; i < 3; ++i) x[i] = s.alpha(t) * c[i];
        const Latent via_sde = sde_step_order1({x, t}, c, t - 1, s, zero);
        const Latent via_ode = ode_step_order1({x, t}, c, t - 1, s);
        for (int i = 0; i < 3; ++i) {
            const double want = s.alpha(t - 1) * c[i];
            CHECK(via_sde.values[i] == doctest::Approx(want).epsilon(1e-12));
            CHECK(via_ode.values[i] == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("noiseless sde and ode steps differ by the contracted noise component") {
    // decompose x = alpha c + sigma e; the sde drift shrinks e by e^{-h}
    // while the ode keeps it, so sde - ode = sigma_to (e^{-h} - 1) e
    const auto s = default_schedule();
    const Vec c = random_vec(8, 4);
    const Vec x = random_vec(9, 4);
    const Vec zero(4, 0.0);
    for (int t : {199, 150, 80, 10}) {
        const int to = t - 5;
        const double h = s.lambda(to) - s.lambda(t);
        const Latent a = sde_step_order1({x, t}, c, to, s, zero);
        const Latent b = ode_step_order1({x, t}, c, to, s);
        for (int i = 0; i < 4; ++i) {
            const double e = (x[i] - s.alpha(t) * c[i]) / s.sigma(t);
            const double want = s.sigma(to) * (std::exp(-h) - 1.0) * e;
            const double got = a.values[i] - b.values[i];
            CHECK(got == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("constant history collapses order 2 and 3 onto order 1") {
    const auto s = default_schedule();
    const Vec c = random_vec(13, 5);
    const Vec x = random_vec(14, 5);
    const Vec noise = random_vec(15, 5);
    for (SamplerMode mode : {SamplerMode::Ode, SamplerMode::Sde}) {
        CAPTURE(to_string(mode));
        SamplerConfig config;
        config.mode = mode;
        const int t = 120, to = 119;
        ModelOutputHistory history(3);
        history.push(s.lambda(t + 2), c);
        history.push(s.lambda(t + 1), c);
        history.push(s.lambda(t), c);

        const Latent base = mode == SamplerMode::Sde
                                ? sde_step_order1({x, t}, c, to, s, noise)
                                : ode_step_order1({x, t}, c, to, s);
        const Latent o2 = step_order2({x, t}, history, to, config, s, noise);
        const Latent o3 = step_order3({x, t}, history, to, config, s, noise);
        for (int i = 0; i < 5; ++i) {
            CHECK(o2.values[i] == doctest::Approx(base.values[i]).epsilon(1e-12));
            CHECK(o3.values[i] == doctest::Approx(base.values[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("order 2 integrates linear-in-lambda outputs exactly") {
    const auto s = default_schedule();
    const double p = 0.7, q = -0.45;
    for (SamplerMode mode : {SamplerMode::Ode, SamplerMode::Sde}) {
        CAPTURE(to_string(mode));
        SamplerConfig config;
        config.mode = mode;
        for (int t : {180, 100, 30}) {
            for (int to : {t - 1, t - 7}) {
                ModelOutputHistory history(2);
                history.push(s.lambda(t + 3), {p + q * s.lambda(t + 3)});
                history.push(s.lambda(t), {p + q * s.lambda(t)});
                const Vec x{0.31};
                const Vec noise{0.0};
                const Latent got = step_order2({x, t}, history, to, config, s, noise);
                const double want =
                    mode == SamplerMode::Ode
                        ? exact_ode(x[0], s.lambda(t), s.lambda(to), s.sigma(t),
                                    s.sigma(to), s.alpha(to), p, q, 0.0)
                        : exact_sde(x[0], s.lambda(t), s.lambda(to), s.sigma(t),
                                    s.sigma(to), s.alpha(to), p, q, 0.0);
                CHECK(std::abs(got.values[0] - want) <=
                      1e-10 * std::max(1.0, std::abs(want)));
            }
        }
    }
}

TEST_CASE("order 3 integrates quadratic-in-lambda outputs exactly") {
    const auto s = default_schedule();
    const double p = 0.2, q = 0.35, r = -0.12;
    auto f = [&](double lam) { return p + q * lam + r * lam * lam; };
    for (SamplerMode mode : {SamplerMode::Ode, SamplerMode::Sde}) {
        CAPTURE(to_string(mode));
        SamplerConfig config;
        config.mode = mode;
        for (int t : {150, 90}) {
            for (int to : {t - 1, t - 4}) {
                ModelOutputHistory history(3);
                history.push(s.lambda(t + 5), {f(s.lambda(t + 5))});
                history.push(s.lambda(t + 2), {f(s.lambda(t + 2))});
                history.push(s.lambda(t), {f(s.lambda(t))});
                const Vec x{-0.6};
                const Vec noise{0.0};
                const Latent got = step_order3({x, t}, history, to, config, s, noise);
                const double want =
                    mode == SamplerMode::Ode
                        ? exact_ode(x[0], s.lambda(t), s.lambda(to), s.sigma(t),
                                    s.sigma(to), s.alpha(to), p, q, r)
                        : exact_sde(x[0], s.lambda(t), s.lambda(to), s.sigma(t),
                                    s.sigma(to), s.alpha(to), p, q, r);
                CHECK(std::abs(got.values[0] - want) <=
                      1e-10 * std::max(1.0, std::abs(want)));
            }
        }
    }
}

TEST_CASE("multistep ode order-1 sampling telescopes to the closed form") {
    const auto s = default_schedule();
    const Vec c = random_vec(31, 6);
    const ConstantOutputOracle oracle(c);
    const Latent start{random_vec(32, 6), 199};

    SamplerConfig config; // ode order 1
    const Trajectory traj = sample(start, oracle, Condition::null(), config, s, 0);
    REQUIRE(traj.states.size() == 200);
    CHECK(traj.states.back().t == 0);

    const double big_h = s.lambda(0) - s.lambda(199);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double want = (s.sigma(0) / s.sigma(199)) * start.values[i] +
                            s.alpha(0) * (1.0 - std::exp(-big_h)) * c[i];
        CHECK(traj.states.back().values[i] == doctest::Approx(want).epsilon(1e-9));
    }

    // terminal error against the oracle target obeys the analytic bound
    double err = 0.0, norm_start = 0.0, norm_c = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double d = traj.states.back().values[i] - c[i];
        err += d * d;
        norm_start += start.values[i] * start.values[i];
        norm_c += c[i] * c[i];
    }
    const double bound = (s.sigma(0) / s.sigma(199)) * std::sqrt(norm_start) +
                         std::abs(1.0 - s.alpha(0) * (1.0 - std::exp(-big_h))) *
                             std::sqrt(norm_c);
    CHECK(std::sqrt(err) <= bound * (1.0 + 1e-9));
}

TEST_CASE("oracle evaluation counts follow the step structure") {
    const auto s = build_schedule(ScheduleKind::LogLinearLambda, 40, 8.0, -8.0);
    const Vec c = random_vec(41, 4);
    const Latent start{random_vec(42, 4), 39};

    SUBCASE("multistep uses one evaluation per step regardless of order") {
        for (int order : {1, 2, 3}) {
            const ConstantOutputOracle oracle(c);
            SamplerConfig config;
            config.order = order;
            (void)sample(start, oracle, Condition::null(), config, s, 0);
            CHECK(oracle.call_count() == 39);
        }
    }
    SUBCASE("single-step order 2 evaluates twice per step") {
        const ConstantOutputOracle oracle(c);
        SamplerConfig config;
        config.order = 2;
        config.multistep = false;
        (void)sample(start, oracle, Condition::null(), config, s, 0);
        CHECK(oracle.call_count() == 2 * 39);
    }
    SUBCASE("guidance away from scale 1 adds a null evaluation") {
        const ConstantOutputOracle oracle(c);
        Condition cond = Condition::reference();
        cond.guidance_scale = 2.5;
        (void)sample(start, oracle, cond, SamplerConfig{}, s, 0);
        CHECK(oracle.call_count() == 2 * 39);
        const auto log = oracle.call_log();
        CHECK(log[0].tag == ConditionTag::Reference);
        CHECK(log[1].tag == ConditionTag::Null);
    }
    SUBCASE("zero steps means zero evaluations") {
        const ConstantOutputOracle oracle(c);
        const Trajectory traj =
            sample({start.values, 12}, oracle, Condition::null(), SamplerConfig{}, s, 12);
        CHECK(oracle.call_count() == 0);
        CHECK(traj.states.size() == 1);
    }
}

TEST_CASE("single-step order 2 is exact for constant outputs") {
    const auto s = build_schedule(ScheduleKind::LogLinearLambda, 30, 6.0, -6.0);
    const Vec c = random_vec(51, 3);
    const ConstantOutputOracle oracle(c);
    const Latent start{random_vec(52, 3), 29};
    SamplerConfig single;
    single.order = 2;
    single.multistep = false;
    SamplerConfig first;
    const Trajectory a = sample(start, oracle, Condition::null(), single, s, 0);
    const Trajectory b = sample(start, oracle, Condition::null(), first, s, 0);
    // with a constant oracle the midpoint reweighting changes nothing
    for (std::size_t i = 0; i < c.size(); ++i)
        CHECK(a.states.back().values[i] ==
              doctest::Approx(b.states.back().values[i]).epsilon(1e-12));
}

TEST_CASE("sde sampling is bit-reproducible per seed") {
    const auto s = build_schedule(ScheduleKind::LogLinearLambda, 60, 9.0, -9.0);
    const Vec c = random_vec(61, 5);
    const GaussianPosteriorOracle oracle(c, 0.7);
    const Latent start{random_vec(62, 5), 59};
    for (int order : {1, 2, 3}) {
        SamplerConfig config;
        config.mode = SamplerMode::Sde;
        config.order = order;
        config.seed = 777;
        const Trajectory a = sample(start, oracle, Condition::null(), config, s, 0);
        const Trajectory b = sample(start, oracle, Condition::null(), config, s, 0);
        REQUIRE(a.states.size() == b.states.size());
        for (std::size_t i = 0; i < a.states.size(); ++i)
            CHECK(bit_identical(a.states[i].values, b.states[i].values));

        config.seed = 778;
        const Trajectory d = sample(start, oracle, Condition::null(), config, s, 0);
        CHECK_FALSE(bit_identical(a.states.back().values, d.states.back().values));
    }
}

TEST_CASE("trajectory records the draws and outputs it used") {
    const auto s = build_schedule(ScheduleKind::LogLinearLambda, 10, 4.0, -4.0);
    const Vec c = random_vec(71, 3);
    const ConstantOutputOracle oracle(c);
    SamplerConfig config;
    config.mode = SamplerMode::Sde;
    config.seed = 5;
    const Trajectory traj =
        sample({random_vec(72, 3), 9}, oracle, Condition::null(), config, s, 0);
    REQUIRE(traj.states.size() == 10);
    REQUIRE(traj.model_outputs.size() == 9);
    REQUIRE(traj.noise_draws.size() == 9);
    for (const Vec& z : traj.noise_draws) CHECK(z.size() == 3);
    for (const Vec& m : traj.model_outputs)
        for (std::size_t i = 0; i < m.size(); ++i)
            CHECK(m[i] == doctest::Approx(c[i]).epsilon(1e-12));
    CHECK(traj.schedule_fingerprint == s.fingerprint());

    SamplerConfig ode;
    const Trajectory traj2 =
        sample({random_vec(72, 3), 9}, oracle, Condition::null(), ode, s, 0);
    for (const Vec& z : traj2.noise_draws) CHECK(z.empty());
}

TEST_CASE("non-finite states abort with a numerical failure") {
    struct ExplodingOracle final : DenoiserOracle {
        std::string name() const override { return "exploding"; }
        Vec implied_output(const Vec& x, double, double, const Condition&) const override {
            return Vec(x.size(), std::numeric_limits<double>::quiet_NaN());
        }
    };
    const auto s = build_schedule(ScheduleKind::LogLinearLambda, 10, 4.0, -4.0);
    const ExplodingOracle oracle;
    CHECK_THROWS_AS(
        (void)sample({random_vec(81, 2), 9}, oracle, Condition::null(), SamplerConfig{}, s, 0),
        NumericalFailure);
}

TEST_CASE("sampler preconditions are enforced") {
    const auto s = default_schedule();
    const Vec c = random_vec(91, 2);
    const ConstantOutputOracle oracle(c);

    SamplerConfig bad;
    bad.order = 4;
    CHECK_THROWS_AS((void)sample({c, 199}, oracle, Condition::null(), bad, s, 0),
                    std::invalid_argument);
    bad.order = 3;
    bad.multistep = false;
    CHECK_THROWS_AS((void)sample({c, 199}, oracle, Condition::null(), bad, s, 0),
                    std::invalid_argument);
    bad.order = 2;
    bad.r1 = 1.5;
    CHECK_THROWS_AS((void)sample({c, 199}, oracle, Condition::null(), bad, s, 0),
                    std::invalid_argument);

    CHECK_THROWS_AS((void)sample({c, 199}, oracle, Condition::null(), SamplerConfig{}, s, 260),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)sample({c, 30}, oracle, Condition::null(), SamplerConfig{}, s, 40),
                    std::invalid_argument);

    // steps must move toward data
    CHECK_THROWS_AS((void)ode_step_order1({c, 10}, c, 11, s), std::invalid_argument);
    CHECK_THROWS_AS((void)sde_step_order1({c, 10}, c, 9, s, {0.0}), std::invalid_argument);

    ModelOutputHistory short_history(2);
    short_history.push(s.lambda(10), c);
    CHECK_THROWS_AS((void)step_order2({c, 10}, short_history, 9, SamplerConfig{}, s, {}),
                    std::invalid_argument);

    ModelOutputHistory stale(2);
    stale.push(s.lambda(12), c);
    stale.push(s.lambda(11), c); // front is not the state's lambda
    CHECK_THROWS_AS((void)step_order2({c, 10}, stale, 9, SamplerConfig{}, s, {}),
                    std::invalid_argument);
}

TEST_CASE("history is bounded by its capacity") {
    ModelOutputHistory history(2);
    history.push(3.0, {1.0});
    history.push(2.0, {2.0});
    history.push(1.0, {3.0});
    CHECK(history.size() == 2);
    CHECK(history.entry(0).lambda == 1.0);
    CHECK(history.entry(1).lambda == 2.0);
    history.reset();
    CHECK(history.size() == 0);
    CHECK_THROWS_AS(ModelOutputHistory(0), std::invalid_argument);
}
