// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/inversion.hpp"

#include <cmath>
#include <stdexcept>

#include "soundfusion/rng.hpp"

namespace soundfusion {

std::string to_string(InversionVariant variant) {
    switch (variant) {
        case InversionVariant::DeterministicSde: return "sde";
        case InversionVariant::DeterministicOde: return "ode";
        case InversionVariant::ForwardDiffusion: return "forward";
        case InversionVariant::StochasticRetained: return "stochastic";
    }
    throw std::invalid_argument("unknown inversion variant");
}

InversionVariant inversion_variant_from_string(const std::string& name) {
    if (name == "sde") return InversionVariant::DeterministicSde;
    if (name == "ode") return InversionVariant::DeterministicOde;
    if (name == "forward") return InversionVariant::ForwardDiffusion;
    if (name == "stochastic") return InversionVariant::StochasticRetained;
    throw std::invalid_argument("unknown inversion variant: " + name);
}

namespace {

void require_step_target(const Vec& x_prev, const Vec& x0,
                         const NoiseSchedule& schedule, int to_t) {
    if (to_t < 1 || !schedule.valid_index(to_t))
        throw std::invalid_argument("invert step: to_t must be in [1, num_steps)");
    if (x_prev.size() != x0.size() || x0.empty())
        throw std::invalid_argument("invert step: dimension mismatch");
}

} // namespace

Vec invert_sde_step(const Vec& x_prev, const Vec& x0,
                    const NoiseSchedule& schedule, int to_t) {
    require_step_target(x_prev, x0, schedule, to_t);
    const int s = to_t - 1;
    const double h = schedule.lambda(s) - schedule.lambda(to_t); // > 0
    const double rescale = (schedule.sigma(to_t) / schedule.sigma(s)) * std::exp(h);
    const double pull = schedule.alpha(s) * -std::expm1(-2.0 * h); // alpha_s (1 - e^{-2h})
    Vec out(x_prev.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = rescale * (x_prev[i] - pull * x0[i]);
    return out;
}

Vec invert_ode_step(const Vec& x_prev, const Vec& x0,
                    const NoiseSchedule& schedule, int to_t) {
    require_step_target(x_prev, x0, schedule, to_t);
    const int s = to_t - 1;
    const double rescale = schedule.sigma(to_t) / schedule.sigma(s);
    const double pull =
        schedule.sigma(s) * (std::exp(schedule.lambda(s)) - std::exp(schedule.lambda(to_t)));
    Vec out(x_prev.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = rescale * (x_prev[i] - pull * x0[i]);
    return out;
}

Vec derive_noise_map(const Latent& x_t, const Vec& x0, const NoiseSchedule& schedule) {
    if (!schedule.valid_index(x_t.t))
        throw std::invalid_argument("derive_noise_map: index out of range");
    if (x_t.values.size() != x0.size() || x0.empty())
        throw std::invalid_argument("derive_noise_map: dimension mismatch");
    const double alp = schedule.alpha(x_t.t);
    const double sig = schedule.sigma(x_t.t);
    Vec eps(x0.size());
    for (std::size_t i = 0; i < eps.size(); ++i)
        eps[i] = (x_t.values[i] - alp * x0[i]) / sig;
    return eps;
}

namespace {

InversionRecord make_record(InversionVariant variant, const Vec& x0,
                            const NoiseSchedule& schedule, int t_max,
                            std::uint64_t seed) {
    if (x0.empty()) throw std::invalid_argument("invert: empty x0");
    if (t_max < 0 || !schedule.valid_index(t_max))
        throw std::invalid_argument("invert: t_max out of range");
    InversionRecord r;
    r.variant = variant;
    r.x0 = x0;
    r.schedule_fingerprint = schedule.fingerprint();
    r.seed = seed;
    r.latents.reserve(t_max + 1);
    r.noise_maps.reserve(t_max + 1);
    r.latents.push_back(x0);
    r.noise_maps.push_back(derive_noise_map({x0, 0}, x0, schedule));
    return r;
}

void finish_record(InversionRecord& r, const NoiseSchedule& schedule) {
    for (int t = 1; t < static_cast<int>(r.latents.size()); ++t) {
        check_finite(r.latents[t], "inversion latent");
        r.noise_maps.push_back(derive_noise_map({r.latents[t], t}, r.x0, schedule));
    }
}

} // namespace

InversionRecord invert_sde(const Vec& x0, const NoiseSchedule& schedule, int t_max) {
    InversionRecord r = make_record(InversionVariant::DeterministicSde, x0, schedule, t_max, 0);
    for (int t = 1; t <= t_max; ++t)
        r.latents.push_back(invert_sde_step(r.latents.back(), x0, schedule, t));
    finish_record(r, schedule);
    return r;
}

InversionRecord invert_ode(const Vec& x0, const NoiseSchedule& schedule, int t_max) {
    InversionRecord r = make_record(InversionVariant::DeterministicOde, x0, schedule, t_max, 0);
    for (int t = 1; t <= t_max; ++t)
        r.latents.push_back(invert_ode_step(r.latents.back(), x0, schedule, t));
    finish_record(r, schedule);
    return r;
}

InversionRecord invert_forward_diffusion(const Vec& x0, const NoiseSchedule& schedule,
                                         int t_max, std::uint64_t seed) {
    InversionRecord r =
        make_record(InversionVariant::ForwardDiffusion, x0, schedule, t_max, seed);
    for (int t = 1; t <= t_max; ++t) {
        // fresh draw per t, keyed by (seed, t) so each level is independent
        const Vec z = stream_rng(seed, static_cast<std::uint64_t>(t)).gaussian_vector(x0.size());
        const double sig = schedule.sigma(t);
        Vec x(x0.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = x0[i] + sig * z[i];
        r.latents.push_back(std::move(x));
    }
    finish_record(r, schedule);
    return r;
}

InversionRecord invert_stochastic_retained(const Vec& x0, const NoiseSchedule& schedule,
                                           int t_max, std::uint64_t seed) {
    InversionRecord r =
        make_record(InversionVariant::StochasticRetained, x0, schedule, t_max, seed);
    for (int t = 1; t <= t_max; ++t) {
        Vec x = invert_sde_step(r.latents.back(), x0, schedule, t);
        // retain the fresh-noise term the deterministic inverse drops
        const double h = schedule.lambda(t - 1) - schedule.lambda(t);
        const double scale = schedule.sigma(t) * std::sqrt(std::expm1(2.0 * h));
        const Vec z = stream_rng(seed, static_cast<std::uint64_t>(t)).gaussian_vector(x0.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= scale * z[i];
        r.latents.push_back(std::move(x));
    }
    finish_record(r, schedule);
    return r;
}

Trajectory replay_noise_maps(const InversionRecord& record, SamplerMode mode,
                             const NoiseSchedule& schedule) {
    if (record.latents.empty())
        throw std::invalid_argument("replay: empty record");
    if (record.latents.size() != record.noise_maps.size())
        throw std::invalid_argument("replay: latents and noise maps misaligned");
    if (record.schedule_fingerprint != schedule.fingerprint())
        throw std::invalid_argument("replay: record was built on a different schedule");

    const int t_max = record.t_max();
    Trajectory traj;
    traj.mode = mode;
    traj.order = 1;
    traj.schedule_fingerprint = record.schedule_fingerprint;
    traj.states.push_back({record.latents[t_max], t_max});

    const Vec zero(record.dimension(), 0.0);
    for (int t = t_max; t >= 1; --t) {
        const Latent& x = traj.states.back();
        const Vec m = model_output(x.values, record.noise_maps[t],
                                   schedule.alpha(t), schedule.sigma(t));
        Latent next = mode == SamplerMode::Sde
                          ? sde_step_order1(x, m, t - 1, schedule, zero)
                          : ode_step_order1(x, m, t - 1, schedule);
        check_finite(next.values, "replay step");
        traj.model_outputs.push_back(m);
        traj.noise_draws.push_back({});
        traj.states.push_back(std::move(next));
    }
    return traj;
}

Trajectory reconstruct_exact(const InversionRecord& record, const SamplerConfig& config,
                             const NoiseSchedule& schedule) {
    validate_config(config);
    if (config.order != 1)
        throw std::invalid_argument("reconstruct_exact: replay is defined for order 1");
    const bool deterministic = record.variant == InversionVariant::DeterministicSde ||
                               record.variant == InversionVariant::DeterministicOde;
    if (!deterministic)
        throw std::invalid_argument("reconstruct_exact: record variant is not deterministic");
    const SamplerMode expected = record.variant == InversionVariant::DeterministicSde
                                     ? SamplerMode::Sde
                                     : SamplerMode::Ode;
    if (config.mode != expected)
        throw std::invalid_argument("reconstruct_exact: sampler mode does not match the record variant");
    return replay_noise_maps(record, config.mode, schedule);
}

} // namespace soundfusion
