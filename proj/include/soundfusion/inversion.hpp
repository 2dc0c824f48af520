// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "soundfusion/sampler.hpp"
#include "soundfusion/schedule.hpp"

namespace soundfusion {

// How the latent chain x_hat_0..x_hat_tmax was produced from x0.
enum class InversionVariant {
    DeterministicSde, // closed-form inverse of the order-1 SDE update
    DeterministicOde, // closed-form inverse of the order-1 ODE update
    ForwardDiffusion, // x0 + sigma_t * fresh noise (no coupling across t)
    StochasticRetained, // SDE inverse plus the retained fresh-noise term
};

std::string to_string(InversionVariant variant);
InversionVariant inversion_variant_from_string(const std::string& name);

// Latents indexed by t = 0..t_max with latents[0] == x0, plus the noise
// maps eps_t = (x_hat_t - alpha_t x0) / sigma_t that reproduce each latent
// from x0. Building one never consults a denoiser.
struct InversionRecord {
    InversionVariant variant = InversionVariant::DeterministicSde;
    Vec x0;
    std::vector<Vec> latents;
    std::vector<Vec> noise_maps;
    std::uint64_t schedule_fingerprint = 0;
    std::uint64_t seed = 0; // only meaningful for the stochastic variants

    int t_max() const { return static_cast<int>(latents.size()) - 1; }
    std::size_t dimension() const { return x0.size(); }
};

// One recurrence step t-1 -> t (to_t >= 1). Exposed so tests can compose a
// single inversion step with the matching sampler step.
Vec invert_sde_step(const Vec& x_prev, const Vec& x0,
                    const NoiseSchedule& schedule, int to_t);
Vec invert_ode_step(const Vec& x_prev, const Vec& x0,
                    const NoiseSchedule& schedule, int to_t);

InversionRecord invert_sde(const Vec& x0, const NoiseSchedule& schedule, int t_max);
InversionRecord invert_ode(const Vec& x0, const NoiseSchedule& schedule, int t_max);
InversionRecord invert_forward_diffusion(const Vec& x0, const NoiseSchedule& schedule,
                                         int t_max, std::uint64_t seed);
InversionRecord invert_stochastic_retained(const Vec& x0, const NoiseSchedule& schedule,
                                           int t_max, std::uint64_t seed);

Vec derive_noise_map(const Latent& x_t, const Vec& x0, const NoiseSchedule& schedule);

// Deterministic order-1 replay of a record from t_max back to 0: at each t
// the stored noise map stands in for the model's prediction and no
// stochastic draws are made, so a deterministic record reproduces x0 to
// rounding. Works for any variant; the ablation harness uses it to show how
// the non-deterministic variants fail to come back.
Trajectory replay_noise_maps(const InversionRecord& record, SamplerMode mode,
                             const NoiseSchedule& schedule);

// Replay restricted to the deterministic variants, with the mode checked
// against the variant; config.order must be 1.
Trajectory reconstruct_exact(const InversionRecord& record, const SamplerConfig& config,
                             const NoiseSchedule& schedule);

} // namespace soundfusion
