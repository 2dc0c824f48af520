// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "soundfusion/denoiser.hpp"
#include "soundfusion/errors.hpp"
#include "soundfusion/rng.hpp"
#include "soundfusion/schedule.hpp"

namespace soundfusion {

enum class SamplerMode { Sde, Ode };

std::string to_string(SamplerMode mode);
SamplerMode sampler_mode_from_string(const std::string& name);

struct SamplerConfig {
    SamplerMode mode = SamplerMode::Ode;
    int order = 1;          // 1, 2 or 3
    bool multistep = true;  // false: single-step (order 2 only, midpoint at r1)
    double r1 = 0.5;        // single-step midpoint fraction in (0, 1)
    std::uint64_t seed = 0; // SDE noise stream
};

void validate_config(const SamplerConfig& config);

// Recent model outputs with the lambda they were evaluated at, most recent
// first. Higher-order steps fit a polynomial in lambda through them.
struct ModelOutputEntry {
    double lambda = 0.0;
    Vec output;
};

class ModelOutputHistory {
public:
    explicit ModelOutputHistory(int capacity = 3);
    void push(double lambda, Vec output);
    void reset() { entries_.clear(); }
    int size() const { return static_cast<int>(entries_.size()); }
    int capacity() const { return capacity_; }
    const ModelOutputEntry& entry(int i) const { return entries_.at(i); }

private:
    int capacity_;
    std::vector<ModelOutputEntry> entries_;
};

// One order-1 step toward data (to_t <= x.t; to_t == x.t is the h -> 0
// identity). x_theta is the model output at x; noise must match the latent
// dimension for the SDE step.
Latent sde_step_order1(const Latent& x, const Vec& x_theta, int to_t,
                       const NoiseSchedule& schedule, const Vec& noise);
Latent ode_step_order1(const Latent& x, const Vec& x_theta, int to_t,
                       const NoiseSchedule& schedule);

// DDIM update x' = alpha' * x0_hat + sigma' * eps; algebraically identical
// to ode_step_order1 with x_theta = model_output(x, eps).
Latent ddim_step(const Latent& x, const Vec& eps, int to_t,
                 const NoiseSchedule& schedule);

// Multistep order-2/3 steps. history must contain the model output at x
// (entry 0) plus one/two previous outputs at strictly smaller lambdas.
Latent step_order2(const Latent& x, const ModelOutputHistory& history, int to_t,
                   const SamplerConfig& config, const NoiseSchedule& schedule,
                   const Vec& noise);
Latent step_order3(const Latent& x, const ModelOutputHistory& history, int to_t,
                   const SamplerConfig& config, const NoiseSchedule& schedule,
                   const Vec& noise);

struct Trajectory {
    std::vector<Latent> states;     // states.front() is the start point
    std::vector<Vec> model_outputs; // output used for the step leaving states[i]
    std::vector<Vec> noise_draws;   // per-step SDE draws; empty vecs for ODE
    SamplerMode mode = SamplerMode::Ode;
    int order = 1;
    bool multistep = true;
    std::uint64_t seed = 0;
    std::uint64_t schedule_fingerprint = 0;
};

// Integrates from start.t down to stop_t, consulting the oracle once per
// step (twice per step in single-step mode, doubled again when
// cond.guidance_scale != 1, which adds a null-condition evaluation).
Trajectory sample(const Latent& start, const DenoiserOracle& oracle,
                  const Condition& cond, const SamplerConfig& config,
                  const NoiseSchedule& schedule, int stop_t = 0);

namespace detail {

// Continues an in-progress trajectory down to stop_t, sharing the caller's
// noise stream and output history; fusion stitches its two phases with this.
void run_sampling(Trajectory& traj, ModelOutputHistory& history, CounterRng& rng,
                  const DenoiserOracle& oracle, const Condition& cond,
                  const SamplerConfig& config, const NoiseSchedule& schedule,
                  int stop_t);

} // namespace detail

} // namespace soundfusion
