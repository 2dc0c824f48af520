// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/fusion.hpp"

#include <cmath>
#include <stdexcept>

#include "soundfusion/metrics.hpp"
#include "soundfusion/rng.hpp"

namespace soundfusion {

std::string to_string(HistoryPolicy policy) {
    switch (policy) {
        case HistoryPolicy::Persist: return "persist";
        case HistoryPolicy::Reset: return "reset";
    }
    throw std::invalid_argument("unknown history policy");
}

HistoryPolicy history_policy_from_string(const std::string& name) {
    if (name == "persist") return HistoryPolicy::Persist;
    if (name == "reset") return HistoryPolicy::Reset;
    throw std::invalid_argument("unknown history policy: " + name);
}

FusionResult fuse(const InversionRecord& record, const DenoiserOracle& oracle,
                  const FusionConfig& config, const NoiseSchedule& schedule) {
    validate_config(config.sampler);
    if (record.latents.empty())
        throw std::invalid_argument("fuse: empty record");
    if (record.schedule_fingerprint != schedule.fingerprint())
        throw std::invalid_argument("fuse: record was built on a different schedule");
    const auto reference = oracle.reference();
    if (!reference)
        throw std::invalid_argument("fuse: oracle exposes no reference signal");
    if (reference->size() != record.dimension())
        throw std::invalid_argument("fuse: reference and record dimensions differ");
    if (config.intervention_t) {
        const int it = *config.intervention_t;
        if (it < 0 || !schedule.valid_index(it))
            throw std::invalid_argument("fuse: intervention_t outside the schedule");
        if (it > record.t_max())
            throw std::out_of_range("fuse: record holds no latent at intervention_t");
    }

    const int top = schedule.num_steps() - 1;
    const std::size_t dim = record.dimension();

    Trajectory traj;
    traj.mode = config.sampler.mode;
    traj.order = config.sampler.order;
    traj.multistep = config.sampler.multistep;
    traj.seed = config.sampler.seed;
    traj.schedule_fingerprint = schedule.fingerprint();

    CounterRng rng = stream_rng(config.sampler.seed, 0);
    traj.states.push_back({rng.gaussian_vector(dim), top});

    ModelOutputHistory history(std::max(config.sampler.order, 1));
    const int phase1_stop = config.intervention_t.value_or(0);
    detail::run_sampling(traj, history, rng, oracle, config.reference_cond,
                         config.sampler, schedule, phase1_stop);

    if (config.intervention_t) {
        const int it = *config.intervention_t;
        // wholesale replacement by the recorded latent, logged as a second
        // state at the same index so the splice is visible in the trajectory
        traj.states.push_back({record.latents[it], it});
        if (config.history_policy == HistoryPolicy::Reset) history.reset();
        detail::run_sampling(traj, history, rng, oracle, config.post_cond,
                             config.sampler, schedule, 0);
    }

    FusionResult result;
    result.fused = traj.states.back();
    result.dist_original = rmse(result.fused.values, record.x0);
    result.dist_reference = rmse(result.fused.values, *reference);
    result.intervention_t = config.intervention_t.value_or(-1);
    result.trajectory = std::move(traj);
    return result;
}

std::vector<SweepRow> sweep_intervention(const InversionRecord& record,
                                         const DenoiserOracle& oracle,
                                         const FusionConfig& base,
                                         const std::vector<int>& orders,
                                         const std::vector<int>& t_values,
                                         const NoiseSchedule& schedule) {
    std::vector<SweepRow> rows;
    rows.reserve(orders.size() * t_values.size());
    for (int order : orders) {
        for (int it : t_values) {
            FusionConfig config = base;
            config.sampler.order = order;
            config.intervention_t = it;
            const FusionResult r = fuse(record, oracle, config, schedule);
            rows.push_back({order, config.sampler.mode, it, r.dist_original,
                            r.dist_reference, config.sampler.seed});
        }
    }
    return rows;
}

} // namespace soundfusion
