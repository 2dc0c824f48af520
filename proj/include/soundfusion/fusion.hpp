// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soundfusion/denoiser.hpp"
#include "soundfusion/inversion.hpp"
#include "soundfusion/sampler.hpp"

namespace soundfusion {

// What happens to the model-output history at the intervention point.
// Persist keeps the pre-intervention outputs (higher-order steps then mix
// information from both sides of the splice); Reset restarts the warm-up.
enum class HistoryPolicy { Persist, Reset };

std::string to_string(HistoryPolicy policy);
HistoryPolicy history_policy_from_string(const std::string& name);

struct FusionConfig {
    SamplerConfig sampler;
    // Grid index whose recorded latent replaces the state mid-run; nullopt
    // runs phase 1 all the way down with no splice.
    std::optional<int> intervention_t;
    HistoryPolicy history_policy = HistoryPolicy::Persist;
    Condition reference_cond = Condition::reference();
    Condition post_cond = Condition::null();
};

struct FusionResult {
    Latent fused;          // final state at t = 0
    Trajectory trajectory; // both phases; the spliced state repeats its index
    double dist_original = 0.0;  // rmse(fused, record.x0)
    double dist_reference = 0.0; // rmse(fused, oracle reference)
    int intervention_t = -1;     // -1 when no intervention
};

// Phase 1 samples from pure noise at the top of the grid under
// reference_cond; at intervention_t the state is replaced wholesale by the
// recorded latent; phase 2 continues to t = 0 under post_cond. The oracle
// must expose a reference so dist_reference is well defined. Throws
// std::out_of_range when the record has no latent at intervention_t.
FusionResult fuse(const InversionRecord& record, const DenoiserOracle& oracle,
                  const FusionConfig& config, const NoiseSchedule& schedule);

struct SweepRow {
    int order = 1;
    SamplerMode mode = SamplerMode::Ode;
    int intervention_t = 0;
    double dist_original = 0.0;
    double dist_reference = 0.0;
    std::uint64_t seed = 0;
};

// fuse() on the cross product of orders and intervention points, all other
// settings taken from base. Row order: outer loop orders, inner loop t.
std::vector<SweepRow> sweep_intervention(const InversionRecord& record,
                                         const DenoiserOracle& oracle,
                                         const FusionConfig& base,
                                         const std::vector<int>& orders,
                                         const std::vector<int>& t_values,
                                         const NoiseSchedule& schedule);

} // namespace soundfusion
