// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/compare.hpp"

#include <stdexcept>

namespace soundfusion {

namespace {

InversionRecord build_record(InversionVariant variant, const Vec& x0,
                             const NoiseSchedule& schedule, int t_max,
                             std::uint64_t seed) {
    switch (variant) {
        case InversionVariant::DeterministicSde: return invert_sde(x0, schedule, t_max);
        case InversionVariant::DeterministicOde: return invert_ode(x0, schedule, t_max);
        case InversionVariant::ForwardDiffusion:
            return invert_forward_diffusion(x0, schedule, t_max, seed);
        case InversionVariant::StochasticRetained:
            return invert_stochastic_retained(x0, schedule, t_max, seed);
    }
    throw std::invalid_argument("unknown inversion variant");
}

SamplerMode replay_mode(InversionVariant variant) {
    return variant == InversionVariant::DeterministicOde ? SamplerMode::Ode
                                                         : SamplerMode::Sde;
}

} // namespace

std::vector<CompareRow> compare_inversion_variants(
    const std::vector<SignalKind>& kinds, const std::vector<std::uint64_t>& seeds,
    const std::vector<InversionVariant>& variants, const NoiseSchedule& schedule,
    int t_max, std::size_t latent_dim, std::size_t num_samples, int sample_rate) {
    std::vector<CompareRow> rows;
    rows.reserve(kinds.size() * seeds.size() * variants.size());
    for (SignalKind kind : kinds) {
        for (std::uint64_t seed : seeds) {
            const Signal original = generate_signal(kind, seed, num_samples, sample_rate);
            const Vec x0 = signal_to_latent(original, latent_dim);
            const Signal rendered_x0 = latent_to_signal(x0, num_samples, sample_rate);
            for (InversionVariant variant : variants) {
                const InversionRecord record =
                    build_record(variant, x0, schedule, t_max, seed);
                const Trajectory traj =
                    replay_noise_maps(record, replay_mode(variant), schedule);
                const Vec& recon = traj.states.back().values;
                CompareRow row;
                row.variant = variant;
                row.kind = kind;
                row.seed = seed;
                row.latent_rmse = rmse(x0, recon);
                row.latent_snr_db = snr_db(x0, recon);
                row.audio = measure(rendered_x0,
                                    latent_to_signal(recon, num_samples, sample_rate));
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

double mean_latent_snr(const std::vector<CompareRow>& rows, InversionVariant variant) {
    double acc = 0.0;
    int n = 0;
    for (const auto& row : rows)
        if (row.variant == variant) {
            acc += row.latent_snr_db;
            ++n;
        }
    if (n == 0) throw std::invalid_argument("mean_latent_snr: no rows for variant");
    return acc / n;
}

} // namespace soundfusion
