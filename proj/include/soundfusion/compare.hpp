// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "soundfusion/inversion.hpp"
#include "soundfusion/metrics.hpp"
#include "soundfusion/signal.hpp"

namespace soundfusion {

// One inversion variant replayed back to t = 0 for one test signal.
struct CompareRow {
    InversionVariant variant = InversionVariant::DeterministicSde;
    SignalKind kind = SignalKind::Chirp;
    std::uint64_t seed = 0;
    double latent_rmse = 0.0;   // reconstructed latent vs x0
    double latent_snr_db = 0.0;
    MetricReport audio;         // rendered reconstruction vs rendered x0
};

// Builds a record per (kind, seed, variant), replays it with zero fresh
// noise, and scores the reconstruction. Deterministic variants replay in
// their own mode; the ablation variants replay through the SDE path they
// stand in for.
std::vector<CompareRow> compare_inversion_variants(
    const std::vector<SignalKind>& kinds, const std::vector<std::uint64_t>& seeds,
    const std::vector<InversionVariant>& variants, const NoiseSchedule& schedule,
    int t_max, std::size_t latent_dim = 64, std::size_t num_samples = 4096,
    int sample_rate = 16000);

double mean_latent_snr(const std::vector<CompareRow>& rows, InversionVariant variant);

} // namespace soundfusion
