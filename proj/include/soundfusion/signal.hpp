// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace soundfusion {

enum class SignalKind { Chirp, HarmonicStack, FilteredNoise, PulseTrain };

std::string to_string(SignalKind kind);
SignalKind signal_kind_from_string(const std::string& name);

struct Signal {
    std::vector<double> samples;
    int sample_rate = 16000;
    std::string label;
};

// Deterministic synthetic test signals, peak-normalized to 0.9. The seed
// perturbs frequencies, phases and timing so repeated kinds stay distinct.
Signal generate_signal(SignalKind kind, std::uint64_t seed, std::size_t num_samples,
                       int sample_rate = 16000);

// Latent = window means over dim equal windows; the toy stand-in for an
// audio codec's encoder.
std::vector<double> signal_to_latent(const Signal& signal, std::size_t dim = 64);

// Linear interpolation of the latent back to num_samples; the decoder side.
Signal latent_to_signal(const std::vector<double>& latent, std::size_t num_samples,
                        int sample_rate = 16000);

} // namespace soundfusion
