// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "soundfusion/signal.hpp"

namespace soundfusion {

struct MetricReport {
    double snr_db = 0.0;
    double rmse = 0.0;
    double lsd = 0.0; // log-spectral distance, dB
};

double rmse(const std::vector<double>& a, const std::vector<double>& b);

// 10 log10(||ref||^2 / ||ref - cand||^2); +inf for an exact match.
double snr_db(const std::vector<double>& reference, const std::vector<double>& candidate);

// Mean over frames of the RMS over bins of the 20 log10 magnitude gap,
// magnitudes floored at 1e-10.
double log_spectral_distance(const Signal& reference, const Signal& candidate,
                             std::size_t frame = 1024, std::size_t hop = 256);

MetricReport measure(const Signal& reference, const Signal& candidate,
                     std::size_t frame = 1024, std::size_t hop = 256);

// Spearman rank correlation; ties get midranks.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

} // namespace soundfusion
