// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "soundfusion/spectrogram.hpp"

namespace soundfusion {

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("rmse: size mismatch or empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

double snr_db(const std::vector<double>& reference, const std::vector<double>& candidate) {
    if (reference.size() != candidate.size() || reference.empty())
        throw std::invalid_argument("snr_db: size mismatch or empty input");
    double sig = 0.0, err = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        sig += reference[i] * reference[i];
        const double d = reference[i] - candidate[i];
        err += d * d;
    }
    if (sig == 0.0) throw std::invalid_argument("snr_db: zero reference signal");
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(sig / err);
}

double log_spectral_distance(const Signal& reference, const Signal& candidate,
                             std::size_t frame, std::size_t hop) {
    if (reference.samples.size() != candidate.samples.size())
        throw std::invalid_argument("log_spectral_distance: length mismatch");
    const Spectrogram a = compute_spectrogram(reference, frame, hop);
    const Spectrogram b = compute_spectrogram(candidate, frame, hop);
    constexpr double floor = 1e-10;
    double mean = 0.0;
    for (std::size_t f = 0; f < a.num_frames; ++f) {
        double acc = 0.0;
        for (std::size_t bin = 0; bin < a.num_bins; ++bin) {
            const double la = 20.0 * std::log10(std::max(a.at(f, bin), floor));
            const double lb = 20.0 * std::log10(std::max(b.at(f, bin), floor));
            acc += (la - lb) * (la - lb);
        }
        mean += std::sqrt(acc / static_cast<double>(a.num_bins));
    }
    return mean / static_cast<double>(a.num_frames);
}

MetricReport measure(const Signal& reference, const Signal& candidate,
                     std::size_t frame, std::size_t hop) {
    if (reference.samples.size() != candidate.samples.size())
        throw std::invalid_argument("measure: length mismatch");
    MetricReport r;
    r.rmse = rmse(reference.samples, candidate.samples);
    r.snr_db = snr_db(reference.samples, candidate.samples);
    r.lsd = log_spectral_distance(reference, candidate, frame, hop);
    return r;
}

namespace {

std::vector<double> midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * (i + j) + 1.0; // midrank, 1-based
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman: need two same-length series");
    const std::vector<double> ra = midranks(a);
    const std::vector<double> rb = midranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) { ma += ra[i]; mb += rb[i]; }
    ma /= n; mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = ra[i] - ma, db = rb[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0.0 || vb == 0.0)
        throw std::invalid_argument("spearman: constant series has no rank correlation");
    return cov / std::sqrt(va * vb);
}

} // namespace soundfusion
