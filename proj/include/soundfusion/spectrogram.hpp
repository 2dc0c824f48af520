// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "soundfusion/signal.hpp"

namespace soundfusion {

// In-place radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a);

// Naive DFT fallback for arbitrary sizes (and the oracle in FFT tests).
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& a);

struct Spectrogram {
    std::size_t num_frames = 0;
    std::size_t num_bins = 0; // frame/2 + 1
    std::size_t frame = 0;
    std::size_t hop = 0;
    int sample_rate = 0;
    std::vector<double> mag; // row-major [frame][bin], linear magnitude

    double at(std::size_t f, std::size_t b) const { return mag.at(f * num_bins + b); }
};

// Hann-windowed magnitude STFT; throws if the signal is shorter than one frame.
Spectrogram compute_spectrogram(const Signal& signal, std::size_t frame = 1024,
                                std::size_t hop = 256);

// 8-bit PGM, dB-scaled over an 80 dB range below the peak, low bins at the
// bottom row.
void write_pgm(const Spectrogram& spec, const std::string& path);
void write_csv(const Spectrogram& spec, const std::string& path);

} // namespace soundfusion
