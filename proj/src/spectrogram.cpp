// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/spectrogram.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "soundfusion/serialize.hpp"

namespace soundfusion {

void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: size must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = -2.0 * M_PI * static_cast<double>(k * i) / n;
            acc += a[i] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

Spectrogram compute_spectrogram(const Signal& signal, std::size_t frame, std::size_t hop) {
    if (frame == 0 || hop == 0)
        throw std::invalid_argument("spectrogram: frame and hop must be positive");
    if (signal.samples.size() < frame)
        throw std::invalid_argument("spectrogram: signal shorter than one frame");

    const bool pow2 = (frame & (frame - 1)) == 0;
    Spectrogram spec;
    spec.frame = frame;
    spec.hop = hop;
    spec.sample_rate = signal.sample_rate;
    spec.num_bins = frame / 2 + 1;
    spec.num_frames = 1 + (signal.samples.size() - frame) / hop;
    spec.mag.resize(spec.num_frames * spec.num_bins);

    std::vector<double> window(frame);
    for (std::size_t i = 0; i < frame; ++i)
        window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / frame);

    std::vector<std::complex<double>> buf(frame);
    for (std::size_t f = 0; f < spec.num_frames; ++f) {
        const std::size_t off = f * hop;
        for (std::size_t i = 0; i < frame; ++i)
            buf[i] = signal.samples[off + i] * window[i];
        if (pow2) {
            fft_radix2(buf);
        } else {
            buf = dft(buf);
        }
        for (std::size_t b = 0; b < spec.num_bins; ++b)
            spec.mag[f * spec.num_bins + b] = std::abs(buf[b]);
    }
    return spec;
}

void write_pgm(const Spectrogram& spec, const std::string& path) {
    if (spec.num_frames == 0 || spec.num_bins == 0)
        throw std::invalid_argument("write_pgm: empty spectrogram");
    double peak = 0.0;
    for (double m : spec.mag) peak = std::max(peak, m);
    const double top_db = 20.0 * std::log10(std::max(peak, 1e-10));
    const double range_db = 80.0;

    std::string body;
    body += "P5\n" + std::to_string(spec.num_frames) + " " +
            std::to_string(spec.num_bins) + "\n255\n";
    body.reserve(body.size() + spec.num_frames * spec.num_bins);
    // rows top-to-bottom = high bins first, so low frequencies land at the bottom
    for (std::size_t b = spec.num_bins; b-- > 0;) {
        for (std::size_t f = 0; f < spec.num_frames; ++f) {
            const double db = 20.0 * std::log10(std::max(spec.at(f, b), 1e-10));
            double v = (db - (top_db - range_db)) / range_db;
            v = std::min(1.0, std::max(0.0, v));
            body.push_back(static_cast<char>(static_cast<unsigned char>(v * 255.0 + 0.5)));
        }
    }
    atomic_write_file(path, body);
}

void write_csv(const Spectrogram& spec, const std::string& path) {
    std::string body = "frame,bin,magnitude\n";
    char line[96];
    for (std::size_t f = 0; f < spec.num_frames; ++f)
        for (std::size_t b = 0; b < spec.num_bins; ++b) {
            std::snprintf(line, sizeof line, "%zu,%zu,%.17g\n", f, b, spec.at(f, b));
            body += line;
        }
    atomic_write_file(path, body);
}

} // namespace soundfusion
