// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/signal.hpp"

#include <cmath>
#include <stdexcept>

#include "soundfusion/rng.hpp"

namespace soundfusion {

std::string to_string(SignalKind kind) {
    switch (kind) {
        case SignalKind::Chirp: return "chirp";
        case SignalKind::HarmonicStack: return "harmonic_stack";
        case SignalKind::FilteredNoise: return "filtered_noise";
        case SignalKind::PulseTrain: return "pulse_train";
    }
    throw std::invalid_argument("unknown signal kind");
}

SignalKind signal_kind_from_string(const std::string& name) {
    if (name == "chirp") return SignalKind::Chirp;
    if (name == "harmonic_stack") return SignalKind::HarmonicStack;
    if (name == "filtered_noise") return SignalKind::FilteredNoise;
    if (name == "pulse_train") return SignalKind::PulseTrain;
    throw std::invalid_argument("unknown signal kind: " + name);
}

namespace {

void normalize_peak(std::vector<double>& x, double peak = 0.9) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    if (m > 0.0)
        for (double& v : x) v *= peak / m;
}

std::vector<double> make_chirp(CounterRng& rng, std::size_t n, int sr) {
    const double f0 = 150.0 * (1.0 + rng.next_uniform());       // 150..300 Hz
    const double f1 = std::min(0.4 * sr, f0 * (6.0 + 4.0 * rng.next_uniform()));
    const double phi0 = 2.0 * M_PI * rng.next_uniform();
    const double k = std::log(f1 / f0);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / n;
        // phase = integral of the exponential frequency ramp
        const double phase = 2.0 * M_PI * f0 * (n / static_cast<double>(sr)) *
                             (std::exp(k * u) - 1.0) / k;
        x[i] = std::sin(phi0 + phase);
    }
    return x;
}

std::vector<double> make_harmonic_stack(CounterRng& rng, std::size_t n, int sr) {
    const double f0 = 100.0 + 200.0 * rng.next_uniform(); // 100..300 Hz
    double phases[5];
    for (double& p : phases) p = 2.0 * M_PI * rng.next_uniform();
    std::vector<double> x(n, 0.0);
    for (int k = 1; k <= 5; ++k) {
        const double f = f0 * k;
        if (f >= 0.5 * sr) break;
        const double w = 2.0 * M_PI * f / sr;
        for (std::size_t i = 0; i < n; ++i)
            x[i] += std::sin(phases[k - 1] + w * i) / k;
    }
    return x;
}

std::vector<double> make_filtered_noise(CounterRng& rng, std::size_t n, int sr) {
    // RBJ biquad bandpass (constant skirt gain) on white gaussian noise
    const double fc = 500.0 + 1500.0 * rng.next_uniform(); // 500..2000 Hz
    const double q = 2.0 + 3.0 * rng.next_uniform();
    const double w0 = 2.0 * M_PI * fc / sr;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double b0 = q * alpha, b1 = 0.0, b2 = -q * alpha;
    const double a0 = 1.0 + alpha, a1 = -2.0 * std::cos(w0), a2 = 1.0 - alpha;

    std::vector<double> x(n);
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double in = rng.next_gaussian();
        const double out = (b0 * in + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2) / a0;
        x2 = x1; x1 = in;
        y2 = y1; y1 = out;
        x[i] = out;
    }
    return x;
}

std::vector<double> make_pulse_train(CounterRng& rng, std::size_t n, int sr) {
    const std::size_t period =
        static_cast<std::size_t>(sr * (0.015 + 0.035 * rng.next_uniform())); // 15..50 ms
    const double decay = 60.0 + 80.0 * rng.next_uniform();
    const double tone = 2.0 * M_PI * (400.0 + 600.0 * rng.next_uniform()) / sr;
    std::vector<double> x(n, 0.0);
    for (std::size_t start = 0; start < n; start += period) {
        const std::size_t len = std::min(period, n - start);
        for (std::size_t i = 0; i < len; ++i)
            x[start + i] += std::exp(-decay * i / sr) * std::cos(tone * i);
    }
    return x;
}

} // namespace

Signal generate_signal(SignalKind kind, std::uint64_t seed, std::size_t num_samples,
                       int sample_rate) {
    if (num_samples == 0) throw std::invalid_argument("generate_signal: zero length");
    if (sample_rate <= 0) throw std::invalid_argument("generate_signal: bad sample rate");

    CounterRng rng = stream_rng(seed, 0x5167ull); // signal-domain stream
    Signal s;
    s.sample_rate = sample_rate;
    s.label = to_string(kind) + "_" + std::to_string(seed);
    switch (kind) {
        case SignalKind::Chirp: s.samples = make_chirp(rng, num_samples, sample_rate); break;
        case SignalKind::HarmonicStack:
            s.samples = make_harmonic_stack(rng, num_samples, sample_rate);
            break;
        case SignalKind::FilteredNoise:
            s.samples = make_filtered_noise(rng, num_samples, sample_rate);
            break;
        case SignalKind::PulseTrain:
            s.samples = make_pulse_train(rng, num_samples, sample_rate);
            break;
    }
    normalize_peak(s.samples);
    return s;
}

std::vector<double> signal_to_latent(const Signal& signal, std::size_t dim) {
    const std::size_t n = signal.samples.size();
    if (dim == 0) throw std::invalid_argument("signal_to_latent: zero dimension");
    if (n < dim) throw std::invalid_argument("signal_to_latent: signal shorter than latent");
    std::vector<double> latent(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
        const std::size_t lo = k * n / dim;
        const std::size_t hi = (k + 1) * n / dim;
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += signal.samples[i];
        latent[k] = acc / static_cast<double>(hi - lo);
    }
    return latent;
}

Signal latent_to_signal(const std::vector<double>& latent, std::size_t num_samples,
                        int sample_rate) {
    const std::size_t dim = latent.size();
    if (dim == 0) throw std::invalid_argument("latent_to_signal: empty latent");
    if (num_samples == 0) throw std::invalid_argument("latent_to_signal: zero length");
    Signal s;
    s.sample_rate = sample_rate;
    s.label = "decoded";
    s.samples.resize(num_samples);
    if (dim == 1) {
        for (auto& v : s.samples) v = latent[0];
        return s;
    }
    // latent k sits at the center of window k
    for (std::size_t i = 0; i < num_samples; ++i) {
        const double pos = (static_cast<double>(i) + 0.5) * dim / num_samples - 0.5;
        if (pos <= 0.0) { s.samples[i] = latent.front(); continue; }
        if (pos >= dim - 1.0) { s.samples[i] = latent.back(); continue; }
        const std::size_t k = static_cast<std::size_t>(pos);
        const double frac = pos - k;
        s.samples[i] = latent[k] * (1.0 - frac) + latent[k + 1] * frac;
    }
    return s;
}

} // namespace soundfusion
