// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "soundfusion/errors.hpp"
#include "soundfusion/serialize.hpp"

namespace soundfusion {

namespace {

void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::uint32_t get_u32(const std::string& s, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s.at(off + i));
    return v;
}

std::uint16_t get_u16(const std::string& s, std::size_t off) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(s.at(off)) |
                                      (static_cast<unsigned char>(s.at(off + 1)) << 8));
}

} // namespace

void write_wav(const std::string& path, const Signal& signal) {
    if (signal.samples.empty()) throw std::invalid_argument("write_wav: empty signal");
    if (signal.sample_rate <= 0) throw std::invalid_argument("write_wav: bad sample rate");

    const std::uint32_t n = static_cast<std::uint32_t>(signal.samples.size());
    const std::uint32_t data_bytes = n * 2;
    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, 1); // PCM
    put_u16(out, 1); // mono
    put_u32(out, static_cast<std::uint32_t>(signal.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(signal.sample_rate) * 2);
    put_u16(out, 2);  // block align
    put_u16(out, 16); // bits per sample
    out += "data";
    put_u32(out, data_bytes);
    for (double v : signal.samples) {
        const double c = std::min(1.0, std::max(-1.0, v));
        const auto q = static_cast<std::int16_t>(std::lrint(c * 32767.0));
        put_u16(out, static_cast<std::uint16_t>(q));
    }
    atomic_write_file(path, out);
}

Signal read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_wav: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 44 || buf.compare(0, 4, "RIFF") != 0 || buf.compare(8, 4, "WAVE") != 0)
        throw IoError("read_wav: not a RIFF/WAVE file: " + path);

    Signal s;
    bool have_fmt = false;
    std::size_t off = 12;
    while (off + 8 <= buf.size()) {
        const std::string id = buf.substr(off, 4);
        const std::uint32_t size = get_u32(buf, off + 4);
        const std::size_t body = off + 8;
        if (body + size > buf.size()) throw IoError("read_wav: truncated chunk in " + path);
        if (id == "fmt ") {
            if (size < 16) throw IoError("read_wav: short fmt chunk in " + path);
            if (get_u16(buf, body) != 1 || get_u16(buf, body + 2) != 1 ||
                get_u16(buf, body + 14) != 16)
                throw IoError("read_wav: only 16-bit PCM mono is supported: " + path);
            s.sample_rate = static_cast<int>(get_u32(buf, body + 4));
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) throw IoError("read_wav: data before fmt in " + path);
            s.samples.resize(size / 2);
            for (std::size_t i = 0; i < s.samples.size(); ++i) {
                const auto q = static_cast<std::int16_t>(get_u16(buf, body + 2 * i));
                s.samples[i] = static_cast<double>(q) / 32767.0;
            }
            return s;
        }
        off = body + size + (size & 1);
    }
    throw IoError("read_wav: no data chunk in " + path);
}

} // namespace soundfusion
