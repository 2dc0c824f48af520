// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace soundfusion {

// FNV-1a 64-bit; used for schedule fingerprints and output manifests.
class Fnv1a {
public:
    Fnv1a& update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ull;
        }
        return *this;
    }

    Fnv1a& update(const std::string& s) { return update(s.data(), s.size()); }

    Fnv1a& update(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        return update(&bits, sizeof bits);
    }

    Fnv1a& update(std::uint64_t v) { return update(&v, sizeof v); }

    Fnv1a& update(const std::vector<double>& v) {
        for (double x : v) update(x);
        return *this;
    }

    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::string hex64(std::uint64_t v);
std::uint64_t hash_file(const std::string& path);

} // namespace soundfusion
