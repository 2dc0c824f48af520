// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "soundfusion/signal.hpp"

namespace soundfusion {

// 16-bit PCM mono. Samples are clamped to [-1, 1] on write.
void write_wav(const std::string& path, const Signal& signal);
Signal read_wav(const std::string& path);

} // namespace soundfusion
