// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace soundfusion {

// Non-finite values produced during integration; callers map this to a
// distinct exit code from plain bad-argument errors.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable or malformed input files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check_finite(const std::vector<double>& v, const char* where);

} // namespace soundfusion
