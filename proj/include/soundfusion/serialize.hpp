// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "soundfusion/compare.hpp"
#include "soundfusion/errors.hpp"
#include "soundfusion/fusion.hpp"
#include "soundfusion/inversion.hpp"
#include "soundfusion/sampler.hpp"
#include "soundfusion/schedule.hpp"

namespace soundfusion {

// Writes via a temp file in the same directory plus rename, so readers
// never observe a half-written artifact.
void atomic_write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path); // throws IoError

// Loaders wrap parse and validation failures in IoError so callers can
// distinguish unreadable inputs from bad arguments.

std::string schedule_to_json(const NoiseSchedule& schedule);
NoiseSchedule schedule_from_json(const std::string& text);
void save_schedule(const NoiseSchedule& schedule, const std::string& path);
NoiseSchedule load_schedule(const std::string& path);

void save_latent(const std::vector<double>& values, const std::string& path);
std::vector<double> load_latent(const std::string& path);

// JSONL: one header object, then one object per grid index.
void save_record(const InversionRecord& record, const std::string& path);
InversionRecord load_record(const std::string& path);

// JSONL: one header object, then one object per visited state.
void save_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string compare_to_csv(const std::vector<CompareRow>& rows);

struct ManifestEntry {
    std::string path;
    std::uint64_t fnv1a64 = 0;
};

// {"tool","command",extra fields,"outputs":[{"path","fnv1a64"}]}
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& extra,
                    const std::vector<ManifestEntry>& outputs);

ManifestEntry hash_output(const std::string& path);

} // namespace soundfusion
