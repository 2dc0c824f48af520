// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace soundfusion {

// Half log-SNR lambda = ln(alpha/sigma) is the canonical coordinate of the
// variance-preserving process; alpha and sigma are always derived from it so
// alpha^2 + sigma^2 = 1 holds by construction.
enum class ScheduleKind {
    LogLinearLambda, // lambda uniform between lambda_max and lambda_min
    Cosine,          // uniform in u where lambda(u) = ln(cot(pi*u/2))
};

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

// alpha = e^lambda / sqrt(1 + e^{2 lambda}), sigma = 1 / sqrt(1 + e^{2 lambda}),
// evaluated on the branch that avoids overflow for |lambda| large.
void alpha_sigma_from_lambda(double lambda, double* alpha, double* sigma);

// Discrete grid over the process. Index 0 is the data end (lambda_max,
// alpha ~ 1); index num_steps-1 is the noise end (lambda_min, sigma ~ 1).
// Inversion walks indices upward, sampling walks them downward.
struct NoiseSchedule {
    ScheduleKind kind = ScheduleKind::LogLinearLambda;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    std::vector<double> lambdas;
    std::vector<double> alphas;
    std::vector<double> sigmas;

    int num_steps() const { return static_cast<int>(lambdas.size()); }
    double lambda(int t) const { return lambdas.at(t); }
    double alpha(int t) const { return alphas.at(t); }
    double sigma(int t) const { return sigmas.at(t); }
    bool valid_index(int t) const { return t >= 0 && t < num_steps(); }

    // FNV-1a over kind, endpoints, and the lambda grid; identifies the grid
    // a record or trajectory was produced on.
    std::uint64_t fingerprint() const;
};

NoiseSchedule build_schedule(ScheduleKind kind, int num_steps,
                             double lambda_max, double lambda_min);

// Rebuilds the derived columns from an explicit lambda grid (used when
// loading a schedule from disk); the grid must be strictly decreasing.
NoiseSchedule schedule_from_lambdas(ScheduleKind kind, std::vector<double> lambdas);

enum class StepDirection { TowardData, TowardNoise };

struct StepGap {
    double h = 0.0; // |lambda_from - lambda_to|, always > 0
    StepDirection direction = StepDirection::TowardData;
};

StepGap step_gap(const NoiseSchedule& schedule, int from_t, int to_t);

inline NoiseSchedule default_schedule() {
    return build_schedule(ScheduleKind::LogLinearLambda, 200, 10.0, -10.0);
}

} // namespace soundfusion
