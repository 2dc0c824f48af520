// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "soundfusion/hash.hpp"

namespace soundfusion {

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::LogLinearLambda: return "log_linear_lambda";
        case ScheduleKind::Cosine: return "cosine";
    }
    throw std::invalid_argument("unknown schedule kind");
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
    if (name == "log_linear_lambda") return ScheduleKind::LogLinearLambda;
    if (name == "cosine") return ScheduleKind::Cosine;
    throw std::invalid_argument("unknown schedule kind: " + name);
}

void alpha_sigma_from_lambda(double lambda, double* alpha, double* sigma) {
    if (!std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite");
    if (lambda >= 0.0) {
        // 1 + e^{-2 lambda} stays in [1, 2]
        const double a = 1.0 / std::sqrt(1.0 + std::exp(-2.0 * lambda));
        *alpha = a;
        *sigma = a * std::exp(-lambda);
    } else {
        const double s = 1.0 / std::sqrt(1.0 + std::exp(2.0 * lambda));
        *sigma = s;
        *alpha = s * std::exp(lambda);
    }
}

namespace {

// u(lambda) for the cosine parameterization lambda(u) = ln(cot(pi*u/2)).
double cosine_u_of_lambda(double lambda) {
    return (2.0 / M_PI) * std::atan(std::exp(-lambda));
}

double cosine_lambda_of_u(double u) {
    return -std::log(std::tan(M_PI * u / 2.0));
}

} // namespace

std::uint64_t NoiseSchedule::fingerprint() const {
    Fnv1a h;
    h.update(to_string(kind));
    h.update(lambda_max);
    h.update(lambda_min);
    h.update(static_cast<std::uint64_t>(lambdas.size()));
    h.update(lambdas);
    return h.digest();
}

NoiseSchedule build_schedule(ScheduleKind kind, int num_steps,
                             double lambda_max, double lambda_min) {
    if (num_steps < 2) throw std::invalid_argument("schedule needs at least 2 grid points");
    if (!(lambda_max > lambda_min)) throw std::invalid_argument("lambda_max must exceed lambda_min");
    if (!std::isfinite(lambda_max) || !std::isfinite(lambda_min))
        throw std::invalid_argument("lambda bounds must be finite");

    std::vector<double> lambdas(num_steps);
    const int n = num_steps - 1;
    switch (kind) {
        case ScheduleKind::LogLinearLambda:
            for (int t = 0; t <= n; ++t) {
                const double w = static_cast<double>(t) / n;
                lambdas[t] = lambda_max + w * (lambda_min - lambda_max);
            }
            break;
        case ScheduleKind::Cosine: {
            const double u0 = cosine_u_of_lambda(lambda_max);
            const double u1 = cosine_u_of_lambda(lambda_min);
            for (int t = 0; t <= n; ++t) {
                const double w = static_cast<double>(t) / n;
                lambdas[t] = cosine_lambda_of_u(u0 + w * (u1 - u0));
            }
            // guard endpoint rounding so the bounds are met exactly
            lambdas.front() = lambda_max;
            lambdas.back() = lambda_min;
            break;
        }
    }

    NoiseSchedule s = schedule_from_lambdas(kind, std::move(lambdas));
    s.lambda_max = lambda_max;
    s.lambda_min = lambda_min;
    return s;
}

NoiseSchedule schedule_from_lambdas(ScheduleKind kind, std::vector<double> lambdas) {
    if (lambdas.size() < 2) throw std::invalid_argument("schedule needs at least 2 grid points");
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] < lambdas[i - 1]))
            throw std::invalid_argument("lambda grid must be strictly decreasing");

    NoiseSchedule s;
    s.kind = kind;
    s.lambda_max = lambdas.front();
    s.lambda_min = lambdas.back();
    s.lambdas = std::move(lambdas);
    s.alphas.resize(s.lambdas.size());
    s.sigmas.resize(s.lambdas.size());
    for (std::size_t i = 0; i < s.lambdas.size(); ++i)
        alpha_sigma_from_lambda(s.lambdas[i], &s.alphas[i], &s.sigmas[i]);
    return s;
}

StepGap step_gap(const NoiseSchedule& schedule, int from_t, int to_t) {
    if (!schedule.valid_index(from_t) || !schedule.valid_index(to_t))
        throw std::invalid_argument("step_gap: index out of range");
    if (from_t == to_t)
        throw std::invalid_argument("step_gap: from_t and to_t must differ");
    StepGap g;
    g.h = std::abs(schedule.lambda(to_t) - schedule.lambda(from_t));
    g.direction = to_t < from_t ? StepDirection::TowardData : StepDirection::TowardNoise;
    return g;
}

} // namespace soundfusion
