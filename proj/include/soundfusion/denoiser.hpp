// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "soundfusion/schedule.hpp"

namespace soundfusion {

using Vec = std::vector<double>;

// A state of the diffusion process: values plus its grid index.
struct Latent {
    Vec values;
    int t = 0;
};

enum class ConditionTag { Null, Reference, Custom };

struct Condition {
    ConditionTag tag = ConditionTag::Null;
    std::string label;            // only meaningful for Custom
    double guidance_scale = 1.0;

    static Condition null() { return {ConditionTag::Null, "", 1.0}; }
    static Condition reference() { return {ConditionTag::Reference, "", 1.0}; }
    static Condition custom(std::string label, double scale = 1.0) {
        return {ConditionTag::Custom, std::move(label), scale};
    }
};

std::string to_string(ConditionTag tag);
ConditionTag condition_tag_from_string(const std::string& name);

// x_theta = (x_t - sigma_t * eps) / alpha_t.
Vec model_output(const Vec& x, const Vec& eps, double alpha, double sigma);
Vec model_output(const Latent& x, const Vec& eps, const NoiseSchedule& schedule);

// eps_null + scale * (eps_cond - eps_null); scale 1 returns eps_cond.
Vec guided_noise(const Vec& eps_cond, const Vec& eps_null, double scale);

// Analytic stand-in for a trained noise predictor. Subclasses define the
// implied model output; eps = (x - alpha * x_theta) / sigma follows from it.
// Every evaluation bumps an atomic counter and is appended to a call log, so
// tests can assert exactly how often (and under which condition) the model
// was consulted.
class DenoiserOracle {
public:
    struct CallRecord {
        double lambda = 0.0;
        ConditionTag tag = ConditionTag::Null;
    };

    virtual ~DenoiserOracle() = default;

    Vec predict_noise(const Latent& x, const Condition& cond,
                      const NoiseSchedule& schedule) const;

    // Off-grid evaluation (single-step midpoints); alpha/sigma given directly.
    Vec predict_noise_at(const Vec& x, double alpha, double sigma,
                         const Condition& cond) const;

    std::uint64_t call_count() const { return calls_.load(); }
    std::vector<CallRecord> call_log() const;
    void reset_counters() const;

    // The memorized training signal, when the oracle has one.
    virtual std::optional<Vec> reference() const { return std::nullopt; }
    virtual std::string name() const = 0;

protected:
    virtual Vec implied_output(const Vec& x, double alpha, double sigma,
                               const Condition& cond) const = 0;

private:
    mutable std::atomic<std::uint64_t> calls_{0};
    mutable std::mutex log_mutex_;
    mutable std::vector<CallRecord> log_;
};

// Model output is x_ref regardless of the input; the exact regime of a
// model that has memorized one training example.
class ConstantOutputOracle : public DenoiserOracle {
public:
    explicit ConstantOutputOracle(Vec x_ref);
    std::optional<Vec> reference() const override { return x_ref_; }
    std::string name() const override { return "constant_output"; }

protected:
    Vec implied_output(const Vec& x, double alpha, double sigma,
                       const Condition& cond) const override;

private:
    Vec x_ref_;
};

// Exact posterior mean denoiser for data ~ N(mu, gamma^2 I):
// x_theta = (alpha gamma^2 x + sigma^2 mu) / (alpha^2 gamma^2 + sigma^2).
class GaussianPosteriorOracle : public DenoiserOracle {
public:
    GaussianPosteriorOracle(Vec mu, double gamma);
    std::string name() const override { return "gaussian_posterior"; }

protected:
    Vec implied_output(const Vec& x, double alpha, double sigma,
                       const Condition& cond) const override;

private:
    Vec mu_;
    double gamma_;
};

// Reference condition -> memorized x_ref (a fine-tuned model recalling its
// training clip); any other condition -> posterior denoiser centered on
// x_ref with unit width, the model's residual bias toward what it memorized.
class MemorizingOracle : public DenoiserOracle {
public:
    explicit MemorizingOracle(Vec x_ref, double fallback_gamma = 1.0);
    std::optional<Vec> reference() const override { return x_ref_; }
    std::string name() const override { return "memorizing"; }

protected:
    Vec implied_output(const Vec& x, double alpha, double sigma,
                       const Condition& cond) const override;

private:
    Vec x_ref_;
    double fallback_gamma_;
};

} // namespace soundfusion
