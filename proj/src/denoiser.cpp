// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/denoiser.hpp"

#include <cmath>
#include <stdexcept>

namespace soundfusion {

std::string to_string(ConditionTag tag) {
    switch (tag) {
        case ConditionTag::Null: return "null";
        case ConditionTag::Reference: return "reference";
        case ConditionTag::Custom: return "custom";
    }
    throw std::invalid_argument("unknown condition tag");
}

ConditionTag condition_tag_from_string(const std::string& name) {
    if (name == "null") return ConditionTag::Null;
    if (name == "reference") return ConditionTag::Reference;
    if (name == "custom") return ConditionTag::Custom;
    throw std::invalid_argument("unknown condition tag: " + name);
}

Vec model_output(const Vec& x, const Vec& eps, double alpha, double sigma) {
    if (x.size() != eps.size())
        throw std::invalid_argument("model_output: dimension mismatch");
    if (alpha == 0.0)
        throw std::invalid_argument("model_output: alpha must be nonzero");
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = (x[i] - sigma * eps[i]) / alpha;
    return out;
}

Vec model_output(const Latent& x, const Vec& eps, const NoiseSchedule& schedule) {
    if (!schedule.valid_index(x.t))
        throw std::invalid_argument("model_output: latent index out of range");
    return model_output(x.values, eps, schedule.alpha(x.t), schedule.sigma(x.t));
}

Vec guided_noise(const Vec& eps_cond, const Vec& eps_null, double scale) {
    if (eps_cond.size() != eps_null.size())
        throw std::invalid_argument("guided_noise: dimension mismatch");
    if (scale == 1.0) return eps_cond;
    Vec out(eps_cond.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = eps_null[i] + scale * (eps_cond[i] - eps_null[i]);
    return out;
}

Vec DenoiserOracle::predict_noise(const Latent& x, const Condition& cond,
                                  const NoiseSchedule& schedule) const {
    if (!schedule.valid_index(x.t))
        throw std::invalid_argument("predict_noise: latent index out of range");
    return predict_noise_at(x.values, schedule.alpha(x.t), schedule.sigma(x.t), cond);
}

Vec DenoiserOracle::predict_noise_at(const Vec& x, double alpha, double sigma,
                                     const Condition& cond) const {
    if (x.empty())
        throw std::invalid_argument("predict_noise: empty latent");
    if (sigma <= 0.0 || alpha <= 0.0)
        throw std::invalid_argument("predict_noise: alpha and sigma must be positive");

    const Vec out = implied_output(x, alpha, sigma, cond);
    Vec eps(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        eps[i] = (x[i] - alpha * out[i]) / sigma;

    calls_.fetch_add(1, std::memory_order_relaxed);
    {
        std::lock_guard<std::mutex> lock(log_mutex_);
        log_.push_back({std::log(alpha / sigma), cond.tag});
    }
    return eps;
}

std::vector<DenoiserOracle::CallRecord> DenoiserOracle::call_log() const {
    std::lock_guard<std::mutex> lock(log_mutex_);
    return log_;
}

void DenoiserOracle::reset_counters() const {
    std::lock_guard<std::mutex> lock(log_mutex_);
    log_.clear();
    calls_.store(0);
}

ConstantOutputOracle::ConstantOutputOracle(Vec x_ref) : x_ref_(std::move(x_ref)) {
    if (x_ref_.empty())
        throw std::invalid_argument("ConstantOutputOracle: empty reference");
}

Vec ConstantOutputOracle::implied_output(const Vec& x, double, double,
                                         const Condition&) const {
    if (x.size() != x_ref_.size())
        throw std::invalid_argument("ConstantOutputOracle: dimension mismatch");
    return x_ref_;
}

GaussianPosteriorOracle::GaussianPosteriorOracle(Vec mu, double gamma)
    : mu_(std::move(mu)), gamma_(gamma) {
    if (mu_.empty())
        throw std::invalid_argument("GaussianPosteriorOracle: empty mean");
    if (!(gamma_ >= 0.0))
        throw std::invalid_argument("GaussianPosteriorOracle: gamma must be >= 0");
}

Vec GaussianPosteriorOracle::implied_output(const Vec& x, double alpha, double sigma,
                                            const Condition&) const {
    if (x.size() != mu_.size())
        throw std::invalid_argument("GaussianPosteriorOracle: dimension mismatch");
    const double g2 = gamma_ * gamma_;
    const double denom = alpha * alpha * g2 + sigma * sigma;
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = (alpha * g2 * x[i] + sigma * sigma * mu_[i]) / denom;
    return out;
}

MemorizingOracle::MemorizingOracle(Vec x_ref, double fallback_gamma)
    : x_ref_(std::move(x_ref)), fallback_gamma_(fallback_gamma) {
    if (x_ref_.empty())
        throw std::invalid_argument("MemorizingOracle: empty reference");
    if (!(fallback_gamma_ >= 0.0))
        throw std::invalid_argument("MemorizingOracle: gamma must be >= 0");
}

Vec MemorizingOracle::implied_output(const Vec& x, double alpha, double sigma,
                                     const Condition& cond) const {
    if (x.size() != x_ref_.size())
        throw std::invalid_argument("MemorizingOracle: dimension mismatch");
    if (cond.tag == ConditionTag::Reference) return x_ref_;
    const double g2 = fallback_gamma_ * fallback_gamma_;
    const double denom = alpha * alpha * g2 + sigma * sigma;
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = (alpha * g2 * x[i] + sigma * sigma * x_ref_[i]) / denom;
    return out;
}

} // namespace soundfusion
