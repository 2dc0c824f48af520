// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace soundfusion {

std::string to_string(SamplerMode mode) {
    switch (mode) {
        case SamplerMode::Sde: return "sde";
        case SamplerMode::Ode: return "ode";
    }
    throw std::invalid_argument("unknown sampler mode");
}

SamplerMode sampler_mode_from_string(const std::string& name) {
    if (name == "sde") return SamplerMode::Sde;
    if (name == "ode") return SamplerMode::Ode;
    throw std::invalid_argument("unknown sampler mode: " + name);
}

void validate_config(const SamplerConfig& config) {
    if (config.order < 1 || config.order > 3)
        throw std::invalid_argument("sampler order must be 1, 2 or 3");
    if (!config.multistep && config.order == 3)
        throw std::invalid_argument("single-step mode supports orders 1 and 2 only");
    if (!(config.r1 > 0.0 && config.r1 < 1.0))
        throw std::invalid_argument("r1 must lie in (0, 1)");
}

void check_finite(const std::vector<double>& v, const char* where) {
    for (double x : v)
        if (!std::isfinite(x))
            throw NumericalFailure(std::string("non-finite value in ") + where);
}

ModelOutputHistory::ModelOutputHistory(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("history capacity must be >= 1");
}

void ModelOutputHistory::push(double lambda, Vec output) {
    entries_.insert(entries_.begin(), {lambda, std::move(output)});
    if (static_cast<int>(entries_.size()) > capacity_) entries_.resize(capacity_);
}

namespace {

void require_toward_data(const Latent& x, int to_t, const NoiseSchedule& schedule) {
    if (!schedule.valid_index(x.t) || !schedule.valid_index(to_t))
        throw std::invalid_argument("step: index out of range");
    if (to_t > x.t)
        throw std::invalid_argument("step: to_t must not exceed x.t (sampling moves toward data)");
    if (x.values.empty())
        throw std::invalid_argument("step: empty latent");
}

// Polynomial model of the output in lambda around the current point,
// f(lambda) ~ a0 + a1 (lambda - lambda_s) + a2 (lambda - lambda_s)^2,
// from Newton divided differences over the history.
struct OutputPoly {
    double lambda_s = 0.0;
    const Vec* a0 = nullptr;
    Vec a1, a2;
    int order = 1;
};

OutputPoly fit_output_poly(const ModelOutputHistory& history, int order) {
    if (history.size() < order)
        throw std::invalid_argument("history holds fewer model outputs than the requested order");
    OutputPoly p;
    p.order = order;
    p.lambda_s = history.entry(0).lambda;
    p.a0 = &history.entry(0).output;
    const std::size_t dim = p.a0->size();
    if (order >= 2) {
        const auto& e1 = history.entry(1);
        if (!(e1.lambda < p.lambda_s))
            throw std::invalid_argument("history lambdas must be strictly decreasing");
        if (e1.output.size() != dim)
            throw std::invalid_argument("history output dimensions differ");
        const double d0 = p.lambda_s - e1.lambda;
        p.a1.resize(dim);
        for (std::size_t i = 0; i < dim; ++i)
            p.a1[i] = ((*p.a0)[i] - e1.output[i]) / d0;
        if (order >= 3) {
            const auto& e2 = history.entry(2);
            if (!(e2.lambda < e1.lambda))
                throw std::invalid_argument("history lambdas must be strictly decreasing");
            if (e2.output.size() != dim)
                throw std::invalid_argument("history output dimensions differ");
            const double d1 = e1.lambda - e2.lambda;
            const double d02 = p.lambda_s - e2.lambda;
            p.a2.resize(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                const double d01 = p.a1[i];
                const double d12 = (e1.output[i] - e2.output[i]) / d1;
                const double dd = (d01 - d12) / d02;
                p.a2[i] = dd;
                p.a1[i] = d01 + d0 * dd; // recenter the quadratic at lambda_s
            }
        }
    }
    return p;
}

// Exponential-integrator update. Exact for outputs polynomial in lambda up
// to the given order: the weights are the integrals of e^{-tau} tau^k
// (ODE) and 2 e^{-2 tau} tau^k (SDE) over the step.
Latent integrator_step(const Latent& x, const OutputPoly& poly, int to_t,
                       SamplerMode mode, const NoiseSchedule& schedule,
                       const Vec& noise) {
    require_toward_data(x, to_t, schedule);
    if (to_t == x.t) return x;

    const double lambda_s = schedule.lambda(x.t);
    if (std::abs(poly.lambda_s - lambda_s) > 1e-9 * std::max(1.0, std::abs(lambda_s)))
        throw std::invalid_argument("history front does not match the current grid point");

    const double h = schedule.lambda(to_t) - lambda_s;
    const double sig_s = schedule.sigma(x.t);
    const double sig_t = schedule.sigma(to_t);
    const double alp_t = schedule.alpha(to_t);
    const std::size_t dim = x.values.size();
    if (poly.a0->size() != dim)
        throw std::invalid_argument("model output dimension mismatch");

    double prefactor, w0, w1 = 0.0, w2 = 0.0, noise_scale = 0.0;
    if (mode == SamplerMode::Ode) {
        const double em1 = -std::expm1(-h); // 1 - e^{-h}
        prefactor = sig_t / sig_s;
        w0 = alp_t * em1;
        if (poly.order >= 2) w1 = alp_t * (h - em1);
        if (poly.order >= 3) w2 = alp_t * (h * h - 2.0 * (h - em1));
    } else {
        const double em2 = -std::expm1(-2.0 * h); // 1 - e^{-2h}
        prefactor = (sig_t / sig_s) * std::exp(-h);
        w0 = alp_t * em2;
        if (poly.order >= 2) w1 = alp_t * (2.0 * h - em2) / 2.0;
        if (poly.order >= 3) w2 = alp_t * (h * h - (2.0 * h - em2) / 2.0);
        noise_scale = sig_t * std::sqrt(em2);
        if (noise.size() != dim)
            throw std::invalid_argument("sde step: noise dimension mismatch");
    }

    Latent out;
    out.t = to_t;
    out.values.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        double v = prefactor * x.values[i] + w0 * (*poly.a0)[i];
        if (poly.order >= 2) v += w1 * poly.a1[i];
        if (poly.order >= 3) v += w2 * poly.a2[i];
        if (mode == SamplerMode::Sde) v += noise_scale * noise[i];
        out.values[i] = v;
    }
    return out;
}

OutputPoly single_output_poly(double lambda_s, const Vec& x_theta) {
    OutputPoly p;
    p.lambda_s = lambda_s;
    p.a0 = &x_theta;
    p.order = 1;
    return p;
}

} // namespace

Latent sde_step_order1(const Latent& x, const Vec& x_theta, int to_t,
                       const NoiseSchedule& schedule, const Vec& noise) {
    require_toward_data(x, to_t, schedule);
    if (to_t == x.t) return x;
    return integrator_step(x, single_output_poly(schedule.lambda(x.t), x_theta),
                           to_t, SamplerMode::Sde, schedule, noise);
}

Latent ode_step_order1(const Latent& x, const Vec& x_theta, int to_t,
                       const NoiseSchedule& schedule) {
    require_toward_data(x, to_t, schedule);
    if (to_t == x.t) return x;
    return integrator_step(x, single_output_poly(schedule.lambda(x.t), x_theta),
                           to_t, SamplerMode::Ode, schedule, {});
}

Latent ddim_step(const Latent& x, const Vec& eps, int to_t,
                 const NoiseSchedule& schedule) {
    require_toward_data(x, to_t, schedule);
    if (to_t == x.t) return x;
    const Vec x0_hat = model_output(x, eps, schedule);
    const double alp_t = schedule.alpha(to_t);
    const double sig_t = schedule.sigma(to_t);
    Latent out;
    out.t = to_t;
    out.values.resize(x.values.size());
    for (std::size_t i = 0; i < x.values.size(); ++i)
        out.values[i] = alp_t * x0_hat[i] + sig_t * eps[i];
    return out;
}

Latent step_order2(const Latent& x, const ModelOutputHistory& history, int to_t,
                   const SamplerConfig& config, const NoiseSchedule& schedule,
                   const Vec& noise) {
    require_toward_data(x, to_t, schedule);
    if (to_t == x.t) return x;
    return integrator_step(x, fit_output_poly(history, 2), to_t, config.mode,
                           schedule, noise);
}

Latent step_order3(const Latent& x, const ModelOutputHistory& history, int to_t,
                   const SamplerConfig& config, const NoiseSchedule& schedule,
                   const Vec& noise) {
    require_toward_data(x, to_t, schedule);
    if (to_t == x.t) return x;
    return integrator_step(x, fit_output_poly(history, 3), to_t, config.mode,
                           schedule, noise);
}

namespace {

// One (possibly guided) oracle consultation, returned as a model output.
Vec evaluate_output(const DenoiserOracle& oracle, const Vec& values,
                    double alpha, double sigma, const Condition& cond) {
    Vec eps = oracle.predict_noise_at(values, alpha, sigma, cond);
    if (cond.guidance_scale != 1.0) {
        const Vec eps_null =
            oracle.predict_noise_at(values, alpha, sigma, Condition::null());
        eps = guided_noise(eps, eps_null, cond.guidance_scale);
    }
    return model_output(values, eps, alpha, sigma);
}

} // namespace

namespace detail {

void run_sampling(Trajectory& traj, ModelOutputHistory& history, CounterRng& rng,
                  const DenoiserOracle& oracle, const Condition& cond,
                  const SamplerConfig& config, const NoiseSchedule& schedule,
                  int stop_t) {
    if (traj.states.empty())
        throw std::invalid_argument("run_sampling: trajectory has no start state");
    if (stop_t < 0 || stop_t > traj.states.back().t)
        throw std::invalid_argument("run_sampling: stop_t out of range");

    const std::size_t dim = traj.states.back().values.size();
    const bool single2 = !config.multistep && config.order == 2;

    for (int t = traj.states.back().t; t > stop_t; --t) {
        const Latent& x = traj.states.back();
        const double lam = schedule.lambda(t);
        Vec m0 = evaluate_output(oracle, x.values, schedule.alpha(t),
                                 schedule.sigma(t), cond);
        history.push(lam, m0);

        Vec noise;
        if (config.mode == SamplerMode::Sde) noise = rng.gaussian_vector(dim);

        Latent next;
        if (single2) {
            // self-contained 2S step: deterministic sub-step to the midpoint,
            // second evaluation there, then a full step with reweighted output
            const double h = schedule.lambda(t - 1) - lam;
            const double lam_mid = lam + config.r1 * h;
            double alp_mid, sig_mid;
            alpha_sigma_from_lambda(lam_mid, &alp_mid, &sig_mid);
            const double em1 = -std::expm1(-config.r1 * h);
            Vec u(dim);
            for (std::size_t i = 0; i < dim; ++i)
                u[i] = (sig_mid / schedule.sigma(t)) * x.values[i] + alp_mid * em1 * m0[i];
            const Vec m1 = evaluate_output(oracle, u, alp_mid, sig_mid, cond);
            const double w = 1.0 / (2.0 * config.r1);
            Vec mixed(dim);
            for (std::size_t i = 0; i < dim; ++i)
                mixed[i] = (1.0 - w) * m0[i] + w * m1[i];
            next = integrator_step(x, single_output_poly(lam, mixed), t - 1,
                                   config.mode, schedule, noise);
            traj.model_outputs.push_back(std::move(mixed));
        } else {
            const int eff_order = std::min(config.order, history.size());
            next = integrator_step(x, fit_output_poly(history, eff_order), t - 1,
                                   config.mode, schedule, noise);
            traj.model_outputs.push_back(std::move(m0));
        }

        check_finite(next.values, "sampler step");
        traj.noise_draws.push_back(std::move(noise));
        traj.states.push_back(std::move(next));
    }
}

} // namespace detail

Trajectory sample(const Latent& start, const DenoiserOracle& oracle,
                  const Condition& cond, const SamplerConfig& config,
                  const NoiseSchedule& schedule, int stop_t) {
    validate_config(config);
    if (!schedule.valid_index(start.t))
        throw std::invalid_argument("sample: start index out of range");
    if (stop_t < 0 || stop_t > start.t)
        throw std::invalid_argument("sample: stop_t must lie in [0, start.t]");
    if (start.values.empty())
        throw std::invalid_argument("sample: empty start latent");

    Trajectory traj;
    traj.mode = config.mode;
    traj.order = config.order;
    traj.multistep = config.multistep;
    traj.seed = config.seed;
    traj.schedule_fingerprint = schedule.fingerprint();
    traj.states.push_back(start);

    ModelOutputHistory history(std::max(config.order, 1));
    CounterRng rng = stream_rng(config.seed, 0);
    detail::run_sampling(traj, history, rng, oracle, cond, config, schedule, stop_t);
    return traj;
}

} // namespace soundfusion
