// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "soundfusion/compare.hpp"
#include "soundfusion/denoiser.hpp"
#include "soundfusion/errors.hpp"
#include "soundfusion/fusion.hpp"
#include "soundfusion/inversion.hpp"
#include "soundfusion/metrics.hpp"
#include "soundfusion/rng.hpp"
#include "soundfusion/sampler.hpp"
#include "soundfusion/schedule.hpp"
#include "soundfusion/serialize.hpp"
#include "soundfusion/signal.hpp"
#include "soundfusion/spectrogram.hpp"
#include "soundfusion/wav.hpp"

namespace py = pybind11;
using namespace soundfusion;

PYBIND11_MODULE(_core, m) {
    m.doc() = "deterministic diffusion inversion and latent sound fusion";

    py::register_exception<IoError>(m, "IoError");
    py::register_exception<NumericalFailure>(m, "NumericalFailure");

    // ---- schedule -------------------------------------------------------
    py::enum_<ScheduleKind>(m, "ScheduleKind")
        .value("LogLinearLambda", ScheduleKind::LogLinearLambda)
        .value("Cosine", ScheduleKind::Cosine);

    py::class_<NoiseSchedule>(m, "NoiseSchedule")
        .def_readonly("kind", &NoiseSchedule::kind)
        .def_readonly("lambda_max", &NoiseSchedule::lambda_max)
        .def_readonly("lambda_min", &NoiseSchedule::lambda_min)
        .def_readonly("lambdas", &NoiseSchedule::lambdas)
        .def_readonly("alphas", &NoiseSchedule::alphas)
        .def_readonly("sigmas", &NoiseSchedule::sigmas)
        .def("num_steps", &NoiseSchedule::num_steps)
        .def("lambda_at", &NoiseSchedule::lambda, py::arg("t"))
        .def("alpha", &NoiseSchedule::alpha, py::arg("t"))
        .def("sigma", &NoiseSchedule::sigma, py::arg("t"))
        .def("fingerprint", &NoiseSchedule::fingerprint);

    m.def("build_schedule", &build_schedule, py::arg("kind"), py::arg("num_steps"),
          py::arg("lambda_max") = 10.0, py::arg("lambda_min") = -10.0);
    m.def("default_schedule", &default_schedule);
    m.def("schedule_from_lambdas", &schedule_from_lambdas, py::arg("kind"),
          py::arg("lambdas"));
    m.def(
        "alpha_sigma_from_lambda",
        [](double lam) {
            double alpha = 0.0, sigma = 0.0;
            alpha_sigma_from_lambda(lam, &alpha, &sigma);
            return py::make_tuple(alpha, sigma);
        },
        py::arg("lam"));

    // ---- states and conditions ------------------------------------------
    py::class_<Latent>(m, "Latent")
        .def(py::init<>())
        .def(py::init([](Vec values, int t) {
                 return Latent{std::move(values), t};
             }),
             py::arg("values"), py::arg("t"))
        .def_readwrite("values", &Latent::values)
        .def_readwrite("t", &Latent::t);

    py::enum_<ConditionTag>(m, "ConditionTag")
        .value("Null", ConditionTag::Null)
        .value("Reference", ConditionTag::Reference)
        .value("Custom", ConditionTag::Custom);

    py::class_<Condition>(m, "Condition")
        .def(py::init<>())
        .def_readwrite("tag", &Condition::tag)
        .def_readwrite("label", &Condition::label)
        .def_readwrite("guidance_scale", &Condition::guidance_scale)
        .def_static("null", &Condition::null)
        .def_static("reference", &Condition::reference)
        .def_static("custom", &Condition::custom, py::arg("label"),
                    py::arg("scale") = 1.0);

    // ---- oracles ----------------------------------------------------------
    py::class_<DenoiserOracle>(m, "DenoiserOracle")
        .def("predict_noise", &DenoiserOracle::predict_noise, py::arg("x"),
             py::arg("cond"), py::arg("schedule"))
        .def("predict_noise_at", &DenoiserOracle::predict_noise_at, py::arg("x"),
             py::arg("alpha"), py::arg("sigma"), py::arg("cond"))
        .def("call_count", &DenoiserOracle::call_count)
        .def("reset_counters", &DenoiserOracle::reset_counters)
        .def("reference", &DenoiserOracle::reference)
        .def("name", &DenoiserOracle::name);

    py::class_<ConstantOutputOracle, DenoiserOracle>(m, "ConstantOutputOracle")
        .def(py::init<Vec>(), py::arg("x_ref"));
    py::class_<GaussianPosteriorOracle, DenoiserOracle>(m, "GaussianPosteriorOracle")
        .def(py::init<Vec, double>(), py::arg("mu"), py::arg("gamma"));
    py::class_<MemorizingOracle, DenoiserOracle>(m, "MemorizingOracle")
        .def(py::init<Vec, double>(), py::arg("x_ref"), py::arg("fallback_gamma") = 1.0);

    m.def("model_output",
          py::overload_cast<const Vec&, const Vec&, double, double>(&model_output),
          py::arg("x"), py::arg("eps"), py::arg("alpha"), py::arg("sigma"));
    m.def("model_output",
          py::overload_cast<const Latent&, const Vec&, const NoiseSchedule&>(&model_output),
          py::arg("x"), py::arg("eps"), py::arg("schedule"));
    m.def("guided_noise", &guided_noise, py::arg("eps_cond"), py::arg("eps_null"),
          py::arg("scale"));

    // ---- sampler ----------------------------------------------------------
    py::enum_<SamplerMode>(m, "SamplerMode")
        .value("Sde", SamplerMode::Sde)
        .value("Ode", SamplerMode::Ode);

    py::class_<SamplerConfig>(m, "SamplerConfig")
        .def(py::init<>())
        .def_readwrite("mode", &SamplerConfig::mode)
        .def_readwrite("order", &SamplerConfig::order)
        .def_readwrite("multistep", &SamplerConfig::multistep)
        .def_readwrite("r1", &SamplerConfig::r1)
        .def_readwrite("seed", &SamplerConfig::seed);
    m.def("validate_config", &validate_config, py::arg("config"));

    py::class_<ModelOutputEntry>(m, "ModelOutputEntry")
        .def_readonly("lambda_", &ModelOutputEntry::lambda)
        .def_readonly("output", &ModelOutputEntry::output);

    py::class_<ModelOutputHistory>(m, "ModelOutputHistory")
        .def(py::init<int>(), py::arg("capacity") = 3)
        .def("push", &ModelOutputHistory::push, py::arg("lam"), py::arg("output"))
        .def("reset", &ModelOutputHistory::reset)
        .def("size", &ModelOutputHistory::size)
        .def("capacity", &ModelOutputHistory::capacity)
        .def("entry", &ModelOutputHistory::entry, py::arg("i"));

    m.def("sde_step_order1", &sde_step_order1, py::arg("x"), py::arg("x_theta"),
          py::arg("to_t"), py::arg("schedule"), py::arg("noise"));
    m.def("ode_step_order1", &ode_step_order1, py::arg("x"), py::arg("x_theta"),
          py::arg("to_t"), py::arg("schedule"));
    m.def("ddim_step", &ddim_step, py::arg("x"), py::arg("eps"), py::arg("to_t"),
          py::arg("schedule"));
    m.def("step_order2", &step_order2, py::arg("x"), py::arg("history"), py::arg("to_t"),
          py::arg("config"), py::arg("schedule"), py::arg("noise"));
    m.def("step_order3", &step_order3, py::arg("x"), py::arg("history"), py::arg("to_t"),
          py::arg("config"), py::arg("schedule"), py::arg("noise"));

    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init<>())
        .def_readwrite("states", &Trajectory::states)
        .def_readwrite("model_outputs", &Trajectory::model_outputs)
        .def_readwrite("noise_draws", &Trajectory::noise_draws)
        .def_readwrite("mode", &Trajectory::mode)
        .def_readwrite("order", &Trajectory::order)
        .def_readwrite("multistep", &Trajectory::multistep)
        .def_readwrite("seed", &Trajectory::seed)
        .def_readwrite("schedule_fingerprint", &Trajectory::schedule_fingerprint);

    m.def("sample", &sample, py::arg("start"), py::arg("oracle"), py::arg("cond"),
          py::arg("config"), py::arg("schedule"), py::arg("stop_t") = 0);

    // ---- inversion --------------------------------------------------------
    py::enum_<InversionVariant>(m, "InversionVariant")
        .value("DeterministicSde", InversionVariant::DeterministicSde)
        .value("DeterministicOde", InversionVariant::DeterministicOde)
        .value("ForwardDiffusion", InversionVariant::ForwardDiffusion)
        .value("StochasticRetained", InversionVariant::StochasticRetained);

    py::class_<InversionRecord>(m, "InversionRecord")
        .def(py::init<>())
        .def_readwrite("variant", &InversionRecord::variant)
        .def_readwrite("x0", &InversionRecord::x0)
        .def_readwrite("latents", &InversionRecord::latents)
        .def_readwrite("noise_maps", &InversionRecord::noise_maps)
        .def_readwrite("schedule_fingerprint", &InversionRecord::schedule_fingerprint)
        .def_readwrite("seed", &InversionRecord::seed)
        .def("t_max", &InversionRecord::t_max)
        .def("dimension", &InversionRecord::dimension);

    m.def("invert_sde_step", &invert_sde_step, py::arg("x_prev"), py::arg("x0"),
          py::arg("schedule"), py::arg("to_t"));
    m.def("invert_ode_step", &invert_ode_step, py::arg("x_prev"), py::arg("x0"),
          py::arg("schedule"), py::arg("to_t"));
    m.def("invert_sde", &invert_sde, py::arg("x0"), py::arg("schedule"), py::arg("t_max"));
    m.def("invert_ode", &invert_ode, py::arg("x0"), py::arg("schedule"), py::arg("t_max"));
    m.def("invert_forward_diffusion", &invert_forward_diffusion, py::arg("x0"),
          py::arg("schedule"), py::arg("t_max"), py::arg("seed"));
    m.def("invert_stochastic_retained", &invert_stochastic_retained, py::arg("x0"),
          py::arg("schedule"), py::arg("t_max"), py::arg("seed"));
    m.def("derive_noise_map", &derive_noise_map, py::arg("x_t"), py::arg("x0"),
          py::arg("schedule"));
    m.def("replay_noise_maps", &replay_noise_maps, py::arg("record"), py::arg("mode"),
          py::arg("schedule"));
    m.def("reconstruct_exact", &reconstruct_exact, py::arg("record"), py::arg("config"),
          py::arg("schedule"));

    // ---- fusion -----------------------------------------------------------
    py::enum_<HistoryPolicy>(m, "HistoryPolicy")
        .value("Persist", HistoryPolicy::Persist)
        .value("Reset", HistoryPolicy::Reset);

    py::class_<FusionConfig>(m, "FusionConfig")
        .def(py::init<>())
        .def_readwrite("sampler", &FusionConfig::sampler)
        .def_readwrite("intervention_t", &FusionConfig::intervention_t)
        .def_readwrite("history_policy", &FusionConfig::history_policy)
        .def_readwrite("reference_cond", &FusionConfig::reference_cond)
        .def_readwrite("post_cond", &FusionConfig::post_cond);

    py::class_<FusionResult>(m, "FusionResult")
        .def_readonly("fused", &FusionResult::fused)
        .def_readonly("trajectory", &FusionResult::trajectory)
        .def_readonly("dist_original", &FusionResult::dist_original)
        .def_readonly("dist_reference", &FusionResult::dist_reference)
        .def_readonly("intervention_t", &FusionResult::intervention_t);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("order", &SweepRow::order)
        .def_readonly("mode", &SweepRow::mode)
        .def_readonly("intervention_t", &SweepRow::intervention_t)
        .def_readonly("dist_original", &SweepRow::dist_original)
        .def_readonly("dist_reference", &SweepRow::dist_reference)
        .def_readonly("seed", &SweepRow::seed);

    m.def("fuse", &fuse, py::arg("record"), py::arg("oracle"), py::arg("config"),
          py::arg("schedule"));
    m.def("sweep_intervention", &sweep_intervention, py::arg("record"), py::arg("oracle"),
          py::arg("base"), py::arg("orders"), py::arg("t_values"), py::arg("schedule"));

    // ---- signal lab ---------------------------------------------------------
    py::enum_<SignalKind>(m, "SignalKind")
        .value("Chirp", SignalKind::Chirp)
        .value("HarmonicStack", SignalKind::HarmonicStack)
        .value("FilteredNoise", SignalKind::FilteredNoise)
        .value("PulseTrain", SignalKind::PulseTrain);

    py::class_<Signal>(m, "Signal")
        .def(py::init<>())
        .def_readwrite("samples", &Signal::samples)
        .def_readwrite("sample_rate", &Signal::sample_rate)
        .def_readwrite("label", &Signal::label);

    m.def("generate_signal", &generate_signal, py::arg("kind"), py::arg("seed"),
          py::arg("num_samples"), py::arg("sample_rate") = 16000);
    m.def("signal_to_latent", &signal_to_latent, py::arg("signal"), py::arg("dim") = 64);
    m.def("latent_to_signal", &latent_to_signal, py::arg("latent"),
          py::arg("num_samples"), py::arg("sample_rate") = 16000);

    py::class_<Spectrogram>(m, "Spectrogram")
        .def_readonly("num_frames", &Spectrogram::num_frames)
        .def_readonly("num_bins", &Spectrogram::num_bins)
        .def_readonly("frame", &Spectrogram::frame)
        .def_readonly("hop", &Spectrogram::hop)
        .def_readonly("sample_rate", &Spectrogram::sample_rate)
        .def_readonly("mag", &Spectrogram::mag)
        .def("at", &Spectrogram::at, py::arg("f"), py::arg("b"));

    m.def("compute_spectrogram", &compute_spectrogram, py::arg("signal"),
          py::arg("frame") = 1024, py::arg("hop") = 256);
    m.def("write_pgm", &write_pgm, py::arg("spec"), py::arg("path"));
    m.def("write_spectrogram_csv", &write_csv, py::arg("spec"), py::arg("path"));

    py::class_<MetricReport>(m, "MetricReport")
        .def_readonly("snr_db", &MetricReport::snr_db)
        .def_readonly("rmse", &MetricReport::rmse)
        .def_readonly("lsd", &MetricReport::lsd);

    m.def("rmse", &rmse, py::arg("a"), py::arg("b"));
    m.def("snr_db", &snr_db, py::arg("reference"), py::arg("candidate"));
    m.def("log_spectral_distance", &log_spectral_distance, py::arg("reference"),
          py::arg("candidate"), py::arg("frame") = 1024, py::arg("hop") = 256);
    m.def("measure", &measure, py::arg("reference"), py::arg("candidate"),
          py::arg("frame") = 1024, py::arg("hop") = 256);
    m.def("spearman", &spearman, py::arg("a"), py::arg("b"));

    py::class_<CompareRow>(m, "CompareRow")
        .def_readonly("variant", &CompareRow::variant)
        .def_readonly("kind", &CompareRow::kind)
        .def_readonly("seed", &CompareRow::seed)
        .def_readonly("latent_rmse", &CompareRow::latent_rmse)
        .def_readonly("latent_snr_db", &CompareRow::latent_snr_db)
        .def_readonly("audio", &CompareRow::audio);

    m.def("compare_inversion_variants", &compare_inversion_variants, py::arg("kinds"),
          py::arg("seeds"), py::arg("variants"), py::arg("schedule"), py::arg("t_max"),
          py::arg("latent_dim") = 64, py::arg("num_samples") = 4096,
          py::arg("sample_rate") = 16000);
    m.def("mean_latent_snr", &mean_latent_snr, py::arg("rows"), py::arg("variant"));

    // ---- io ------------------------------------------------------------------
    m.def("save_schedule", &save_schedule, py::arg("schedule"), py::arg("path"));
    m.def("load_schedule", &load_schedule, py::arg("path"));
    m.def("save_latent", &save_latent, py::arg("values"), py::arg("path"));
    m.def("load_latent", &load_latent, py::arg("path"));
    m.def("save_record", &save_record, py::arg("record"), py::arg("path"));
    m.def("load_record", &load_record, py::arg("path"));
    m.def("save_trajectory", &save_trajectory, py::arg("traj"), py::arg("path"));
    m.def("load_trajectory", &load_trajectory, py::arg("path"));
    m.def("sweep_to_csv", &sweep_to_csv, py::arg("rows"));
    m.def("compare_to_csv", &compare_to_csv, py::arg("rows"));
    m.def("write_wav", &write_wav, py::arg("path"), py::arg("signal"));
    m.def("read_wav", &read_wav, py::arg("path"));

    // ---- rng -------------------------------------------------------------------
    py::class_<CounterRng>(m, "CounterRng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("bits", &CounterRng::bits, py::arg("index"))
        .def("next_bits", &CounterRng::next_bits)
        .def("next_uniform", &CounterRng::next_uniform)
        .def("next_gaussian", &CounterRng::next_gaussian)
        .def("gaussian_vector", &CounterRng::gaussian_vector, py::arg("n"))
        .def("seed", &CounterRng::seed)
        .def("counter", &CounterRng::counter);
    m.def("stream_rng", &stream_rng, py::arg("seed"), py::arg("stream_id"));
}
