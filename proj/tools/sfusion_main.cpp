// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
//
// sfusion: deterministic diffusion inversion and sound fusion on latent
// vectors, with a synthetic-signal lab for desk-scale verification.

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "soundfusion/compare.hpp"
#include "soundfusion/fusion.hpp"
#include "soundfusion/hash.hpp"
#include "soundfusion/inversion.hpp"
#include "soundfusion/metrics.hpp"
#include "soundfusion/sampler.hpp"
#include "soundfusion/serialize.hpp"
#include "soundfusion/spectrogram.hpp"
#include "soundfusion/wav.hpp"

namespace sf = soundfusion;
using nlohmann::json;

namespace {

constexpr int kExitBadArgs = 2;
constexpr int kExitUnreadable = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitMissingLatent = 5;

struct ScheduleOpts {
    std::string file;
    std::string kind = "log_linear_lambda";
    int num_steps = 200;
    double lambda_max = 10.0;
    double lambda_min = -10.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--schedule", file, "schedule JSON to load instead of building one");
        cmd->add_option("--schedule-kind", kind, "log_linear_lambda or cosine");
        cmd->add_option("--num-steps", num_steps, "grid points (default 200)");
        cmd->add_option("--lambda-max", lambda_max, "half log-SNR at the data end");
        cmd->add_option("--lambda-min", lambda_min, "half log-SNR at the noise end");
    }

    sf::NoiseSchedule resolve() const {
        if (!file.empty()) return sf::load_schedule(file);
        return sf::build_schedule(sf::schedule_kind_from_string(kind), num_steps,
                                  lambda_max, lambda_min);
    }
};

void emit_manifest(const std::string& primary_out, const std::string& command,
                   const sf::NoiseSchedule& schedule,
                   const std::vector<std::string>& outputs) {
    std::vector<sf::ManifestEntry> entries;
    for (const auto& p : outputs)
        if (!p.empty()) entries.push_back(sf::hash_output(p));
    sf::write_manifest(primary_out + ".manifest.json", command,
                       {{"schedule_fingerprint", sf::hex64(schedule.fingerprint())}},
                       entries);
}

sf::InversionRecord invert_with(const std::string& variant_name, const sf::Vec& x0,
                                const sf::NoiseSchedule& schedule, int t_max,
                                std::uint64_t seed) {
    switch (sf::inversion_variant_from_string(variant_name)) {
        case sf::InversionVariant::DeterministicSde: return sf::invert_sde(x0, schedule, t_max);
        case sf::InversionVariant::DeterministicOde: return sf::invert_ode(x0, schedule, t_max);
        case sf::InversionVariant::ForwardDiffusion:
            return sf::invert_forward_diffusion(x0, schedule, t_max, seed);
        case sf::InversionVariant::StochasticRetained:
            return sf::invert_stochastic_retained(x0, schedule, t_max, seed);
    }
    throw std::invalid_argument("unknown variant: " + variant_name);
}

int run(int argc, char** argv) {
    CLI::App app{"deterministic diffusion inversion and latent sound fusion"};
    app.require_subcommand(1);

    // ---- gen ----------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a synthetic test signal");
    std::string gen_kind = "chirp";
    std::uint64_t gen_seed = 0;
    std::size_t gen_samples = 4096, gen_dim = 64;
    int gen_rate = 16000;
    std::string gen_out_wav, gen_out_latent, gen_out_pgm;
    gen->add_option("--kind", gen_kind, "chirp|harmonic_stack|filtered_noise|pulse_train");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--samples", gen_samples, "signal length in samples");
    gen->add_option("--rate", gen_rate, "sample rate");
    gen->add_option("--dim", gen_dim, "latent dimension");
    gen->add_option("--out-wav", gen_out_wav, "output WAV path");
    gen->add_option("--out-latent", gen_out_latent, "output latent JSON path")->required();
    gen->add_option("--out-spectrogram", gen_out_pgm, "output PGM spectrogram path");
    ScheduleOpts gen_sched; // only for the manifest fingerprint
    gen_sched.attach(gen);

    // ---- invert -------------------------------------------------------
    auto* invert = app.add_subcommand("invert", "build an inversion record from a latent");
    std::string inv_in, inv_out, inv_variant = "sde";
    int inv_tmax = -1;
    std::uint64_t inv_seed = 0;
    invert->add_option("--in", inv_in, "input latent JSON")->required();
    invert->add_option("--out", inv_out, "output record JSONL")->required();
    invert->add_option("--variant", inv_variant, "sde|ode|forward|stochastic");
    invert->add_option("--t-max", inv_tmax, "deepest grid index (default: top of grid)");
    invert->add_option("--seed", inv_seed, "noise seed for the stochastic variants");
    ScheduleOpts inv_sched;
    inv_sched.attach(invert);

    // ---- sample -------------------------------------------------------
    auto* sample_cmd = app.add_subcommand("sample", "integrate from noise with an analytic oracle");
    std::string smp_oracle = "constant", smp_reference, smp_out, smp_out_final;
    std::string smp_mode = "ode", smp_condition = "reference";
    double smp_gamma = 1.0, smp_guidance = 1.0, smp_r1 = 0.5;
    int smp_order = 1, smp_start_t = -1, smp_stop_t = 0;
    bool smp_single = false;
    std::uint64_t smp_seed = 0;
    sample_cmd->add_option("--oracle", smp_oracle, "constant|posterior|memorizing");
    sample_cmd->add_option("--reference", smp_reference, "reference latent JSON (oracle target)")
        ->required();
    sample_cmd->add_option("--gamma", smp_gamma, "posterior width");
    sample_cmd->add_option("--mode", smp_mode, "sde|ode");
    sample_cmd->add_option("--order", smp_order, "solver order 1..3");
    sample_cmd->add_flag("--single-step", smp_single, "self-contained order-2 steps");
    sample_cmd->add_option("--r1", smp_r1, "single-step midpoint fraction");
    sample_cmd->add_option("--seed", smp_seed, "noise seed");
    sample_cmd->add_option("--start-t", smp_start_t, "start index (default: top of grid)");
    sample_cmd->add_option("--stop-t", smp_stop_t, "stop index");
    sample_cmd->add_option("--condition", smp_condition, "null|reference");
    sample_cmd->add_option("--guidance-scale", smp_guidance, "classifier-free guidance scale");
    sample_cmd->add_option("--out", smp_out, "output trajectory JSONL")->required();
    sample_cmd->add_option("--out-final", smp_out_final, "output final latent JSON");
    ScheduleOpts smp_sched;
    smp_sched.attach(sample_cmd);

    // ---- fuse ---------------------------------------------------------
    auto* fuse_cmd = app.add_subcommand("fuse", "two-phase fusion with a latent intervention");
    std::string fus_record, fus_reference, fus_out, fus_out_traj;
    std::string fus_mode = "ode", fus_history = "persist";
    int fus_order = 1, fus_intervene = -1;
    bool fus_no_intervention = false;
    double fus_gamma = 1.0;
    std::uint64_t fus_seed = 0;
    fuse_cmd->add_option("--record", fus_record, "inversion record JSONL")->required();
    fuse_cmd->add_option("--reference", fus_reference, "reference latent JSON")->required();
    fuse_cmd->add_option("--gamma", fus_gamma, "memorizing-oracle fallback width");
    auto* fus_it_opt =
        fuse_cmd->add_option("--intervene-t", fus_intervene, "grid index of the latent splice");
    fuse_cmd->add_flag("--no-intervention", fus_no_intervention,
                       "run the reference phase alone")
        ->excludes(fus_it_opt);
    fuse_cmd->add_option("--mode", fus_mode, "sde|ode");
    fuse_cmd->add_option("--order", fus_order, "solver order 1..3");
    fuse_cmd->add_option("--history", fus_history, "persist|reset at the splice");
    fuse_cmd->add_option("--seed", fus_seed, "noise seed");
    fuse_cmd->add_option("--out", fus_out, "output fused latent JSON")->required();
    fuse_cmd->add_option("--out-traj", fus_out_traj, "output trajectory JSONL");
    ScheduleOpts fus_sched;
    fus_sched.attach(fuse_cmd);

    // ---- compare ------------------------------------------------------
    auto* compare_cmd =
        app.add_subcommand("compare", "score inversion variants across test signals");
    std::vector<std::string> cmp_kinds{"chirp", "harmonic_stack", "filtered_noise",
                                       "pulse_train"};
    std::vector<std::string> cmp_variants{"sde", "forward", "stochastic"};
    int cmp_num_seeds = 5, cmp_tmax = -1;
    std::uint64_t cmp_seed_base = 1;
    std::size_t cmp_dim = 64, cmp_samples = 4096;
    std::string cmp_out;
    compare_cmd->add_option("--kinds", cmp_kinds, "signal kinds")->delimiter(',');
    compare_cmd->add_option("--variants", cmp_variants, "inversion variants")->delimiter(',');
    compare_cmd->add_option("--num-seeds", cmp_num_seeds, "seeds per kind");
    compare_cmd->add_option("--seed-base", cmp_seed_base, "first seed");
    compare_cmd->add_option("--t-max", cmp_tmax, "inversion depth (default: top of grid)");
    compare_cmd->add_option("--dim", cmp_dim, "latent dimension");
    compare_cmd->add_option("--samples", cmp_samples, "signal length");
    compare_cmd->add_option("--out", cmp_out, "output CSV")->required();
    ScheduleOpts cmp_sched;
    cmp_sched.attach(compare_cmd);

    // ---- sweep --------------------------------------------------------
    auto* sweep_cmd =
        app.add_subcommand("sweep", "fuse over a grid of intervention points and orders");
    std::string swp_record, swp_reference, swp_out;
    std::string swp_mode = "ode", swp_history = "persist";
    std::vector<int> swp_tlist, swp_orders{1};
    double swp_gamma = 1.0;
    std::uint64_t swp_seed = 0;
    sweep_cmd->add_option("--record", swp_record, "inversion record JSONL")->required();
    sweep_cmd->add_option("--reference", swp_reference, "reference latent JSON")->required();
    sweep_cmd->add_option("--gamma", swp_gamma, "memorizing-oracle fallback width");
    sweep_cmd->add_option("--t-list", swp_tlist, "intervention indices")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--orders", swp_orders, "solver orders")->delimiter(',');
    sweep_cmd->add_option("--mode", swp_mode, "sde|ode");
    sweep_cmd->add_option("--history", swp_history, "persist|reset at the splice");
    sweep_cmd->add_option("--seed", swp_seed, "noise seed");
    sweep_cmd->add_option("--out", swp_out, "output CSV")->required();
    ScheduleOpts swp_sched;
    swp_sched.attach(sweep_cmd);

    // ---- roundtrip ----------------------------------------------------
    auto* round_cmd =
        app.add_subcommand("roundtrip", "invert a generated signal and replay it back");
    std::string rt_kind = "chirp", rt_variant = "sde";
    std::uint64_t rt_seed = 0;
    int rt_tmax = -1;
    std::size_t rt_dim = 64, rt_samples = 4096;
    double rt_tolerance = 1e-6;
    round_cmd->add_option("--kind", rt_kind, "signal kind");
    round_cmd->add_option("--seed", rt_seed, "generator seed");
    round_cmd->add_option("--variant", rt_variant, "sde|ode");
    round_cmd->add_option("--t-max", rt_tmax, "inversion depth (default: top of grid)");
    round_cmd->add_option("--dim", rt_dim, "latent dimension");
    round_cmd->add_option("--samples", rt_samples, "signal length");
    round_cmd->add_option("--tolerance", rt_tolerance, "max relative deviation to pass");
    ScheduleOpts rt_sched;
    rt_sched.attach(round_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadArgs;
    }

    if (gen->parsed()) {
        const sf::NoiseSchedule schedule = gen_sched.resolve();
        const sf::Signal signal = sf::generate_signal(
            sf::signal_kind_from_string(gen_kind), gen_seed, gen_samples, gen_rate);
        const sf::Vec latent = sf::signal_to_latent(signal, gen_dim);
        sf::save_latent(latent, gen_out_latent);
        if (!gen_out_wav.empty()) sf::write_wav(gen_out_wav, signal);
        if (!gen_out_pgm.empty())
            sf::write_pgm(sf::compute_spectrogram(signal), gen_out_pgm);
        emit_manifest(gen_out_latent, "gen", schedule,
                      {gen_out_latent, gen_out_wav, gen_out_pgm});
        json report;
        report["label"] = signal.label;
        report["dimension"] = latent.size();
        report["out_latent"] = gen_out_latent;
        std::printf("%s\n", report.dump().c_str());
        return 0;
    }

    if (invert->parsed()) {
        const sf::NoiseSchedule schedule = inv_sched.resolve();
        const sf::Vec x0 = sf::load_latent(inv_in);
        const int t_max = inv_tmax < 0 ? schedule.num_steps() - 1 : inv_tmax;
        const sf::InversionRecord record =
            invert_with(inv_variant, x0, schedule, t_max, inv_seed);
        sf::save_record(record, inv_out);
        emit_manifest(inv_out, "invert", schedule, {inv_out});
        json report;
        report["variant"] = to_string(record.variant);
        report["t_max"] = record.t_max();
        report["schedule_fingerprint"] = sf::hex64(record.schedule_fingerprint);
        std::printf("%s\n", report.dump().c_str());
        return 0;
    }

    if (sample_cmd->parsed()) {
        const sf::NoiseSchedule schedule = smp_sched.resolve();
        const sf::Vec ref = sf::load_latent(smp_reference);
        std::unique_ptr<sf::DenoiserOracle> oracle;
        if (smp_oracle == "constant")
            oracle = std::make_unique<sf::ConstantOutputOracle>(ref);
        else if (smp_oracle == "posterior")
            oracle = std::make_unique<sf::GaussianPosteriorOracle>(ref, smp_gamma);
        else if (smp_oracle == "memorizing")
            oracle = std::make_unique<sf::MemorizingOracle>(ref, smp_gamma);
        else
            throw std::invalid_argument("unknown oracle: " + smp_oracle);

        sf::SamplerConfig config;
        config.mode = sf::sampler_mode_from_string(smp_mode);
        config.order = smp_order;
        config.multistep = !smp_single;
        config.r1 = smp_r1;
        config.seed = smp_seed;

        const int start_t = smp_start_t < 0 ? schedule.num_steps() - 1 : smp_start_t;
        sf::Latent start{sf::stream_rng(smp_seed, 1).gaussian_vector(ref.size()), start_t};
        sf::Condition cond = smp_condition == "null" ? sf::Condition::null()
                                                     : sf::Condition::reference();
        cond.guidance_scale = smp_guidance;

        const sf::Trajectory traj =
            sf::sample(start, *oracle, cond, config, schedule, smp_stop_t);
        sf::save_trajectory(traj, smp_out);
        if (!smp_out_final.empty())
            sf::save_latent(traj.states.back().values, smp_out_final);
        emit_manifest(smp_out, "sample", schedule, {smp_out, smp_out_final});
        json report;
        report["steps"] = traj.states.size() - 1;
        report["oracle_evals"] = oracle->call_count();
        report["final_t"] = traj.states.back().t;
        std::printf("%s\n", report.dump().c_str());
        return 0;
    }

    if (fuse_cmd->parsed()) {
        const sf::NoiseSchedule schedule = fus_sched.resolve();
        const sf::InversionRecord record = sf::load_record(fus_record);
        const sf::MemorizingOracle oracle(sf::load_latent(fus_reference), fus_gamma);

        sf::FusionConfig config;
        config.sampler.mode = sf::sampler_mode_from_string(fus_mode);
        config.sampler.order = fus_order;
        config.sampler.seed = fus_seed;
        config.history_policy = sf::history_policy_from_string(fus_history);
        if (!fus_no_intervention) {
            if (fus_intervene < 0)
                throw std::invalid_argument("fuse: provide --intervene-t or --no-intervention");
            config.intervention_t = fus_intervene;
        }

        const sf::FusionResult result = sf::fuse(record, oracle, config, schedule);
        sf::save_latent(result.fused.values, fus_out);
        if (!fus_out_traj.empty()) sf::save_trajectory(result.trajectory, fus_out_traj);
        emit_manifest(fus_out, "fuse", schedule, {fus_out, fus_out_traj});
        json report;
        report["intervention_t"] = result.intervention_t;
        report["dist_original"] = result.dist_original;
        report["dist_reference"] = result.dist_reference;
        report["oracle_evals"] = oracle.call_count();
        std::printf("%s\n", report.dump().c_str());
        return 0;
    }

    if (compare_cmd->parsed()) {
        const sf::NoiseSchedule schedule = cmp_sched.resolve();
        std::vector<sf::SignalKind> kinds;
        for (const auto& k : cmp_kinds) kinds.push_back(sf::signal_kind_from_string(k));
        std::vector<sf::InversionVariant> variants;
        for (const auto& v : cmp_variants)
            variants.push_back(sf::inversion_variant_from_string(v));
        if (cmp_num_seeds < 1) throw std::invalid_argument("compare: need at least one seed");
        std::vector<std::uint64_t> seeds;
        for (int i = 0; i < cmp_num_seeds; ++i) seeds.push_back(cmp_seed_base + i);
        const int t_max = cmp_tmax < 0 ? schedule.num_steps() - 1 : cmp_tmax;

        const auto rows = sf::compare_inversion_variants(kinds, seeds, variants, schedule,
                                                         t_max, cmp_dim, cmp_samples);
        sf::atomic_write_file(cmp_out, sf::compare_to_csv(rows));
        emit_manifest(cmp_out, "compare", schedule, {cmp_out});
        json report;
        report["rows"] = rows.size();
        for (sf::InversionVariant v : variants)
            report["mean_latent_snr_db"][to_string(v)] = sf::mean_latent_snr(rows, v);
        std::printf("%s\n", report.dump().c_str());
        return 0;
    }

    if (sweep_cmd->parsed()) {
        const sf::NoiseSchedule schedule = swp_sched.resolve();
        const sf::InversionRecord record = sf::load_record(swp_record);
        const sf::MemorizingOracle oracle(sf::load_latent(swp_reference), swp_gamma);

        sf::FusionConfig base;
        base.sampler.mode = sf::sampler_mode_from_string(swp_mode);
        base.sampler.seed = swp_seed;
        base.history_policy = sf::history_policy_from_string(swp_history);

        const auto rows =
            sf::sweep_intervention(record, oracle, base, swp_orders, swp_tlist, schedule);
        sf::atomic_write_file(swp_out, sf::sweep_to_csv(rows));
        emit_manifest(swp_out, "sweep", schedule, {swp_out});
        json report;
        report["rows"] = rows.size();
        std::printf("%s\n", report.dump().c_str());
        return 0;
    }

    if (round_cmd->parsed()) {
        const sf::NoiseSchedule schedule = rt_sched.resolve();
        const sf::Signal signal = sf::generate_signal(sf::signal_kind_from_string(rt_kind),
                                                      rt_seed, rt_samples);
        const sf::Vec x0 = sf::signal_to_latent(signal, rt_dim);
        const int t_max = rt_tmax < 0 ? schedule.num_steps() - 1 : rt_tmax;

        const bool ode = sf::inversion_variant_from_string(rt_variant) ==
                         sf::InversionVariant::DeterministicOde;
        if (!ode && sf::inversion_variant_from_string(rt_variant) !=
                        sf::InversionVariant::DeterministicSde)
            throw std::invalid_argument("roundtrip: variant must be sde or ode");
        const sf::InversionRecord record =
            ode ? sf::invert_ode(x0, schedule, t_max) : sf::invert_sde(x0, schedule, t_max);

        sf::SamplerConfig config;
        config.mode = ode ? sf::SamplerMode::Ode : sf::SamplerMode::Sde;
        const sf::Trajectory traj = sf::reconstruct_exact(record, config, schedule);

        // per-index deviation between replay and record, relative to ||x0||
        double x0_peak = 0.0;
        for (double v : x0) x0_peak = std::max(x0_peak, std::abs(v));
        double max_rel = 0.0;
        for (const auto& state : traj.states) {
            const sf::Vec& want = record.latents[state.t];
            double scale = x0_peak;
            for (double v : want) scale = std::max(scale, std::abs(v));
            for (std::size_t i = 0; i < want.size(); ++i)
                max_rel = std::max(max_rel, std::abs(state.values[i] - want[i]) / scale);
        }
        const double snr = sf::snr_db(x0, traj.states.back().values);
        const bool pass = max_rel <= rt_tolerance && snr >= 100.0;

        json report;
        report["variant"] = rt_variant;
        report["t_max"] = t_max;
        report["max_rel_deviation"] = max_rel;
        report["latent_snr_db"] = snr;
        report["pass"] = pass;
        std::printf("%s\n", report.dump().c_str());
        if (!pass) return kExitNumerical;
        return 0;
    }

    return kExitBadArgs;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sf::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUnreadable;
    } catch (const sf::NumericalFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitMissingLatent;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadArgs;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
