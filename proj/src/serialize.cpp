// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#include "soundfusion/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "soundfusion/hash.hpp"

namespace soundfusion {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t hash_file(const std::string& path) {
    const std::string content = read_file(path);
    return Fnv1a().update(content).digest();
}

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

json vec_to_json(const std::vector<double>& v) { return json(v); }

std::vector<double> vec_from_json(const json& j) {
    return j.get<std::vector<double>>();
}

// Loader bodies run under this wrapper so every parse or shape problem
// surfaces as IoError.
template <typename F>
auto as_io_error(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError("malformed input " + path + ": " + e.what());
    }
}

std::vector<std::string> jsonl_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

} // namespace

std::string schedule_to_json(const NoiseSchedule& schedule) {
    json j;
    j["kind"] = to_string(schedule.kind);
    j["num_steps"] = schedule.num_steps();
    j["lambda_max"] = schedule.lambda_max;
    j["lambda_min"] = schedule.lambda_min;
    j["lambdas"] = vec_to_json(schedule.lambdas);
    return j.dump(2) + "\n";
}

NoiseSchedule schedule_from_json(const std::string& text) {
    const json j = json::parse(text);
    NoiseSchedule s = schedule_from_lambdas(schedule_kind_from_string(j.at("kind")),
                                            vec_from_json(j.at("lambdas")));
    if (j.at("num_steps").get<int>() != s.num_steps())
        throw std::invalid_argument("num_steps does not match the lambda grid");
    s.lambda_max = j.at("lambda_max").get<double>();
    s.lambda_min = j.at("lambda_min").get<double>();
    return s;
}

void save_schedule(const NoiseSchedule& schedule, const std::string& path) {
    atomic_write_file(path, schedule_to_json(schedule));
}

NoiseSchedule load_schedule(const std::string& path) {
    return as_io_error(path, [&] { return schedule_from_json(read_file(path)); });
}

void save_latent(const std::vector<double>& values, const std::string& path) {
    json j;
    j["dimension"] = values.size();
    j["values"] = vec_to_json(values);
    atomic_write_file(path, j.dump(2) + "\n");
}

std::vector<double> load_latent(const std::string& path) {
    return as_io_error(path, [&] {
        const json j = json::parse(read_file(path));
        auto v = vec_from_json(j.at("values"));
        if (j.at("dimension").get<std::size_t>() != v.size())
            throw std::invalid_argument("dimension does not match values");
        if (v.empty()) throw std::invalid_argument("empty latent");
        return v;
    });
}

void save_record(const InversionRecord& record, const std::string& path) {
    std::string out;
    json header;
    header["type"] = "inversion_record";
    header["variant"] = to_string(record.variant);
    header["schedule_fingerprint"] = hex64(record.schedule_fingerprint);
    header["t_max"] = record.t_max();
    header["dimension"] = record.dimension();
    header["seed"] = record.seed;
    out += header.dump() + "\n";
    for (int t = 0; t <= record.t_max(); ++t) {
        json row;
        row["t"] = t;
        row["latent"] = vec_to_json(record.latents[t]);
        row["noise_map"] = vec_to_json(record.noise_maps[t]);
        out += row.dump() + "\n";
    }
    atomic_write_file(path, out);
}

InversionRecord load_record(const std::string& path) {
    return as_io_error(path, [&] {
        const auto lines = jsonl_lines(read_file(path));
        if (lines.empty()) throw std::invalid_argument("empty record file");
        const json header = json::parse(lines[0]);
        if (header.at("type") != "inversion_record")
            throw std::invalid_argument("not an inversion record");
        InversionRecord r;
        r.variant = inversion_variant_from_string(header.at("variant"));
        r.schedule_fingerprint =
            std::stoull(header.at("schedule_fingerprint").get<std::string>(), nullptr, 16);
        r.seed = header.at("seed").get<std::uint64_t>();
        const int t_max = header.at("t_max").get<int>();
        const auto dim = header.at("dimension").get<std::size_t>();
        if (static_cast<int>(lines.size()) != t_max + 2)
            throw std::invalid_argument("row count does not match t_max");
        for (int t = 0; t <= t_max; ++t) {
            const json row = json::parse(lines[t + 1]);
            if (row.at("t").get<int>() != t)
                throw std::invalid_argument("rows out of order");
            auto latent = vec_from_json(row.at("latent"));
            auto noise_map = vec_from_json(row.at("noise_map"));
            if (latent.size() != dim || noise_map.size() != dim)
                throw std::invalid_argument("row dimension mismatch");
            r.latents.push_back(std::move(latent));
            r.noise_maps.push_back(std::move(noise_map));
        }
        r.x0 = r.latents[0];
        return r;
    });
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
    std::string out;
    json header;
    header["type"] = "trajectory";
    header["mode"] = to_string(traj.mode);
    header["order"] = traj.order;
    header["multistep"] = traj.multistep;
    header["seed"] = traj.seed;
    header["schedule_fingerprint"] = hex64(traj.schedule_fingerprint);
    header["num_states"] = traj.states.size();
    header["dimension"] = traj.states.empty() ? 0 : traj.states[0].values.size();
    out += header.dump() + "\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        json row;
        row["i"] = i;
        row["t"] = traj.states[i].t;
        row["values"] = vec_to_json(traj.states[i].values);
        if (i < traj.model_outputs.size())
            row["model_output"] = vec_to_json(traj.model_outputs[i]);
        if (i < traj.noise_draws.size() && !traj.noise_draws[i].empty())
            row["noise"] = vec_to_json(traj.noise_draws[i]);
        out += row.dump() + "\n";
    }
    atomic_write_file(path, out);
}

Trajectory load_trajectory(const std::string& path) {
    return as_io_error(path, [&] {
        const auto lines = jsonl_lines(read_file(path));
        if (lines.empty()) throw std::invalid_argument("empty trajectory file");
        const json header = json::parse(lines[0]);
        if (header.at("type") != "trajectory")
            throw std::invalid_argument("not a trajectory");
        Trajectory traj;
        traj.mode = sampler_mode_from_string(header.at("mode"));
        traj.order = header.at("order").get<int>();
        traj.multistep = header.at("multistep").get<bool>();
        traj.seed = header.at("seed").get<std::uint64_t>();
        traj.schedule_fingerprint =
            std::stoull(header.at("schedule_fingerprint").get<std::string>(), nullptr, 16);
        const auto num_states = header.at("num_states").get<std::size_t>();
        if (lines.size() != num_states + 1)
            throw std::invalid_argument("row count does not match num_states");
        for (std::size_t i = 0; i < num_states; ++i) {
            const json row = json::parse(lines[i + 1]);
            Latent state;
            state.t = row.at("t").get<int>();
            state.values = vec_from_json(row.at("values"));
            traj.states.push_back(std::move(state));
            if (row.contains("model_output"))
                traj.model_outputs.push_back(vec_from_json(row.at("model_output")));
            if (i + 1 < num_states)
                traj.noise_draws.push_back(
                    row.contains("noise") ? vec_from_json(row.at("noise"))
                                          : std::vector<double>{});
        }
        return traj;
    });
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "order,mode,intervention_t,dist_original,dist_reference,seed\n";
    for (const auto& r : rows) {
        out += std::to_string(r.order) + "," + to_string(r.mode) + "," +
               std::to_string(r.intervention_t) + "," + format_double(r.dist_original) +
               "," + format_double(r.dist_reference) + "," + std::to_string(r.seed) + "\n";
    }
    return out;
}

std::string compare_to_csv(const std::vector<CompareRow>& rows) {
    std::string out =
        "variant,kind,seed,latent_rmse,latent_snr_db,audio_snr_db,audio_rmse,audio_lsd\n";
    for (const auto& r : rows) {
        out += to_string(r.variant) + "," + to_string(r.kind) + "," +
               std::to_string(r.seed) + "," + format_double(r.latent_rmse) + "," +
               format_double(r.latent_snr_db) + "," + format_double(r.audio.snr_db) +
               "," + format_double(r.audio.rmse) + "," + format_double(r.audio.lsd) + "\n";
    }
    return out;
}

ManifestEntry hash_output(const std::string& path) {
    return {path, hash_file(path)};
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& extra,
                    const std::vector<ManifestEntry>& outputs) {
    json j;
    j["tool"] = "sfusion";
    j["command"] = command;
    for (const auto& [key, value] : extra) j[key] = value;
    json outs = json::array();
    for (const auto& entry : outputs) {
        json o;
        o["path"] = entry.path;
        o["fnv1a64"] = hex64(entry.fnv1a64);
        outs.push_back(o);
    }
    j["outputs"] = outs;
    atomic_write_file(path, j.dump(2) + "\n");
}

} // namespace soundfusion
