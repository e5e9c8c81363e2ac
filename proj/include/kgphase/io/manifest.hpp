#pragma once

// Run manifest: resolved parameters, grid, timing, solver health and a
// SHA-256 inventory of every output file, stored as JSON.

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgphase/core_state.hpp"
#include "kgphase/io/csv.hpp"
#include "kgphase/phase_geometry.hpp"

#ifndef KGPHASE_VERSION
#define KGPHASE_VERSION "1.0.0"
#endif

namespace kgphase::io {

using nlohmann::json;

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

inline std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json params_to_json(const SimParams& p) {
    return {{"alpha", p.alpha},
            {"beta", p.beta},
            {"mu", p.mu},
            {"amplitude", p.amplitude},
            {"domain_length", p.domain_length},
            {"grid_points", p.grid_points},
            {"dt", p.dt},
            {"t_end", p.t_end},
            {"snapshot_every", p.snapshot_every},
            {"laplacian_sign", std::string(to_string(p.laplacian_sign))},
            {"dealias", std::string(to_string(p.dealias))},
            {"irk_stages", p.irk_stages},
            {"stage_tol", p.stage_tol},
            {"stage_max_iter", p.stage_max_iter},
            {"probes", p.probes}};
}

inline SimParams params_from_json(const json& j) {
    SimParams p;
    try {
        p.alpha = j.at("alpha").get<double>();
        p.beta = j.at("beta").get<double>();
        p.mu = j.at("mu").get<double>();
        p.amplitude = j.at("amplitude").get<double>();
        p.domain_length = j.at("domain_length").get<double>();
        p.grid_points = j.at("grid_points").get<int>();
        p.dt = j.at("dt").get<double>();
        p.t_end = j.at("t_end").get<double>();
        p.snapshot_every = j.at("snapshot_every").get<double>();
        p.irk_stages = j.at("irk_stages").get<int>();
        p.stage_tol = j.at("stage_tol").get<double>();
        p.stage_max_iter = j.at("stage_max_iter").get<int>();
        p.probes = j.at("probes").get<std::vector<double>>();
        const auto sign = parse_laplacian_sign(j.at("laplacian_sign").get<std::string>());
        const auto dealias = parse_dealias(j.at("dealias").get<std::string>());
        if (!sign || !dealias) throw InsufficientData("manifest: unknown enum value");
        p.laplacian_sign = *sign;
        p.dealias = *dealias;
    } catch (const json::exception& e) {
        throw InsufficientData(std::string("manifest params: ") + e.what());
    }
    return p;
}

struct FileDigest {
    std::string name;
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct RunManifest {
    std::string tool_version = KGPHASE_VERSION;
    SimParams params;
    std::string started_utc;
    std::string finished_utc;
    bool ok = true;
    std::optional<double> failure_t;
    std::string failure_message;
    double max_energy_drift = 0.0;
    double max_stage_residual = 0.0;
    long total_sweeps = 0;
    long steps = 0;
    std::optional<ModeLabel> label;
    std::string label_note;
    std::vector<FileDigest> files;
};

inline json label_to_json(const ModeLabel& l) {
    return {{"label", std::string(to_string(l.kind))},   {"t_skip", l.evidence.t_skip},
            {"m_left", l.evidence.m_left},               {"m_right", l.evidence.m_right},
            {"rot_vacuum", l.evidence.rot_vacuum},       {"rot_origin", l.evidence.rot_origin},
            {"note", l.evidence.note}};
}

inline json manifest_to_json(const RunManifest& m) {
    const Grid g = make_grid(m.params);
    json j{{"tool", "kgphase"},
           {"tool_version", m.tool_version},
           {"params", params_to_json(m.params)},
           {"laplacian_sign_note",
            m.params.laplacian_sign == LaplacianSign::standard_wave
                ? "standard_wave: v_t = +alpha u_xx + mu u - beta u^3"
                : "as_written: v_t = -alpha u_xx + mu u - beta u^3 (modes with alpha k^2 > 2 mu unstable)"},
           {"grid", {{"n", g.n}, {"length", g.length}, {"dx", g.dx()}}},
           {"started_utc", m.started_utc},
           {"finished_utc", m.finished_utc},
           {"status", m.ok ? "ok" : "failed"},
           {"max_energy_drift", m.max_energy_drift},
           {"max_stage_residual", m.max_stage_residual},
           {"total_sweeps", m.total_sweeps},
           {"steps", m.steps}};
    if (!m.ok) j["failure"] = {{"t", m.failure_t.value_or(0.0)}, {"message", m.failure_message}};
    if (m.label)
        j["mode_label"] = label_to_json(*m.label);
    else
        j["mode_label"] = {{"label", "unavailable"}, {"note", m.label_note}};
    json files = json::array();
    for (const auto& f : m.files) files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    j["files"] = files;
    return j;
}

inline FileDigest digest_file(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    return {path.filename().string(), content.size(), sha256_hex(content)};
}

inline json read_manifest(const std::filesystem::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw InsufficientData(path.string() + ": " + e.what());
    }
}

/// Names of inventory files whose size or digest no longer matches.
inline std::vector<std::string> verify_digests(const std::filesystem::path& run_dir) {
    const json m = read_manifest(run_dir / "manifest.json");
    std::vector<std::string> bad;
    for (const auto& f : m.at("files")) {
        const auto name = f.at("name").get<std::string>();
        try {
            const auto d = digest_file(run_dir / name);
            if (d.bytes != f.at("bytes").get<std::uintmax_t>() || d.sha256 != f.at("sha256").get<std::string>())
                bad.push_back(name);
        } catch (const IoError&) {
            bad.push_back(name);
        }
    }
    return bad;
}

}  // namespace kgphase::io
