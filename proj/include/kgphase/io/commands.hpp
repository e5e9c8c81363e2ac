#pragma once

// Run orchestration behind the command-line subcommands. Every command
// returns a process exit status: 0 success, 1 usage, 2 data or solver
// failure, 3 I/O failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "kgphase/integrator.hpp"
#include "kgphase/io/config.hpp"
#include "kgphase/io/csv.hpp"
#include "kgphase/io/manifest.hpp"
#include "kgphase/io/svg_plot.hpp"
#include "kgphase/phase_geometry.hpp"

namespace kgphase::io {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitIo = 3 };

/// Everything a run emits, held in memory.
struct RunRecord {
    SimParams params;
    std::vector<FieldState> snapshots;
    std::vector<DiagnosticsRow> diagnostics;
    std::vector<TracerTrack> tracks;
    RunSummary summary;
    bool ok = true;
    double t_fail = 0.0;
    std::string failure;
};

inline RunRecord record_run(const SimParams& params) {
    RunRecord rec;
    rec.params = params;
    for (double x : params.probes) rec.tracks.push_back({x, {}});
    RunSinks sinks;
    sinks.snapshot = [&](const FieldState& s) { rec.snapshots.push_back(s); };
    sinks.diagnostics = [&](const DiagnosticsRow& r) { rec.diagnostics.push_back(r); };
    sinks.tracer = [&](std::size_t p, const TracerSample& s) { rec.tracks[p].samples.push_back(s); };
    try {
        rec.summary = integrate(params, sinks);
    } catch (const IntegrationAborted& e) {
        rec.ok = false;
        rec.t_fail = e.t_fail;
        rec.failure = e.what();
        rec.summary = e.partial;
    }
    return rec;
}

/// Mode label of a recorded run, or nullopt with the reason in `note`.
inline std::optional<ModeLabel> label_run(const RunRecord& rec, std::string& note) {
    try {
        return classify_mode(rec.tracks, rec.diagnostics, rec.params);
    } catch (const Error& e) {
        note = e.what();
        return std::nullopt;
    }
}

struct SimulateOutcome {
    int exit_code = kExitOk;
    RunManifest manifest;
};

/// Runs `params` and writes snapshots.csv, diagnostics.csv, tracers.csv,
/// params.conf and manifest.json into `out_dir`.
inline SimulateOutcome simulate_to_dir(const SimParams& params, const fs::path& out_dir) {
    SimulateOutcome outcome;
    RunManifest& m = outcome.manifest;
    m.params = params;
    m.started_utc = utc_now();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const RunRecord rec = record_run(params);
    m.finished_utc = utc_now();
    m.ok = rec.ok;
    if (!rec.ok) {
        m.failure_t = rec.t_fail;
        m.failure_message = rec.failure;
        outcome.exit_code = kExitData;
    }
    m.max_energy_drift = rec.summary.max_abs_drift;
    m.max_stage_residual = rec.summary.max_residual;
    m.total_sweeps = rec.summary.total_sweeps;
    m.steps = rec.summary.steps;
    m.label = label_run(rec, m.label_note);

    const Grid grid = make_grid(params);
    const std::vector<std::pair<std::string, std::string>> outputs{
        {"snapshots.csv", snapshots_csv(rec.snapshots, grid)},
        {"diagnostics.csv", diagnostics_csv(rec.diagnostics)},
        {"tracers.csv", tracers_csv(rec.tracks)},
        {"params.conf", format_config(params)}};
    for (const auto& [name, content] : outputs) {
        write_file_atomic(out_dir / name, content);
        m.files.push_back({name, content.size(), sha256_hex(content)});
    }
    write_file_atomic(out_dir / "manifest.json", manifest_to_json(m).dump(2) + "\n");
    return outcome;
}

/// Parameters from a key-value config, a manifest (for exact re-runs) or the defaults.
inline SimParams load_params(const std::optional<fs::path>& config, const std::optional<fs::path>& manifest) {
    if (manifest) {
        SimParams p = params_from_json(read_manifest(*manifest).at("params"));
        if (auto v = validate_params(p); !v.empty()) throw ValidationError(std::move(v));
        return p;
    }
    if (config) return parse_config(read_file(*config));
    return parse_config("");
}

inline void print_label(std::ostream& out, const ModeLabel& l) {
    out << "label: " << to_string(l.kind) << '\n'
        << "  t_skip:     " << format_double(l.evidence.t_skip) << '\n'
        << "  m_left:     " << format_double(l.evidence.m_left) << "  (min u over 0 < x < L/2, t >= t_skip)\n"
        << "  m_right:    " << format_double(l.evidence.m_right) << "  (max u over L/2 < x < L, t >= t_skip)\n"
        << "  rot_vacuum: " << format_double(l.evidence.rot_vacuum) << "  turns of first tracer about +sqrt(mu/beta)\n"
        << "  rot_origin: " << format_double(l.evidence.rot_origin) << "  turns of first tracer about the origin\n";
    if (!l.evidence.note.empty()) out << "  note: " << l.evidence.note << '\n';
}

inline int cmd_simulate(const std::optional<fs::path>& config, const std::optional<fs::path>& manifest,
                        const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    SimParams params;
    try {
        params = load_params(config, manifest);
    } catch (const IoError& e) {
        err << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }
    try {
        const auto outcome = simulate_to_dir(params, out_dir);
        const auto& m = outcome.manifest;
        out << "run " << (m.ok ? "completed" : "FAILED") << ": " << m.steps << " steps, max |energy drift| "
            << format_double(m.max_energy_drift) << ", max stage residual " << format_double(m.max_stage_residual)
            << '\n';
        if (!m.ok) err << m.failure_message << '\n';
        if (m.label)
            print_label(out, *m.label);
        else
            out << "label: unavailable (" << m.label_note << ")\n";
        out << "outputs written to " << out_dir.string() << '\n';
        return outcome.exit_code;
    } catch (const IoError& e) {
        err << e.what() << '\n';
        return kExitIo;
    }
}

struct SweepRow {
    double amplitude = 0.0;
    ModeKind kind = ModeKind::indeterminate;
    ModeEvidence evidence;
    double max_drift = NAN;
    std::string note;
};

using SweepResult = std::vector<SweepRow>;

inline std::string sweep_csv(const SweepResult& rows) {
    std::string out = "A,label,m_left,m_right,rot_left,rot_origin,max_drift\n";
    for (const auto& r : rows)
        out += format_double(r.amplitude) + "," + std::string(to_string(r.kind)) + "," +
               format_double(r.evidence.m_left) + "," + format_double(r.evidence.m_right) + "," +
               format_double(r.evidence.rot_vacuum) + "," + format_double(r.evidence.rot_origin) + "," +
               format_double(r.max_drift) + "\n";
    return out;
}

/// One simulate + classify per amplitude, fanned out over `jobs` threads.
/// Each run writes into its own subdirectory of `out_dir`.
inline SweepResult run_sweep(const SimParams& base, const std::vector<double>& amplitudes, const fs::path& out_dir,
                             unsigned jobs) {
    SweepResult rows(amplitudes.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < amplitudes.size(); i = next++) {
            SweepRow& row = rows[i];
            row.amplitude = amplitudes[i];
            row.evidence.m_left = row.evidence.m_right = row.evidence.rot_vacuum = row.evidence.rot_origin = NAN;
            SimParams p = base;
            p.amplitude = amplitudes[i];
            char name[64];
            std::snprintf(name, sizeof name, "run_%03zu_A%.6g", i, amplitudes[i]);
            try {
                const auto outcome = simulate_to_dir(p, out_dir / name);
                row.max_drift = outcome.manifest.max_energy_drift;
                if (!outcome.manifest.ok) row.note = outcome.manifest.failure_message;
                if (outcome.manifest.label && outcome.manifest.ok) {
                    row.kind = outcome.manifest.label->kind;
                    row.evidence = outcome.manifest.label->evidence;
                } else if (row.note.empty()) {
                    row.note = outcome.manifest.label_note;
                }
            } catch (const Error& e) {
                row.note = e.what();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(amplitudes.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return rows;
}

inline int cmd_sweep(const std::optional<fs::path>& config, const std::vector<double>& amplitudes,
                     const fs::path& out_dir, unsigned jobs, std::ostream& out, std::ostream& err) {
    if (amplitudes.empty()) {
        err << "sweep: amplitude list is empty\n";
        return kExitUsage;
    }
    for (std::size_t i = 1; i < amplitudes.size(); ++i) {
        if (!(amplitudes[i] > amplitudes[i - 1])) {
            err << "sweep: amplitudes must be strictly increasing\n";
            return kExitUsage;
        }
    }
    SimParams base;
    try {
        base = load_params(config, std::nullopt);
    } catch (const IoError& e) {
        err << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }
    try {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create " + out_dir.string());
        const auto rows = run_sweep(base, amplitudes, out_dir, jobs);
        write_file_atomic(out_dir / "sweep.csv", sweep_csv(rows));
        bool any = false;
        for (const auto& r : rows) {
            out << "A = " << format_double(r.amplitude) << ": " << to_string(r.kind);
            if (!r.note.empty()) out << " (" << r.note << ")";
            out << '\n';
            any = any || r.note.empty();
        }
        return any ? kExitOk : kExitData;
    } catch (const IoError& e) {
        err << e.what() << '\n';
        return kExitIo;
    }
}

/// Run files read back from disk.
struct LoadedRun {
    SimParams params;
    json manifest;
    std::vector<DiagnosticsRow> diagnostics;
    std::vector<TracerTrack> tracks;
};

inline LoadedRun load_run_for_classify(const fs::path& dir) {
    LoadedRun run;
    run.manifest = read_manifest(dir / "manifest.json");
    run.params = params_from_json(run.manifest.at("params"));
    run.diagnostics = parse_diagnostics(read_file(dir / "diagnostics.csv"));
    run.tracks = parse_tracers(read_file(dir / "tracers.csv"));
    return run;
}

/// Re-derives the mode label from the files of a finished run.
inline ModeLabel classify_run_dir(const fs::path& dir) {
    const auto run = load_run_for_classify(dir);
    return classify_mode(run.tracks, run.diagnostics, run.params);
}

inline int cmd_classify(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
    try {
        print_label(out, classify_run_dir(run_dir));
        return kExitOk;
    } catch (const IoError& e) {
        err << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitData;
    }
}

enum class PlotKind { waveform, phase };

inline std::optional<PlotKind> parse_plot_kind(std::string_view s) {
    if (s == "waveform") return PlotKind::waveform;
    if (s == "phase") return PlotKind::phase;
    return std::nullopt;
}

inline bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

/// Snapshot times named by `selection`: "all", "last", or a comma-separated list.
inline std::vector<double> select_times(std::string_view selection, const std::vector<FieldState>& snapshots) {
    std::vector<double> out;
    if (selection == "all") {
        for (const auto& s : snapshots) out.push_back(s.t);
        return out;
    }
    if (selection == "last") {
        if (snapshots.empty()) throw MissingSnapshot("run has no snapshots");
        return {snapshots.back().t};
    }
    std::vector<double> wanted;
    if (!detail::parse_list(selection, wanted) || wanted.empty())
        throw ParseError(0, "times", "expected all, last or a list of times");
    for (double t : wanted) {
        const bool found =
            std::any_of(snapshots.begin(), snapshots.end(), [&](const FieldState& s) { return same_time(s.t, t); });
        if (!found) throw MissingSnapshot("no snapshot at t = " + format_double(t));
        out.push_back(t);
    }
    return out;
}

inline std::string plot_file_name(PlotKind kind, double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_t%010.3f.svg", kind == PlotKind::waveform ? "waveform" : "phase", t);
    return buf;
}

/// Renders SVGs for the selected snapshot times; returns the written paths.
inline std::vector<fs::path> plot_run(const fs::path& run_dir, PlotKind kind, std::string_view selection,
                                      const fs::path& out_dir) {
    const json manifest = read_manifest(run_dir / "manifest.json");
    const SimParams params = params_from_json(manifest.at("params"));
    const auto table = parse_snapshots(read_file(run_dir / "snapshots.csv"));
    const auto tracks = kind == PlotKind::phase ? parse_tracers(read_file(run_dir / "tracers.csv"))
                                                : std::vector<TracerTrack>{};
    const auto times = select_times(selection, table.states);
    auto find = [&](double t) -> const FieldState* {
        for (const auto& s : table.states)
            if (same_time(s.t, t)) return &s;
        return nullptr;
    };
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string());
    std::vector<fs::path> written;
    for (double t : times) {
        const FieldState& s = *find(t);
        std::string svg_text;
        if (kind == PlotKind::waveform)
            svg_text = render_waveform(table.x, params.domain_length, s, find(t - params.snapshot_every));
        else
            svg_text = render_phase(phase_loop(s), fixed_points(params), tracks);
        const fs::path path = out_dir / plot_file_name(kind, t);
        write_file_atomic(path, svg_text);
        written.push_back(path);
    }
    return written;
}

inline int cmd_plot(const fs::path& run_dir, std::string_view kind_name, std::string_view selection,
                    const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    const auto kind = parse_plot_kind(kind_name);
    if (!kind) {
        err << "plot: kind must be waveform or phase\n";
        return kExitUsage;
    }
    try {
        for (const auto& p : plot_run(run_dir, *kind, selection, out_dir)) out << p.string() << '\n';
        return kExitOk;
    } catch (const IoError& e) {
        err << e.what() << '\n';
        return kExitIo;
    } catch (const ParseError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace kgphase::io
