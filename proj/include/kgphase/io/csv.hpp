#pragma once

// CSV emission and parsing for run outputs. Comma-separated, LF line endings,
// no quoting, every real number written with 17 significant digits so that
// parsing reproduces the emitted doubles exactly.

#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kgphase/core_state.hpp"
#include "kgphase/io/config.hpp"
#include "kgphase/phase_geometry.hpp"

namespace kgphase::io {

inline constexpr std::string_view kSnapshotHeader = "t,x,u,v";
inline constexpr std::string_view kDiagnosticsHeader =
    "t,energy,momentum,energy_drift,u_min_left,u_max_left,u_min_right,u_max_right,rot_origin,rot_left,rot_right";
inline constexpr std::string_view kTracerHeader = "probe_x,t,u,v";

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("IoError: " + what) {}
};

inline std::string snapshots_csv(std::span<const FieldState> snapshots, const Grid& grid) {
    std::string out(kSnapshotHeader);
    out += '\n';
    for (const auto& s : snapshots) {
        const std::string t = format_double(s.t);
        for (std::size_t j = 0; j < grid.n; ++j) {
            out += t;
            out += ',' + format_double(grid.nodes[j]) + ',' + format_double(s.u[j]) + ',' + format_double(s.v[j]) +
                   '\n';
        }
    }
    return out;
}

inline std::string diagnostics_csv(std::span<const DiagnosticsRow> rows) {
    std::string out(kDiagnosticsHeader);
    out += '\n';
    for (const auto& r : rows) {
        for (double x : {r.t, r.energy, r.momentum, r.energy_drift, r.u_min_left, r.u_max_left, r.u_min_right,
                         r.u_max_right, r.rot_origin, r.rot_left, r.rot_right}) {
            out += format_double(x);
            out += ',';
        }
        out.back() = '\n';
    }
    return out;
}

inline std::string tracers_csv(std::span<const TracerTrack> tracks) {
    std::string out(kTracerHeader);
    out += '\n';
    for (const auto& track : tracks) {
        const std::string x = format_double(track.probe_x);
        for (const auto& s : track.samples)
            out += x + ',' + format_double(s.t) + ',' + format_double(s.u) + ',' + format_double(s.v) + '\n';
    }
    return out;
}

namespace detail {

/// Splits a CSV document into numeric rows after checking the header.
inline std::vector<std::vector<double>> numeric_rows(std::string_view text, std::string_view header,
                                                     const char* name) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw InsufficientData(std::string(name) + ": header mismatch, expected '" + std::string(header) + "'");
    const std::size_t columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            double x = 0.0;
            if (!kgphase::io::detail::parse_number(rest.substr(0, comma), x))
                throw InsufficientData(std::string(name) + ": bad number on line " + std::to_string(line_no));
            row.push_back(x);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (row.size() != columns)
            throw InsufficientData(std::string(name) + ": wrong column count on line " + std::to_string(line_no));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

struct SnapshotTable {
    std::vector<double> x;
    std::vector<FieldState> states;
};

inline SnapshotTable parse_snapshots(std::string_view text) {
    SnapshotTable table;
    for (const auto& row : detail::numeric_rows(text, kSnapshotHeader, "snapshots.csv")) {
        if (table.states.empty() || table.states.back().t != row[0]) {
            if (!table.states.empty() && table.states.back().u.size() != table.states.front().u.size())
                throw InsufficientData("snapshots.csv: ragged snapshot");
            table.states.push_back({row[0], {}, {}});
        }
        auto& s = table.states.back();
        if (table.states.size() == 1) table.x.push_back(row[1]);
        s.u.push_back(row[2]);
        s.v.push_back(row[3]);
    }
    if (!table.states.empty() && table.states.back().u.size() != table.x.size())
        throw InsufficientData("snapshots.csv: ragged snapshot");
    return table;
}

inline std::vector<DiagnosticsRow> parse_diagnostics(std::string_view text) {
    std::vector<DiagnosticsRow> out;
    for (const auto& r : detail::numeric_rows(text, kDiagnosticsHeader, "diagnostics.csv"))
        out.push_back({r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8], r[9], r[10]});
    return out;
}

/// Tracks in order of first appearance of each probe coordinate.
inline std::vector<TracerTrack> parse_tracers(std::string_view text) {
    std::vector<TracerTrack> out;
    for (const auto& r : detail::numeric_rows(text, kTracerHeader, "tracers.csv")) {
        auto it = std::find_if(out.begin(), out.end(), [&](const TracerTrack& t) { return t.probe_x == r[0]; });
        if (it == out.end()) {
            out.push_back({r[0], {}});
            it = std::prev(out.end());
        }
        it->samples.push_back({r[1], r[2], r[3]});
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Writes the whole file under a temporary name, then renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace kgphase::io
