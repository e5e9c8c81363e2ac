#pragma once

// Line-oriented "key = value" configuration. Keys are exactly the SimParams
// field names, '#' starts a comment, missing keys keep their defaults.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kgphase/core_state.hpp"

namespace kgphase::io {

class ParseError : public Error {
public:
    ParseError(int line, std::string key, const std::string& what)
        : Error("ParseError: line " + std::to_string(line) + (key.empty() ? "" : ", key '" + key + "'") + ": " +
                what),
          line(line),
          key(std::move(key)) {}

    int line;
    std::string key;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> v) : Error(describe(v)), violations(std::move(v)) {}

    std::vector<Violation> violations;

private:
    static std::string describe(const std::vector<Violation>& v) {
        std::string s = "ValidationError:";
        for (const auto& x : v) s += " [" + x.field + ": " + x.rule + "]";
        return s;
    }
};

/// Shortest decimal that round-trips a double (17 significant digits).
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline bool parse_number(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

inline bool parse_integer(std::string_view s, int& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

inline bool parse_list(std::string_view s, std::vector<double>& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') return false;
        s = trim(s.substr(1, s.size() - 2));
    }
    out.clear();
    if (s.empty()) return true;
    while (true) {
        const auto comma = s.find(',');
        double x = 0.0;
        if (!parse_number(s.substr(0, comma), x)) return false;
        out.push_back(x);
        if (comma == std::string_view::npos) return true;
        s.remove_prefix(comma + 1);
    }
}

}  // namespace detail

/// Applies the assignments in `text` on top of `base` without validating.
inline SimParams apply_config(std::string_view text, SimParams base = {}) {
    SimParams p = std::move(base);
    std::vector<std::string> seen;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ParseError(line_no, key, "duplicate key");
        seen.push_back(key);

        auto real = [&](double& field) {
            if (!detail::parse_number(value, field)) throw ParseError(line_no, key, "not a number");
        };
        auto integer = [&](int& field) {
            if (!detail::parse_integer(value, field)) throw ParseError(line_no, key, "not an integer");
        };
        if (key == "alpha") real(p.alpha);
        else if (key == "beta") real(p.beta);
        else if (key == "mu") real(p.mu);
        else if (key == "amplitude") real(p.amplitude);
        else if (key == "domain_length") real(p.domain_length);
        else if (key == "grid_points") integer(p.grid_points);
        else if (key == "dt") real(p.dt);
        else if (key == "t_end") real(p.t_end);
        else if (key == "snapshot_every") real(p.snapshot_every);
        else if (key == "irk_stages") integer(p.irk_stages);
        else if (key == "stage_tol") real(p.stage_tol);
        else if (key == "stage_max_iter") integer(p.stage_max_iter);
        else if (key == "laplacian_sign") {
            auto s = parse_laplacian_sign(value);
            if (!s) throw ParseError(line_no, key, "expected standard_wave or as_written");
            p.laplacian_sign = *s;
        } else if (key == "dealias") {
            auto d = parse_dealias(value);
            if (!d) throw ParseError(line_no, key, "expected none or pad2x");
            p.dealias = *d;
        } else if (key == "probes") {
            if (!detail::parse_list(value, p.probes)) throw ParseError(line_no, key, "expected a list of numbers");
        } else {
            throw ParseError(line_no, key, "unknown key");
        }
    }
    return p;
}

/// Parses and validates a configuration document.
inline SimParams parse_config(std::string_view text) {
    SimParams p = apply_config(text);
    if (auto v = validate_params(p); !v.empty()) throw ValidationError(std::move(v));
    return p;
}

/// Writes every field so that parse_config(format_config(p)) == p.
inline std::string format_config(const SimParams& p) {
    std::ostringstream out;
    out << "alpha = " << format_double(p.alpha) << '\n'
        << "beta = " << format_double(p.beta) << '\n'
        << "mu = " << format_double(p.mu) << '\n'
        << "amplitude = " << format_double(p.amplitude) << '\n'
        << "domain_length = " << format_double(p.domain_length) << '\n'
        << "grid_points = " << p.grid_points << '\n'
        << "dt = " << format_double(p.dt) << '\n'
        << "t_end = " << format_double(p.t_end) << '\n'
        << "snapshot_every = " << format_double(p.snapshot_every) << '\n'
        << "laplacian_sign = " << to_string(p.laplacian_sign) << '\n'
        << "dealias = " << to_string(p.dealias) << '\n'
        << "irk_stages = " << p.irk_stages << '\n'
        << "stage_tol = " << format_double(p.stage_tol) << '\n'
        << "stage_max_iter = " << p.stage_max_iter << '\n'
        << "probes = [";
    for (std::size_t i = 0; i < p.probes.size(); ++i) out << (i ? ", " : "") << format_double(p.probes[i]);
    out << "]\n";
    return out.str();
}

}  // namespace kgphase::io
