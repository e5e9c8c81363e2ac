// kgphase: simulate, sweep, classify and plot Klein-Gordon double-well runs.

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "kgphase/kgphase.hpp"

namespace io = kgphase::io;

int main(int argc, char** argv) {
    CLI::App app{"Pseudospectral Klein-Gordon solver with phase-plane analysis"};
    app.set_version_flag("--version", std::string(KGPHASE_VERSION));
    app.require_subcommand(1);
    app.fallthrough();  // accept --config and --out after the subcommand too

    std::string config, out;
    app.add_option("--config", config, "key = value parameter file");
    app.add_option("--out", out, "output directory");

    auto* simulate = app.add_subcommand("simulate", "run one simulation and write CSVs, manifest");
    std::string manifest;
    simulate->add_option("--manifest", manifest, "re-run with the parameters recorded in a manifest.json");

    auto* sweep = app.add_subcommand("sweep", "simulate and classify over a list of amplitudes");
    std::string amplitudes;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    sweep->add_option("--amplitudes", amplitudes, "comma-separated, strictly increasing")->required();
    sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

    auto* classify = app.add_subcommand("classify", "re-derive the mode label from a run directory");
    std::string run_dir;
    classify->add_option("run_dir", run_dir, "directory written by simulate")->required();

    auto* plot = app.add_subcommand("plot", "render waveform or phase-plane SVGs");
    std::string kind = "phase", times = "all";
    plot->add_option("run_dir", run_dir, "directory written by simulate")->required();
    plot->add_option("--kind", kind, "waveform or phase");
    plot->add_option("--times", times, "all, last, or comma-separated snapshot times");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : io::kExitUsage;
    }

    auto opt = [](const std::string& s) -> std::optional<io::fs::path> {
        if (s.empty()) return std::nullopt;
        return io::fs::path(s);
    };

    if (*simulate) return io::cmd_simulate(opt(config), opt(manifest), out.empty() ? "run" : out, std::cout, std::cerr);
    if (*sweep) {
        std::vector<double> list;
        if (!io::detail::parse_list(amplitudes, list)) {
            std::cerr << "sweep: cannot parse amplitude list '" << amplitudes << "'\n";
            return io::kExitUsage;
        }
        return io::cmd_sweep(opt(config), list, out.empty() ? "sweep" : out, jobs, std::cout, std::cerr);
    }
    if (*classify) return io::cmd_classify(run_dir, std::cout, std::cerr);
    if (*plot) {
        const io::fs::path dest = out.empty() ? io::fs::path(run_dir) / "plots" : io::fs::path(out);
        return io::cmd_plot(run_dir, kind, times, dest, std::cout, std::cerr);
    }
    return io::kExitUsage;
}
