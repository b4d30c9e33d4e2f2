#pragma once

// Flat "section.key = value" configuration files. Blank lines and lines
// starting with '#' are ignored; '#' also starts a trailing comment. Every
// key has a default, unknown keys are a hard error (with a nearest-key
// suggestion), and the fully resolved set is echoed into manifest.txt so a
// run directory records exactly what produced it.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hartree {

struct GridConfig {
    std::size_t n = 512;
    double min = -12.0;
    double max = 12.0;
};

enum class PotentialPreset { double_well_bump, tabulated };
enum class CouplingMode { bump, zero };
enum class InitialKind { gaussian, ground_state };
enum class PicardSeedMode { free_flow, frozen_initial };
enum class PicardAverages { left, midpoint };
enum class SlopeMode { pure_bump, odd_bump };

struct InitialConfig {
    InitialKind kind = InitialKind::gaussian;
    double center = 0.0;
    double width = 1.0;
    double momentum = 0.0;
};

struct SimulationConfig {
    GridConfig grid_x;
    GridConfig grid_y;

    // "double_well_bump" (alias "example31") or "tabulated".
    PotentialPreset preset = PotentialPreset::double_well_bump;
    double ell = 1.0;
    double omega = 1.0;
    double bump_amplitude = 0.2;
    double bump_support = 2.0;
    SlopeMode slope_mode = SlopeMode::pure_bump;
    CouplingMode coupling = CouplingMode::bump;
    std::string v1_csv; // required when preset = tabulated
    std::string v2_csv;

    InitialConfig initial_x;
    InitialConfig initial_y;

    double T = 1.0;
    double dt = 1e-3;
    std::size_t record_every = 10;

    double picard_T1 = 0.25;
    std::size_t picard_max_iterates = 8;
    double picard_tol = 1e-10;
    PicardSeedMode picard_seed = PicardSeedMode::free_flow;
    PicardAverages picard_averages = PicardAverages::left;
    std::size_t picard_segments = 1;
    std::size_t picard_storage_limit_mb = 512;

    bool compare_enabled = true;
    bool compare_memory_ack = false;

    double gs_dt_im = 5e-3;
    double gs_tol = 1e-13;
    std::size_t gs_max_iter = 200000;

    bool df_residual = false;

    double boundary_init_tol = 1e-12;
    double boundary_warn_tol = 1e-8;

    std::vector<double> check_offsets{0.0, 1.0, 2.0, 5.0, 10.0, 50.0};

    std::string output_dir = "out";

    // Canonical "key = value" echo of every key after parsing, sorted by key.
    std::map<std::string, std::string> resolved;
    // FNV-1a 64-bit digest of the resolved text (output_dir excluded, so the
    // digest identifies the run physics, not where the files land), hex.
    std::string digest;
};

// Parse from file / from text (the latter is handy in tests). Throws
// std::runtime_error with an origin:line message on any problem.
SimulationConfig load_config(const std::filesystem::path& path);
SimulationConfig parse_config(const std::string& text, const std::string& origin = "<string>");

// Override the output directory (CLI --out) and refresh the resolved echo.
void set_output_dir(SimulationConfig& cfg, const std::string& dir);

// The resolved echo as manifest text: "# config digest <hex>" followed by the
// sorted "key = value" lines.
std::string manifest_text(const SimulationConfig& cfg);

} // namespace hartree
