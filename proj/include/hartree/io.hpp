#pragma once

// On-disk formats. All binary payloads are little-endian regardless of host.
//
// Trajectory file (magic "HTRJ1"):
//   bytes "HTRJ1", u64 n_x, u64 n_y, u64 n_snapshots, f64 dt,
//   then per snapshot: f64 t, n_x complex (re, im f64), n_y complex.
//
// 2D snapshot file (magic "HTR2"):
//   bytes "HTR2", u64 n_x, u64 n_y, f64 t, row-major complex f64 pairs.
//
// CSV files print every f64 with 17 significant digits ("%.17g"), so a given
// build/config reproduces byte-identical files on one machine.

#include "hartree/diagnostics.hpp"
#include "hartree/hartree.hpp"
#include "hartree/reference.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hartree::io {

void write_trajectory(const std::filesystem::path& path, const HartreeTrajectory& traj);
// Grids are not stored in the file; the caller supplies them and sizes are
// validated against the header.
HartreeTrajectory read_trajectory(const std::filesystem::path& path,
                                  const Grid1D& gx, const Grid1D& gy);

void write_snapshot_2d(const std::filesystem::path& path, const Snapshot2D& snap);
Snapshot2D read_snapshot_2d(const std::filesystem::path& path,
                            const Grid1D& gx, const Grid1D& gy);

// header: t,norm_x,norm_y,energy,kin_x,pot_x,kin_y,pot_y,coupling,h11,h22,boundary_mass,df_residual
void write_diagnostics_csv(const std::filesystem::path& path,
                           std::span<const DiagnosticsRecord> records);

// header: n,sup_diff,ratio   (ratio of row n is sup_diff_n / sup_diff_{n-1})
void write_picard_csv(const std::filesystem::path& path, const PicardReport& report);

struct ErrorRow {
    double t = 0.0;
    double hartree_error = 0.0;
    double full_norm = 0.0;
    double full_energy = 0.0;
};
// header: t,hartree_error,full_norm,full_energy
void write_error_csv(const std::filesystem::path& path, std::span<const ErrorRow> rows);

// Two-column CSV with header "x,V"; the x column must match the grid nodes
// (same count, within 1e-9 * grid length). Returns the V samples.
std::vector<double> load_potential_csv(const std::filesystem::path& path, const Grid1D& g);

// "%.17g" rendering used by every CSV writer.
std::string format_g17(double v);

} // namespace hartree::io
