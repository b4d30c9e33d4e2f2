#include "hartree/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hartree::io {

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
    put_u64(os, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t get_u64(std::istream& is, const char* what) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error(std::string("truncated file while reading ") + what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is, const char* what) {
    return std::bit_cast<double>(get_u64(is, what));
}

void put_complex_array(std::ostream& os, const std::vector<std::complex<double>>& a) {
    for (const auto& z : a) {
        put_f64(os, z.real());
        put_f64(os, z.imag());
    }
}

void get_complex_array(std::istream& is, std::vector<std::complex<double>>& a, const char* what) {
    for (auto& z : a) {
        const double re = get_f64(is, what);
        const double im = get_f64(is, what);
        z = {re, im};
    }
}

std::ofstream open_out_binary(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    return os;
}

std::ifstream open_in_binary(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return is;
}

void expect_magic(std::istream& is, const char* magic, const std::filesystem::path& path) {
    const std::size_t len = std::char_traits<char>::length(magic);
    std::string got(len, '\0');
    is.read(got.data(), static_cast<std::streamsize>(len));
    if (!is || got != magic)
        throw std::runtime_error(path.string() + ": bad magic, expected \"" + magic + "\"");
}

std::ofstream open_out_text(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

} // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectory(const std::filesystem::path& path, const HartreeTrajectory& traj) {
    if (traj.states.empty()) throw std::invalid_argument("write_trajectory: empty trajectory");
    const std::size_t nx = traj.states.front().phi_x.values.size();
    const std::size_t ny = traj.states.front().phi_y.values.size();
    auto os = open_out_binary(path);
    os.write("HTRJ1", 5);
    put_u64(os, nx);
    put_u64(os, ny);
    put_u64(os, traj.states.size());
    put_f64(os, traj.dt);
    for (const auto& s : traj.states) {
        put_f64(os, s.t);
        put_complex_array(os, s.phi_x.values);
        put_complex_array(os, s.phi_y.values);
    }
    finish(os, path);
}

HartreeTrajectory read_trajectory(const std::filesystem::path& path,
                                  const Grid1D& gx, const Grid1D& gy) {
    auto is = open_in_binary(path);
    expect_magic(is, "HTRJ1", path);
    const auto nx = get_u64(is, "n_x");
    const auto ny = get_u64(is, "n_y");
    const auto count = get_u64(is, "n_snapshots");
    if (nx != gx.n() || ny != gy.n())
        throw std::runtime_error(path.string() + ": stored sizes " + std::to_string(nx) + "x" +
                                 std::to_string(ny) + " do not match the supplied grids");
    HartreeTrajectory traj;
    traj.dt = get_f64(is, "dt");
    traj.states.reserve(count);
    for (std::uint64_t m = 0; m < count; ++m) {
        HartreeState s{0.0, WaveFunction(gx), WaveFunction(gy)};
        s.t = get_f64(is, "t");
        get_complex_array(is, s.phi_x.values, "phi_x");
        get_complex_array(is, s.phi_y.values, "phi_y");
        traj.states.push_back(std::move(s));
    }
    return traj;
}

void write_snapshot_2d(const std::filesystem::path& path, const Snapshot2D& snap) {
    auto os = open_out_binary(path);
    os.write("HTR2", 4);
    put_u64(os, snap.psi.gx.n());
    put_u64(os, snap.psi.gy.n());
    put_f64(os, snap.t);
    put_complex_array(os, snap.psi.values);
    finish(os, path);
}

Snapshot2D read_snapshot_2d(const std::filesystem::path& path,
                            const Grid1D& gx, const Grid1D& gy) {
    auto is = open_in_binary(path);
    expect_magic(is, "HTR2", path);
    const auto nx = get_u64(is, "n_x");
    const auto ny = get_u64(is, "n_y");
    if (nx != gx.n() || ny != gy.n())
        throw std::runtime_error(path.string() + ": stored sizes " + std::to_string(nx) + "x" +
                                 std::to_string(ny) + " do not match the supplied grids");
    Snapshot2D snap{get_f64(is, "t"), Field2D(gx, gy)};
    get_complex_array(is, snap.psi.values, "psi");
    return snap;
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           std::span<const DiagnosticsRecord> records) {
    auto os = open_out_text(path);
    os << "t,norm_x,norm_y,energy,kin_x,pot_x,kin_y,pot_y,coupling,h11,h22,boundary_mass,df_residual\n";
    for (const auto& r : records) {
        os << format_g17(r.t) << ',' << format_g17(r.norm_x) << ',' << format_g17(r.norm_y)
           << ',' << format_g17(r.energy) << ',' << format_g17(r.kin_x) << ','
           << format_g17(r.pot_x) << ',' << format_g17(r.kin_y) << ',' << format_g17(r.pot_y)
           << ',' << format_g17(r.coupling) << ',' << format_g17(r.h11) << ','
           << format_g17(r.h22) << ',' << format_g17(r.boundary_mass) << ','
           << (r.df_residual ? format_g17(*r.df_residual) : "nan") << '\n';
    }
    finish(os, path);
}

void write_picard_csv(const std::filesystem::path& path, const PicardReport& report) {
    auto os = open_out_text(path);
    os << "n,sup_diff,ratio\n";
    for (std::size_t n = 0; n < report.sup_diffs.size(); ++n) {
        const double d = report.sup_diffs[n];
        double ratio = std::numeric_limits<double>::quiet_NaN();
        if (n > 0 && report.sup_diffs[n - 1] > 0.0) ratio = d / report.sup_diffs[n - 1];
        os << n << ',' << format_g17(d) << ',' << format_g17(ratio) << '\n';
    }
    finish(os, path);
}

void write_error_csv(const std::filesystem::path& path, std::span<const ErrorRow> rows) {
    auto os = open_out_text(path);
    os << "t,hartree_error,full_norm,full_energy\n";
    for (const auto& r : rows) {
        os << format_g17(r.t) << ',' << format_g17(r.hartree_error) << ','
           << format_g17(r.full_norm) << ',' << format_g17(r.full_energy) << '\n';
    }
    finish(os, path);
}

std::vector<double> load_potential_csv(const std::filesystem::path& path, const Grid1D& g) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,V")
        throw std::runtime_error(path.string() + ": expected header \"x,V\", got \"" + line + "\"");

    std::vector<double> values;
    values.reserve(g.n());
    const double x_tol = 1e-9 * g.length();
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        double x = 0.0, v = 0.0;
        char comma = '\0';
        if (!(ss >> x >> comma >> v) || comma != ',')
            throw std::runtime_error(path.string() + ": malformed row " + std::to_string(row + 2) +
                                     ": \"" + line + "\"");
        if (row >= g.n())
            throw std::runtime_error(path.string() + ": more rows than grid points (" +
                                     std::to_string(g.n()) + ")");
        if (std::abs(x - g.points()[row]) > x_tol)
            throw std::runtime_error(path.string() + ": row " + std::to_string(row + 2) +
                                     " has x = " + format_g17(x) + " but the grid node is " +
                                     format_g17(g.points()[row]) +
                                     "; tabulated potentials must be sampled on the run grid");
        if (!std::isfinite(v))
            throw std::runtime_error(path.string() + ": non-finite value in row " +
                                     std::to_string(row + 2));
        values.push_back(v);
        ++row;
    }
    if (values.size() != g.n())
        throw std::runtime_error(path.string() + ": got " + std::to_string(values.size()) +
                                 " rows, grid has " + std::to_string(g.n()) + " points");
    return values;
}

} // namespace hartree::io
