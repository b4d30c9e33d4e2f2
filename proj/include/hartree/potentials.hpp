#pragma once

// Confining potentials V1(x), V2(y) and the interaction w(x, y), sampled on
// the factor grids, plus the hypothesis checks the mean-field analysis rests
// on: a unit lower bound on the confining potentials, relative boundedness of
// the interaction (|w| <= c0*(V1 + V2 + C) with c0 < 1), a temperance bound
// on the potential gradients, and growth bounds on the interaction gradients.

#include "hartree/grid.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hartree {

enum class BumpShape {
    pure_bump,  // chi(x) = a * exp(1 - 1/(1 - (x/s)^2)) for |x| < s, else 0
    odd_bump,   // x * pure_bump(x)
};

struct BumpSpec {
    double amplitude = 0.2;       // a  (= chi(0) = sup|chi| for pure_bump)
    double support_radius = 2.0;  // s
    BumpShape shape = BumpShape::pure_bump;
};

double bump_value(const BumpSpec& b, double x);
double bump_derivative(const BumpSpec& b, double x);
double bump_second_derivative(const BumpSpec& b, double x);

// w(x, y) = fx(x) * gy(y); derivative samples ride along for the hypothesis
// checker.
struct SeparableCoupling {
    std::vector<double> fx, dfx, d2fx;  // on the x grid
    std::vector<double> gy, dgy, d2gy;  // on the y grid
};

// Fully tabulated w on the tensor grid, row-major [ix*ny + iy]. Derivatives
// for the checker come from finite differences.
struct TabulatedCoupling {
    std::vector<double> values;
};

// monostate = no interaction (w == 0).
using Coupling = std::variant<std::monostate, SeparableCoupling, TabulatedCoupling>;

class PotentialSet {
public:
    // Generic constructor from samples. dv1/dv2 are first-derivative samples
    // used by the temperance check; pass empty vectors to have them filled by
    // centered finite differences (one-sided at the interval ends).
    PotentialSet(Grid1D gx, Grid1D gy,
                 std::vector<double> v1, std::vector<double> v2,
                 Coupling coupling = std::monostate{},
                 std::vector<double> dv1 = {}, std::vector<double> dv2 = {});

    // Canonical example: double well V1(x) = x^2 (x/(2*ell) - 1)^2 / 2,
    // harmonic V2(y) = omega^2 y^2 / 2, interaction w(x, y) = chi(x) * y^2
    // with chi the configured bump. All derivative samples analytic.
    static PotentialSet double_well_bump(const Grid1D& gx, const Grid1D& gy,
                                         double ell, double omega, const BumpSpec& bump,
                                         bool zero_coupling = false);

    const Grid1D& grid_x() const { return gx_; }
    const Grid1D& grid_y() const { return gy_; }
    const std::vector<double>& v1() const { return v1_; }
    const std::vector<double>& v2() const { return v2_; }
    const std::vector<double>& dv1() const { return dv1_; }
    const std::vector<double>& dv2() const { return dv2_; }
    const Coupling& coupling() const { return coupling_; }
    bool coupling_is_zero() const {
        return std::holds_alternative<std::monostate>(coupling_);
    }

    double w(std::size_t ix, std::size_t iy) const;

    double min_v1() const;
    double min_v2() const;

    // <w>_y(x_i) = sum_j w(x_i, y_j) rho[j] dy for a density sampled on the y
    // grid; and the mirrored <w>_x. Outputs live on the opposite grid.
    std::vector<double> averaged_over_y(std::span<const double> density_y) const;
    std::vector<double> averaged_over_x(std::span<const double> density_x) const;
    void averaged_over_y(std::span<const double> density_y, std::span<double> out) const;
    void averaged_over_x(std::span<const double> density_x, std::span<double> out) const;

private:
    Grid1D gx_, gy_;
    std::vector<double> v1_, v2_, dv1_, dv2_;
    Coupling coupling_;
};

// Wavefunction-facing forms (validate grids, square the amplitudes).
std::vector<double> averaged_potential_over_y(const PotentialSet& p, const WaveFunction& phi_y);
std::vector<double> averaged_potential_over_x(const PotentialSet& p, const WaveFunction& phi_x);

// Shifted copy with min V1 >= floor and min V2 >= floor (no-op on a potential
// already above the floor), plus the constants that were added.
struct ShiftResult {
    PotentialSet potentials;
    double shift_v1 = 0.0;
    double shift_v2 = 0.0;
};
ShiftResult shift_to_unit_floor(const PotentialSet& p, double floor = 1.0);

struct BoundCheck {
    bool ok = false;
    double constant = 0.0;  // smallest constant making the bound hold on the grid
};

struct AssumptionReport {
    // unit floor: V1, V2 >= 1 everywhere on the grid
    double min_v1 = 0.0, min_v2 = 0.0;
    bool floor_ok = false;

    // relative bound: |w| <= c0 * (V1 + V2 + C), minimized over the C sweep
    double c0 = 0.0;
    double c0_offset = 0.0;  // the C achieving c0
    bool coupling_ok = false;  // c0 < 1

    // temperance: |V'| <= C * (1 + V), smallest C per potential
    double temperance_v1 = 0.0, temperance_v2 = 0.0;

    // growth bounds on the interaction:
    //  [0] |w|                      <= c * (V1 + V2 + c0_offset)  (ok iff c < 1)
    //  [1] |d_x w|                  <= c * (sqrt(V1) + V2 + 1)
    //  [2] |d_y w|                  <= c * (V1 + sqrt(V2) + 1)
    //  [3] |d_xx w| + |d_yy w|      <= c * (V1 + V2 + 1)
    std::array<BoundCheck, 4> growth{};

    bool all_ok = false;
    std::string domain;  // human-readable box the scan covered
};

inline constexpr std::array<double, 6> kDefaultOffsetSweep = {0.0, 1.0, 2.0, 5.0, 10.0, 50.0};

// Scans the tensor grid. Meant to run on floored potentials (floor_ok reports
// whether that holds); sqrt terms clamp negative samples to zero.
AssumptionReport check_assumptions(const PotentialSet& p,
                                   std::span<const double> offset_sweep = kDefaultOffsetSweep);

} // namespace hartree
