#pragma once

// Two-mode model constants from a one-dimensional double well.
//
// Units: hbar = m = 1 throughout this module; lengths in the units of the
// well specification and energies in the matching unit hbar^2/(m L^2). The
// transverse confinement enters through l_H, with hbar*omega_H = 1/l_H^2.

#include "cavity_bjj/model.hpp"

#include <vector>

namespace cavity_bjj {

enum class WellForm { quartic, harmonic_gaussian };

struct DoubleWellSpec {
    WellForm form = WellForm::quartic;
    // quartic: V0 ((x/a)^2 - 1)^2
    double v0 = 3.75;
    double a = 1.0;
    // harmonic_gaussian: omega^2 x^2 / 2 + barrier_height exp(-x^2 / (2 barrier_width^2))
    double omega = 1.0;
    double barrier_height = 0.0;
    double barrier_width = 0.5;
    // grid on [-half_width, half_width]
    double half_width = 4.0;
    int points = 8001;

    double potential(double x) const;
};

/// Uniform grid symmetric about the origin: x_i = (i - (n-1)/2) h.
std::vector<double> make_grid(const DoubleWellSpec& spec);

/// Trapezoidal rule on a uniform grid.
double trapezoid(const std::vector<double>& f, double h);

struct EigenPairs {
    std::vector<double> x;
    double h = 0.0;
    std::vector<double> potential;
    std::vector<double> energies;
    std::vector<std::vector<double>> states;  ///< normalised, even states positive-sum, odd states positive on x > 0
};

/// Lowest `count` eigenpairs of -1/2 d^2/dx^2 + V on the grid (second-order
/// central differences, Dirichlet walls). Throws ResolutionError when parity
/// or orthonormality checks fail.
EigenPairs solve_double_well(const DoubleWellSpec& spec, int count = 5);

/// Applies the discrete single-particle Hamiltonian.
std::vector<double> apply_hamiltonian(const std::vector<double>& potential, double h, const std::vector<double>& f);

struct WannierBasis {
    DoubleWellSpec spec;
    std::vector<double> x;
    double h = 0.0;
    std::vector<double> potential;
    std::vector<double> w1;  ///< left-localised
    std::vector<double> w2;  ///< right-localised, w2(x) = w1(-x)
    double e0 = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double delta_dw = 0.0;   ///< e2 - (e0 + e1)/2
};

WannierBasis build_wannier(const EigenPairs& pairs, const DoubleWellSpec& spec);

struct OnSiteParams {
    double eps = 0.0;        ///< includes the transverse zero-point energy 1/l_H^2
    double j = 0.0;          ///< hopping from the overlap integral
    double j_doublet = 0.0;  ///< (E1 - E0)/2
    double u = 0.0;
};

OnSiteParams hubbard_from_basis(const WannierBasis& basis, double g_gg, double l_h);

struct CavityGeometry {
    double sigma = 0.2;            ///< mode waist
    double k = 0.0;                ///< wave number
    double mirror_distance = 1.0;  ///< L
    double l_h = 0.2;              ///< transverse oscillator length
    double u0 = -1.0;              ///< Omega_R^2 / Delta_A
    double eta = 0.0;              ///< pump amplitude
    double delta_c = 0.0;          ///< cavity detuning
};

/// Shared prefactor (1 + exp(-k^2 l_H^2)) / (L pi sigma sqrt(l_H^2 + sigma^2)).
double mode_prefactor(const CavityGeometry& geom);

struct CavityCouplings {
    double w0 = 0.0;
    double w12 = 0.0;
    double overlap_0 = 0.0;   ///< int |w1|^2 exp(-x^2/sigma^2)
    double overlap_12 = 0.0;  ///< int w1 w2 exp(-x^2/sigma^2)
};

CavityCouplings cavity_couplings(const WannierBasis& basis, const CavityGeometry& geom);

/// Distance between the inner classical turning points at the doublet mean energy.
double barrier_width(const WannierBasis& basis);

struct RatioPoint {
    double sigma = 0.0;
    double sigma_over_width = 0.0;
    double ratio = 0.0;  ///< W12 / W0
};

std::vector<RatioPoint> ratio_scan(const WannierBasis& basis, const CavityGeometry& geom,
                                   const std::vector<double>& sigma_values);

struct ValidityReport {
    double margin = 0.0;  ///< delta_DW / (|U0| xi^2 <f^2>)
    bool pass = true;     ///< margin >= 10
    double mean_f2 = 0.0;
};

ValidityReport two_mode_validity(const WannierBasis& basis, const CavityGeometry& geom, double xi_sq_max);

struct HubbardParams {
    double eps = 0.0;
    double j = 0.0;
    double u = 0.0;
    double w0 = 0.0;
    double w12 = 0.0;
    double g_gg = 0.0;
};

DimensionlessParams to_dimensionless(const HubbardParams& hubbard, const CavityGeometry& geom, int n_atoms);

/// Inverse of to_dimensionless for a given hopping J.
struct PhysicalCouplings {
    double delta_c = 0.0;
    double eta = 0.0;
    double w0 = 0.0;
    double w12 = 0.0;
    double u = 0.0;
};

PhysicalCouplings from_dimensionless(const DimensionlessParams& params, double j);

struct ParameterReport {
    DoubleWellSpec well;
    CavityGeometry cavity;
    std::vector<double> energies;
    WannierBasis basis;
    HubbardParams hubbard;
    double j_doublet = 0.0;
    double barrier_width = 0.0;
    DimensionlessParams dimensionless;
    ValidityReport validity;
    double xi_sq_max = 0.0;
    std::vector<RatioPoint> ratio_curve;
    std::vector<std::string> warnings;
};

/// Runs the whole pipeline: eigen-solve, Wannier orbitals, Hubbard and
/// cavity constants, dimensionless set, validity margin and a ratio curve
/// over `ratio_points` log-spaced sigma/width values in [1e-2, 1e2].
ParameterReport derive_parameters(const DoubleWellSpec& well, const CavityGeometry& cavity, double g_gg,
                                  int n_atoms, double xi_sq_max, int ratio_points = 50);

} // namespace cavity_bjj
