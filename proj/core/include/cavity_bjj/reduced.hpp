#pragma once

// Junction dynamics with the cavity field slaved to its instantaneous steady
// state: xi^2 = e^2 / delta_C^2 and nu = 1 - (w12/N_A) e^2 / delta_C^2. The
// reduced flow conserves
//
//   E_red(z, theta) = N_A [u (1+z^2)/4 - sqrt(1-z^2) cos(theta)] + e^2 / delta_C,
//
// which diverges on the delta_C = 0 curve, so that curve cannot be crossed.

#include "cavity_bjj/dynamics.hpp"
#include "cavity_bjj/model.hpp"
#include "cavity_bjj/ode.hpp"

#include <array>
#include <string>
#include <vector>

namespace cavity_bjj {

struct ReducedOptions {
    ode::Tolerances tolerances{};
    double stride = 0.05;
    double singularity_floor = 1e-6;  ///< |delta_C| below this aborts evaluation
};

struct ReducedDerivative {
    double dz = 0.0;
    double dtheta = 0.0;
};

/// Adiabatic photon number e^2 / delta_C^2 (throws SingularityError below the floor).
double adiabatic_photon_number(const DimensionlessParams& params, double z, double theta,
                               double floor = 1e-6);

/// Reduced equations in polar form; singular at |z| = 1 and on the separatrix.
ReducedDerivative reduced_rhs(const DimensionlessParams& params, double z, double theta, double floor = 1e-6);

/// Reduced equations on the Bloch sphere (regular at the poles).
std::array<double, 3> reduced_bloch_rhs(const DimensionlessParams& params, const std::array<double, 3>& spin,
                                        double floor = 1e-6);

/// First integral of the reduced flow.
double reduced_energy(const DimensionlessParams& params, double z, double theta);

/// Full mean-field state with the cavity at its adiabatic value:
/// xi = e/|delta_C|, phi = +pi/2 for delta_C > 0 and -pi/2 otherwise.
MeanFieldState adiabatic_initial_state(const DimensionlessParams& params, double z, double theta);

struct ReducedSample {
    double tau = 0.0;
    double z = 0.0;
    double theta = 0.0;
    std::array<double, 3> spin{};
    double delta_c_eff = 0.0;
    double photon_number = 0.0;
    double energy = 0.0;
};

struct ReducedTrajectory {
    std::vector<ReducedSample> samples;
    bool truncated = false;
    std::string diagnostic;
    ode::Statistics statistics;

    double min_abs_detuning() const;
    double energy_drift() const;
};

/// Integrates the reduced model. If the trajectory approaches |delta_C| below
/// the floor the returned trajectory is truncated and carries a diagnostic.
ReducedTrajectory integrate_reduced(const DimensionlessParams& params, double z0, double theta0, double horizon,
                                    const ReducedOptions& options = {});

/// Bare junction (no cavity): dS/dtau with nu = 1 and interaction u.
ReducedTrajectory pure_bjj(double u, double z0, double theta0, double horizon, const ReducedOptions& options = {});

/// Pendulum energy H = lambda z^2/2 - sqrt(1-z^2) cos(theta) with lambda = u/2.
double bjj_energy(double lambda, double z, double theta);

/// Macroscopic self-trapping criterion H(z0, theta0) > 1.
bool self_trapped(double z0, double theta0, double lambda);

struct FullVsReducedMetrics {
    double max_dz = 0.0;
    double max_dtheta = 0.0;
    double min_abs_detuning = 0.0;  ///< along the full trajectory
    double max_nu = 0.0;            ///< along the full trajectory
    std::size_t compared_samples = 0;
    bool reduced_truncated = false;
    bool adiabatic_valid = true;    ///< min |delta_C| >= 10 max(nu) and no truncation
    std::string diagnostic;
};

/// Runs the full and reduced models from the same adiabatic start and
/// compares them on their common sample grid. `initial` must be an adiabatic
/// start (see adiabatic_initial_state); otherwise DomainError.
FullVsReducedMetrics compare_full_vs_reduced(const DimensionlessParams& params, const MeanFieldState& initial,
                                             double horizon, const ReducedOptions& options = {});

} // namespace cavity_bjj
