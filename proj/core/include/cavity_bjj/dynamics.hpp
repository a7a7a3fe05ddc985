#pragma once

// Mean-field equations of motion of the cavity-coupled junction,
//
//   dz/dtau     = -2 nu sqrt(1-z^2) sin(theta)
//   dtheta/dtau = (u + 2 nu cos(theta) / sqrt(1-z^2)) z
//   dxi/dtau    = e cos(phi)
//   dphi/dtau   = delta_C - (e/xi) sin(phi)
//
// evaluated and integrated in the regular Bloch + complex-amplitude form
//
//   dS/dtau     = (-u z S_y, 2 nu z + u z S_x, -2 nu S_y)
//   dalpha/dtau = i delta_C alpha + e.

#include "cavity_bjj/model.hpp"
#include "cavity_bjj/ode.hpp"

#include <complex>
#include <string>
#include <vector>

namespace cavity_bjj {

using StateVector = InternalState::Vector;

/// Time derivative in the internal representation.
StateVector rhs(const DimensionlessParams& params, const StateVector& y);
InternalState rhs(const DimensionlessParams& params, const InternalState& state);

/// Time derivative of (z, theta, xi, phi) from the polar equations. Singular
/// at xi == 0 and |z| == 1; throws SingularityError there.
MeanFieldState rhs_polar(const DimensionlessParams& params, const MeanFieldState& state);

/// Maps an internal-coordinate derivative onto the polar coordinates at `state`.
MeanFieldState polar_derivative(const InternalState& state, const InternalState& derivative);

/// Rotation of the Bloch vector under a two-mode junction with effective
/// tunneling `nu` and interaction `u`; shared by the full, reduced and bare models.
std::array<double, 3> junction_bloch_rhs(const std::array<double, 3>& spin, double u, double nu);

struct IntegrationOptions {
    ode::Tolerances tolerances{};
    double stride = 0.1;   ///< output sampling interval; 0 keeps every accepted step
    double max_step = std::numeric_limits<double>::infinity();
    double fixed_step = 0.0;
};

struct TrajectorySample {
    double tau = 0.0;
    InternalState internal;
    MeanFieldState state;
    DerivedQuantities derived;
};

class Trajectory {
public:
    Trajectory(DimensionlessParams params, MeanFieldState initial, IntegrationOptions options,
               std::vector<TrajectorySample> samples, ode::Statistics stats);

    const DimensionlessParams& params() const noexcept { return params_; }
    const MeanFieldState& initial() const noexcept { return initial_; }
    const IntegrationOptions& options() const noexcept { return options_; }
    const ode::Statistics& statistics() const noexcept { return stats_; }
    const std::vector<TrajectorySample>& samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    const TrajectorySample& operator[](std::size_t i) const { return samples_[i]; }
    const TrajectorySample& back() const { return samples_.back(); }

    /// max |E(tau) - E(0)| / |E(0)| over the samples (absolute when E(0) == 0).
    double energy_drift() const;

private:
    DimensionlessParams params_;
    MeanFieldState initial_;
    IntegrationOptions options_;
    std::vector<TrajectorySample> samples_;
    ode::Statistics stats_;
};

/// Integrates the full mean-field equations from `initial` over [0, horizon].
Trajectory integrate(const DimensionlessParams& params, const MeanFieldState& initial, double horizon,
                     const IntegrationOptions& options = {});

/// Same, starting from an internal state at time t0 and running to t1 (either direction).
Trajectory integrate_internal(const DimensionlessParams& params, const InternalState& initial, double t0,
                              double t1, const IntegrationOptions& options = {});

enum class StabilityClass { center_like, saddle_like, marginal };

std::string to_string(StabilityClass c);

struct StabilityReport {
    std::vector<std::complex<double>> eigenvalues;  ///< sorted by real part, then imaginary part
    StabilityClass classification = StabilityClass::marginal;
    bool pairs_balanced = false;  ///< every eigenvalue has a partner with |lambda + mu| < 1e-6
};

/// Linearises the flow at a stationary state. The 5x5 central-difference
/// Jacobian (step 1e-6) is projected onto the tangent space of the Bloch
/// sphere, giving four eigenvalues. Throws DomainError when ||rhs|| >= 1e-8.
StabilityReport classify_stability(const DimensionlessParams& params, const MeanFieldState& candidate);

struct TrajectorySummary {
    double z_min = 0.0;
    double z_max = 0.0;
    std::size_t zero_crossings = 0;
    double xi_max = 0.0;
    double energy_drift = 0.0;
};

TrajectorySummary trajectory_summary(const Trajectory& trajectory);

/// Number of sign changes in a sequence, ignoring exact zeros.
std::size_t count_sign_changes(const std::vector<double>& values);

} // namespace cavity_bjj
