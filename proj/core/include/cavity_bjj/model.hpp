#pragma once

// Parameter set, state representations and conserved energy of the
// cavity-coupled two-mode junction. Energies are in units of the bare
// hopping J and times in units of hbar/J.

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace cavity_bjj {

inline constexpr double pi = 3.14159265358979323846;

/// The five dimensionless couplings plus the atom number.
struct DimensionlessParams {
    double d_c = 0.0;  ///< cavity detuning hbar*Delta_C / J
    double w0 = 0.0;   ///< AC-Stark shift W0*N_A / J
    double w12 = 0.0;  ///< cavity-assisted tunneling W12*N_A / J
    double u = 0.0;    ///< on-site interaction U*N_A / J
    double e = 0.0;    ///< pump amplitude hbar*eta / J
    int n_atoms = 1;   ///< N_A

    bool operator==(const DimensionlessParams&) const = default;
};

/// Throws DomainError on hard violations (n_atoms < 1, e < 0, non-finite
/// couplings). Returns human-readable warnings for parameters outside the
/// red-detuned regime (w0 <= 0, w12 <= 0, |w12| <= |w0|).
std::vector<std::string> validate(const DimensionlessParams& params);

/// Mean-field state X = (z, theta, xi, phi) in polar form.
struct MeanFieldState {
    double z = 0.0;
    double theta = 0.0;
    double xi = 0.0;
    double phi = 0.0;
};

/// Regular representation used for integration: Bloch vector
/// S = (sqrt(1-z^2) cos(theta), sqrt(1-z^2) sin(theta), z) and the complex
/// cavity amplitude alpha = xi * exp(i phi).
struct InternalState {
    std::array<double, 3> spin{0.0, 0.0, 1.0};
    std::complex<double> alpha{0.0, 0.0};

    using Vector = std::array<double, 5>;

    Vector to_vector() const {
        return {spin[0], spin[1], spin[2], alpha.real(), alpha.imag()};
    }
    static InternalState from_vector(const Vector& v) {
        return InternalState{{v[0], v[1], v[2]}, {v[3], v[4]}};
    }
};

/// Where polar coordinates are undefined and the documented convention was used.
struct PoleFlags {
    bool photon_phase_undefined = false;  ///< xi == 0, phi reported as 0
    bool atomic_phase_undefined = false;  ///< |z| == 1, theta reported as 0
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Throws DomainError for non-finite components, |z| > 1 or xi < 0.
void validate(const MeanFieldState& state);

InternalState to_internal(const MeanFieldState& state);
MeanFieldState from_internal(const InternalState& internal);
PoleFlags pole_flags(const InternalState& internal);

/// delta_C = d_c - w0 - w12 sqrt(1-z^2) cos(theta).
double effective_detuning(const DimensionlessParams& params, double z, double theta);
/// Same quantity expressed through the x-component of the Bloch vector.
double effective_detuning_bloch(const DimensionlessParams& params, double spin_x);

/// nu = 1 - (w12 / n_atoms) xi^2.
double effective_tunneling(const DimensionlessParams& params, double xi);
double effective_tunneling_from_photons(const DimensionlessParams& params, double photon_number);

/// Conserved mean-field energy E/J (on-site term eps*N_A dropped):
/// -d_c xi^2 + 2 e xi sin(phi) + N_A [u (1+z^2)/4 - sqrt(1-z^2) cos(theta)]
/// + xi^2 (w0 + w12 sqrt(1-z^2) cos(theta)).
double mean_field_energy(const DimensionlessParams& params, const MeanFieldState& state);
double mean_field_energy(const DimensionlessParams& params, const InternalState& state);

struct DerivedQuantities {
    double nu_eff = 0.0;
    double delta_c_eff = 0.0;
    double photon_number = 0.0;
    double energy = 0.0;
};

DerivedQuantities derived_quantities(const DimensionlessParams& params, const InternalState& state);

} // namespace cavity_bjj
