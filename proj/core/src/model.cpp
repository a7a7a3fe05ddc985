#include "cavity_bjj/model.hpp"

#include "cavity_bjj/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cavity_bjj {

namespace {

double bloch_radius(double z) {
    return std::sqrt(std::max(0.0, 1.0 - z * z));
}

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw DomainError(std::string("non-finite ") + name);
    }
}

} // namespace

std::vector<std::string> validate(const DimensionlessParams& params) {
    require_finite(params.d_c, "d_c");
    require_finite(params.w0, "w0");
    require_finite(params.w12, "w12");
    require_finite(params.u, "u");
    require_finite(params.e, "e");
    if (params.n_atoms < 1) throw DomainError("n_atoms must be >= 1");
    if (params.e < 0.0) throw DomainError("pump amplitude e must be >= 0");

    std::vector<std::string> warnings;
    if (params.w0 > 0.0) warnings.emplace_back("w0 > 0: outside the red-detuned regime");
    if (params.w12 > 0.0) warnings.emplace_back("w12 > 0: outside the red-detuned regime");
    if (std::abs(params.w12) > std::abs(params.w0)) {
        warnings.emplace_back("|w12| > |w0|: assisted tunneling exceeds the Stark shift");
    }
    return warnings;
}

double wrap_angle(double angle) {
    double wrapped = std::remainder(angle, 2.0 * pi);
    if (wrapped <= -pi) wrapped += 2.0 * pi;
    return wrapped;
}

void validate(const MeanFieldState& state) {
    require_finite(state.z, "z");
    require_finite(state.theta, "theta");
    require_finite(state.xi, "xi");
    require_finite(state.phi, "phi");
    if (std::abs(state.z) > 1.0) throw DomainError("|z| > 1");
    if (state.xi < 0.0) throw DomainError("xi < 0");
}

InternalState to_internal(const MeanFieldState& state) {
    validate(state);
    const double s = bloch_radius(state.z);
    return InternalState{{s * std::cos(state.theta), s * std::sin(state.theta), state.z},
                         std::polar(state.xi, state.phi)};
}

MeanFieldState from_internal(const InternalState& internal) {
    for (double c : internal.to_vector()) require_finite(c, "internal component");
    const auto& [sx, sy, sz] = internal.spin;
    const double norm = std::sqrt(sx * sx + sy * sy + sz * sz);
    if (norm == 0.0) throw DomainError("zero Bloch vector");

    MeanFieldState out;
    out.z = std::clamp(sz / norm, -1.0, 1.0);
    out.theta = (sx == 0.0 && sy == 0.0) ? 0.0 : wrap_angle(std::atan2(sy, sx));
    out.xi = std::abs(internal.alpha);
    out.phi = out.xi == 0.0 ? 0.0 : wrap_angle(std::arg(internal.alpha));
    return out;
}

PoleFlags pole_flags(const InternalState& internal) {
    PoleFlags flags;
    flags.photon_phase_undefined = internal.alpha == std::complex<double>{};
    flags.atomic_phase_undefined = internal.spin[0] == 0.0 && internal.spin[1] == 0.0;
    return flags;
}

double effective_detuning(const DimensionlessParams& params, double z, double theta) {
    if (!(std::abs(z) <= 1.0)) throw DomainError("effective_detuning: |z| > 1");
    return params.d_c - params.w0 - params.w12 * bloch_radius(z) * std::cos(theta);
}

double effective_detuning_bloch(const DimensionlessParams& params, double spin_x) {
    return params.d_c - params.w0 - params.w12 * spin_x;
}

double effective_tunneling(const DimensionlessParams& params, double xi) {
    if (!(xi >= 0.0)) throw DomainError("effective_tunneling: xi < 0");
    return effective_tunneling_from_photons(params, xi * xi);
}

double effective_tunneling_from_photons(const DimensionlessParams& params, double photon_number) {
    return 1.0 - params.w12 / params.n_atoms * photon_number;
}

double mean_field_energy(const DimensionlessParams& params, const MeanFieldState& state) {
    validate(state);
    const double hop = bloch_radius(state.z) * std::cos(state.theta);
    const double photons = state.xi * state.xi;
    return -params.d_c * photons + 2.0 * params.e * state.xi * std::sin(state.phi) +
           params.n_atoms * (params.u * (1.0 + state.z * state.z) / 4.0 - hop) +
           photons * (params.w0 + params.w12 * hop);
}

double mean_field_energy(const DimensionlessParams& params, const InternalState& state) {
    const double sx = state.spin[0];
    const double sz = state.spin[2];
    const double photons = std::norm(state.alpha);
    return -params.d_c * photons + 2.0 * params.e * state.alpha.imag() +
           params.n_atoms * (params.u * (1.0 + sz * sz) / 4.0 - sx) +
           photons * (params.w0 + params.w12 * sx);
}

DerivedQuantities derived_quantities(const DimensionlessParams& params, const InternalState& state) {
    DerivedQuantities d;
    const double xi = std::abs(state.alpha);
    d.photon_number = xi * xi;
    d.nu_eff = effective_tunneling_from_photons(params, d.photon_number);
    d.delta_c_eff = effective_detuning_bloch(params, state.spin[0]);
    d.energy = mean_field_energy(params, state);
    return d;
}

} // namespace cavity_bjj
