#include "cavity_bjj/reduced.hpp"

#include "cavity_bjj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cavity_bjj {

namespace {

double checked_detuning(const DimensionlessParams& params, double spin_x, double z, double theta, double floor) {
    const double delta = effective_detuning_bloch(params, spin_x);
    if (!(std::abs(delta) >= floor)) {
        std::ostringstream msg;
        msg << "reduced model singular: |delta_C| = " << std::abs(delta) << " below floor " << floor
            << " at z=" << z << ", theta=" << theta;
        throw SingularityError(msg.str(), z, theta);
    }
    return delta;
}

double bloch_theta(const std::array<double, 3>& s) {
    return (s[0] == 0.0 && s[1] == 0.0) ? 0.0 : wrap_angle(std::atan2(s[1], s[0]));
}

double bloch_z(const std::array<double, 3>& s) {
    const double norm = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    return std::clamp(s[2] / norm, -1.0, 1.0);
}

std::array<double, 3> to_bloch(double z, double theta) {
    if (!(std::abs(z) <= 1.0) || !std::isfinite(theta)) throw DomainError("invalid (z, theta)");
    const double s = std::sqrt(1.0 - z * z);
    return {s * std::cos(theta), s * std::sin(theta), z};
}

template <class Field, class SampleFill>
ReducedTrajectory run_planar(Field&& field, SampleFill&& fill, double z0, double theta0, double horizon,
                             const ReducedOptions& options) {
    if (!(horizon > 0.0)) throw DomainError("integration horizon must be > 0");
    ReducedTrajectory out;
    auto observer = [&](double t, const ode::Vector<3>& y) {
        ReducedSample s;
        s.tau = t;
        s.spin = {y[0], y[1], y[2]};
        s.z = bloch_z(s.spin);
        s.theta = bloch_theta(s.spin);
        fill(s);
        out.samples.push_back(s);
    };
    const auto s0 = to_bloch(z0, theta0);
    ode::Options ode_options;
    ode_options.tolerances = options.tolerances;
    try {
        out.statistics = ode::integrate<3>(field, ode::Vector<3>{s0[0], s0[1], s0[2]}, 0.0, horizon,
                                           options.stride, observer, ode_options);
    } catch (const SingularityError& err) {
        out.truncated = true;
        out.diagnostic = err.what();
    } catch (const IntegrationError& err) {
        out.truncated = true;
        out.diagnostic = err.what();
    }
    return out;
}

} // namespace

double adiabatic_photon_number(const DimensionlessParams& params, double z, double theta, double floor) {
    const auto s = to_bloch(z, theta);
    const double delta = checked_detuning(params, s[0], z, theta, floor);
    return params.e * params.e / (delta * delta);
}

std::array<double, 3> reduced_bloch_rhs(const DimensionlessParams& params, const std::array<double, 3>& spin,
                                        double floor) {
    const double delta = checked_detuning(params, spin[0], spin[2], bloch_theta(spin), floor);
    const double nu = effective_tunneling_from_photons(params, params.e * params.e / (delta * delta));
    return junction_bloch_rhs(spin, params.u, nu);
}

ReducedDerivative reduced_rhs(const DimensionlessParams& params, double z, double theta, double floor) {
    const auto spin = to_bloch(z, theta);
    const double s = std::sqrt(1.0 - z * z);
    if (s == 0.0) throw SingularityError("reduced polar equations singular at |z| = 1", z, theta);
    const double delta = checked_detuning(params, spin[0], z, theta, floor);
    const double nu = effective_tunneling_from_photons(params, params.e * params.e / (delta * delta));
    return {-2.0 * nu * s * std::sin(theta), (params.u + 2.0 * nu * std::cos(theta) / s) * z};
}

double reduced_energy(const DimensionlessParams& params, double z, double theta) {
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double delta = effective_detuning(params, z, theta);
    return params.n_atoms * (params.u * (1.0 + z * z) / 4.0 - s * std::cos(theta)) + params.e * params.e / delta;
}

MeanFieldState adiabatic_initial_state(const DimensionlessParams& params, double z, double theta) {
    const double delta = effective_detuning(params, z, theta);
    if (delta == 0.0) throw SingularityError("adiabatic start on the delta_C = 0 curve", z, theta);
    const double phi = params.e == 0.0 ? 0.0 : (delta > 0.0 ? pi / 2.0 : -pi / 2.0);
    return {z, theta, params.e / std::abs(delta), phi};
}

double ReducedTrajectory::min_abs_detuning() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) best = std::min(best, std::abs(s.delta_c_eff));
    return best;
}

double ReducedTrajectory::energy_drift() const {
    if (samples.empty()) return 0.0;
    const double e0 = samples.front().energy;
    double drift = 0.0;
    for (const auto& s : samples) drift = std::max(drift, std::abs(s.energy - e0));
    return e0 == 0.0 ? drift : drift / std::abs(e0);
}

ReducedTrajectory integrate_reduced(const DimensionlessParams& params, double z0, double theta0, double horizon,
                                    const ReducedOptions& options) {
    validate(params);
    // Reject a start on (or within the floor of) the separatrix up front.
    adiabatic_photon_number(params, z0, theta0, options.singularity_floor);

    auto field = [&](double, const ode::Vector<3>& y) {
        const auto d = reduced_bloch_rhs(params, {y[0], y[1], y[2]}, options.singularity_floor);
        return ode::Vector<3>{d[0], d[1], d[2]};
    };
    auto fill = [&](ReducedSample& s) {
        s.delta_c_eff = effective_detuning_bloch(params, s.spin[0]);
        s.photon_number = params.e * params.e / (s.delta_c_eff * s.delta_c_eff);
        s.energy = params.n_atoms * (params.u * (1.0 + s.spin[2] * s.spin[2]) / 4.0 - s.spin[0]) +
                   params.e * params.e / s.delta_c_eff;
    };
    return run_planar(field, fill, z0, theta0, horizon, options);
}

ReducedTrajectory pure_bjj(double u, double z0, double theta0, double horizon, const ReducedOptions& options) {
    auto field = [u](double, const ode::Vector<3>& y) {
        const auto d = junction_bloch_rhs({y[0], y[1], y[2]}, u, 1.0);
        return ode::Vector<3>{d[0], d[1], d[2]};
    };
    auto fill = [u](ReducedSample& s) {
        s.delta_c_eff = std::numeric_limits<double>::infinity();
        s.photon_number = 0.0;
        s.energy = u / 2.0 * s.spin[2] * s.spin[2] / 2.0 - s.spin[0];
    };
    return run_planar(field, fill, z0, theta0, horizon, options);
}

double bjj_energy(double lambda, double z, double theta) {
    if (!(std::abs(z) <= 1.0)) throw DomainError("bjj_energy: |z| > 1");
    return lambda * z * z / 2.0 - std::sqrt(1.0 - z * z) * std::cos(theta);
}

bool self_trapped(double z0, double theta0, double lambda) {
    return bjj_energy(lambda, z0, theta0) > 1.0;
}

FullVsReducedMetrics compare_full_vs_reduced(const DimensionlessParams& params, const MeanFieldState& initial,
                                             double horizon, const ReducedOptions& options) {
    const auto expected = adiabatic_initial_state(params, initial.z, initial.theta);
    const double xi_tol = 1e-9 * std::max(1.0, expected.xi);
    if (std::abs(initial.xi - expected.xi) > xi_tol ||
        (expected.xi > 0.0 && std::abs(wrap_angle(initial.phi - expected.phi)) > 1e-9)) {
        throw DomainError("compare_full_vs_reduced: initial state is not an adiabatic start");
    }

    IntegrationOptions full_options;
    full_options.tolerances = options.tolerances;
    full_options.stride = options.stride;
    const auto full = integrate(params, initial, horizon, full_options);
    const auto reduced = integrate_reduced(params, initial.z, initial.theta, horizon, options);

    FullVsReducedMetrics m;
    m.reduced_truncated = reduced.truncated;
    m.diagnostic = reduced.diagnostic;
    m.min_abs_detuning = std::numeric_limits<double>::infinity();
    for (const auto& s : full.samples()) {
        m.min_abs_detuning = std::min(m.min_abs_detuning, std::abs(s.derived.delta_c_eff));
        m.max_nu = std::max(m.max_nu, std::abs(s.derived.nu_eff));
    }
    const std::size_t n = std::min(full.size(), reduced.samples.size());
    m.compared_samples = n;
    for (std::size_t i = 0; i < n; ++i) {
        m.max_dz = std::max(m.max_dz, std::abs(full[i].state.z - reduced.samples[i].z));
        m.max_dtheta =
            std::max(m.max_dtheta, std::abs(wrap_angle(full[i].state.theta - reduced.samples[i].theta)));
    }
    m.adiabatic_valid = !reduced.truncated && m.min_abs_detuning >= 10.0 * m.max_nu;
    if (!m.adiabatic_valid && m.diagnostic.empty()) {
        m.diagnostic = "adiabatic elimination invalid: min |delta_C| below 10 x max nu";
    } else if (!m.adiabatic_valid) {
        m.diagnostic = "adiabatic elimination invalid: " + m.diagnostic;
    }
    return m;
}

} // namespace cavity_bjj
