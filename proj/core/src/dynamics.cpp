#include "cavity_bjj/dynamics.hpp"

#include "cavity_bjj/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace cavity_bjj {

std::array<double, 3> junction_bloch_rhs(const std::array<double, 3>& spin, double u, double nu) {
    const auto& [sx, sy, sz] = spin;
    return {-u * sz * sy, 2.0 * nu * sz + u * sz * sx, -2.0 * nu * sy};
}

StateVector rhs(const DimensionlessParams& params, const StateVector& y) {
    const std::complex<double> alpha{y[3], y[4]};
    const double nu = effective_tunneling_from_photons(params, y[3] * y[3] + y[4] * y[4]);
    const double delta = effective_detuning_bloch(params, y[0]);
    const auto ds = junction_bloch_rhs({y[0], y[1], y[2]}, params.u, nu);
    const std::complex<double> dalpha = std::complex<double>{0.0, delta} * alpha + params.e;
    return {ds[0], ds[1], ds[2], dalpha.real(), dalpha.imag()};
}

InternalState rhs(const DimensionlessParams& params, const InternalState& state) {
    return InternalState::from_vector(rhs(params, state.to_vector()));
}

MeanFieldState rhs_polar(const DimensionlessParams& params, const MeanFieldState& state) {
    validate(state);
    const double s = std::sqrt(1.0 - state.z * state.z);
    if (s == 0.0) throw SingularityError("polar equations singular at |z| = 1", state.z, state.theta);
    if (state.xi == 0.0) throw SingularityError("polar equations singular at xi = 0", state.z, state.theta);

    const double nu = effective_tunneling(params, state.xi);
    const double delta = effective_detuning(params, state.z, state.theta);
    MeanFieldState d;
    d.z = -2.0 * nu * s * std::sin(state.theta);
    d.theta = (params.u + 2.0 * nu * std::cos(state.theta) / s) * state.z;
    d.xi = params.e * std::cos(state.phi);
    d.phi = delta - params.e / state.xi * std::sin(state.phi);
    return d;
}

MeanFieldState polar_derivative(const InternalState& state, const InternalState& derivative) {
    const double sx = state.spin[0];
    const double sy = state.spin[1];
    const auto& ds = derivative.spin;
    const double rho2 = sx * sx + sy * sy;
    const double xi = std::abs(state.alpha);
    if (rho2 == 0.0 || xi == 0.0) {
        throw SingularityError("polar derivative undefined at a coordinate pole", state.spin[2], 0.0);
    }
    const std::complex<double> w = std::conj(state.alpha) * derivative.alpha;
    MeanFieldState d;
    d.z = ds[2];
    d.theta = (sx * ds[1] - sy * ds[0]) / rho2;
    d.xi = w.real() / xi;
    d.phi = w.imag() / (xi * xi);
    return d;
}

Trajectory::Trajectory(DimensionlessParams params, MeanFieldState initial, IntegrationOptions options,
                       std::vector<TrajectorySample> samples, ode::Statistics stats)
    : params_(params), initial_(initial), options_(options), samples_(std::move(samples)), stats_(stats) {}

double Trajectory::energy_drift() const {
    if (samples_.empty()) return 0.0;
    const double e0 = samples_.front().derived.energy;
    double drift = 0.0;
    for (const auto& s : samples_) drift = std::max(drift, std::abs(s.derived.energy - e0));
    return e0 == 0.0 ? drift : drift / std::abs(e0);
}

Trajectory integrate_internal(const DimensionlessParams& params, const InternalState& initial, double t0,
                              double t1, const IntegrationOptions& options) {
    validate(params);
    if (!(options.tolerances.rtol > 0.0) || !(options.tolerances.atol > 0.0)) {
        throw DomainError("integration tolerances must be positive");
    }
    if (!(options.stride >= 0.0)) throw DomainError("output stride must be >= 0");

    std::vector<TrajectorySample> samples;
    if (options.stride > 0.0) {
        samples.reserve(static_cast<std::size_t>(std::abs(t1 - t0) / options.stride) + 2);
    }
    auto field = [&params](double, const StateVector& y) { return rhs(params, y); };
    auto observer = [&](double t, const StateVector& y) {
        TrajectorySample s;
        s.tau = t;
        s.internal = InternalState::from_vector(y);
        s.state = from_internal(s.internal);
        s.derived = derived_quantities(params, s.internal);
        samples.push_back(s);
    };

    ode::Options ode_options;
    ode_options.tolerances = options.tolerances;
    ode_options.max_step = options.max_step;
    ode_options.fixed_step = options.fixed_step;
    const auto stats = ode::integrate<5>(field, initial.to_vector(), t0, t1, options.stride, observer, ode_options);
    return Trajectory(params, from_internal(initial), options, std::move(samples), stats);
}

Trajectory integrate(const DimensionlessParams& params, const MeanFieldState& initial, double horizon,
                     const IntegrationOptions& options) {
    if (!(horizon > 0.0)) throw DomainError("integration horizon must be > 0");
    return integrate_internal(params, to_internal(initial), 0.0, horizon, options);
}

std::string to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::center_like: return "center-like";
        case StabilityClass::saddle_like: return "saddle-like";
        case StabilityClass::marginal: return "marginal";
    }
    return "unknown";
}

StabilityReport classify_stability(const DimensionlessParams& params, const MeanFieldState& candidate) {
    const InternalState internal = to_internal(candidate);
    const StateVector y0 = internal.to_vector();
    const StateVector f0 = rhs(params, y0);
    double residual = 0.0;
    for (double v : f0) residual += v * v;
    if (!(std::sqrt(residual) < 1e-8)) {
        throw DomainError("classify_stability: candidate is not stationary (||rhs|| = " +
                          std::to_string(std::sqrt(residual)) + ")");
    }

    constexpr double h = 1e-6;
    Eigen::Matrix<double, 5, 5> jac;
    for (int j = 0; j < 5; ++j) {
        StateVector yp = y0, ym = y0;
        yp[j] += h;
        ym[j] -= h;
        const auto fp = rhs(params, yp);
        const auto fm = rhs(params, ym);
        for (int i = 0; i < 5; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }

    // Orthonormal basis of the tangent plane of the sphere at S, plus the two
    // cavity quadratures. The flow preserves |S|, so this subspace is invariant.
    Eigen::Vector3d s(internal.spin[0], internal.spin[1], internal.spin[2]);
    s.normalize();
    Eigen::Vector3d seed = std::abs(s.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    Eigen::Vector3d t1 = (seed - seed.dot(s) * s).normalized();
    Eigen::Vector3d t2 = s.cross(t1);
    Eigen::Matrix<double, 5, 4> basis = Eigen::Matrix<double, 5, 4>::Zero();
    basis.block<3, 1>(0, 0) = t1;
    basis.block<3, 1>(0, 1) = t2;
    basis(3, 2) = 1.0;
    basis(4, 3) = 1.0;
    const Eigen::Matrix4d reduced = basis.transpose() * jac * basis;

    Eigen::EigenSolver<Eigen::Matrix4d> solver(reduced, false);
    StabilityReport report;
    for (int i = 0; i < 4; ++i) report.eigenvalues.push_back(solver.eigenvalues()[i]);
    std::sort(report.eigenvalues.begin(), report.eigenvalues.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    double scale = 1.0;
    double max_real = 0.0;
    double min_abs = std::numeric_limits<double>::infinity();
    for (const auto& l : report.eigenvalues) {
        scale = std::max(scale, std::abs(l));
        max_real = std::max(max_real, std::abs(l.real()));
        min_abs = std::min(min_abs, std::abs(l));
    }
    const double threshold = 1e-6 * scale;
    if (max_real > threshold) {
        report.classification = StabilityClass::saddle_like;
    } else if (min_abs <= threshold) {
        report.classification = StabilityClass::marginal;
    } else {
        report.classification = StabilityClass::center_like;
    }

    std::vector<bool> used(report.eigenvalues.size(), false);
    report.pairs_balanced = true;
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        std::size_t best = i;
        double best_sum = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < report.eigenvalues.size(); ++j) {
            if (used[j]) continue;
            const double sum = std::abs(report.eigenvalues[i] + report.eigenvalues[j]);
            if (sum < best_sum) {
                best_sum = sum;
                best = j;
            }
        }
        if (best == i || best_sum >= 1e-6) {
            report.pairs_balanced = false;
            break;
        }
        used[best] = true;
    }
    return report;
}

std::size_t count_sign_changes(const std::vector<double>& values) {
    std::size_t changes = 0;
    int last_sign = 0;
    for (double v : values) {
        const int sign = (v > 0.0) - (v < 0.0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++changes;
        last_sign = sign;
    }
    return changes;
}

TrajectorySummary trajectory_summary(const Trajectory& trajectory) {
    if (trajectory.size() == 0) throw DomainError("trajectory_summary: empty trajectory");
    TrajectorySummary summary;
    summary.z_min = std::numeric_limits<double>::infinity();
    summary.z_max = -std::numeric_limits<double>::infinity();
    std::vector<double> z;
    z.reserve(trajectory.size());
    for (const auto& s : trajectory.samples()) {
        summary.z_min = std::min(summary.z_min, s.state.z);
        summary.z_max = std::max(summary.z_max, s.state.z);
        summary.xi_max = std::max(summary.xi_max, s.state.xi);
        z.push_back(s.state.z);
    }
    summary.zero_crossings = count_sign_changes(z);
    summary.energy_drift = trajectory.energy_drift();
    return summary;
}

} // namespace cavity_bjj
