#include "cavity_bjj/fixed_points.hpp"

#include "cavity_bjj/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cavity_bjj {

namespace {

constexpr double residual_tolerance = 1e-10;
constexpr double root_merge_tolerance = 1e-10;

FixedPointLabel label_for(bool zero_imbalance, double cos_theta, double detuning) {
    const bool positive = detuning > 0.0;
    if (zero_imbalance) {
        if (cos_theta > 0.0) return positive ? FixedPointLabel::X1 : FixedPointLabel::X2;
        return positive ? FixedPointLabel::X3 : FixedPointLabel::X4;
    }
    if (cos_theta > 0.0) return positive ? FixedPointLabel::X5 : FixedPointLabel::X6;
    return positive ? FixedPointLabel::X7 : FixedPointLabel::X8;
}

FixedPointLabel partner_of(FixedPointLabel label) {
    const int i = static_cast<int>(label);
    return static_cast<FixedPointLabel>(i % 2 == 0 ? i + 1 : i - 1);
}

std::string format(double value) {
    std::ostringstream out;
    out.precision(10);
    out << value;
    return out.str();
}

const char* branch_name(double cos_theta) {
    return cos_theta > 0.0 ? "theta=0" : "theta=pi";
}

} // namespace

std::string to_string(FixedPointLabel label) {
    return "X" + std::to_string(static_cast<int>(label) + 1);
}

double stationary_residual(const DimensionlessParams& params, const MeanFieldState& state) {
    const auto f = rhs(params, to_internal(state).to_vector());
    double sum = 0.0;
    for (double v : f) sum += v * v;
    return std::sqrt(sum);
}

FixedPointSet zero_imbalance_fixed_points(const DimensionlessParams& params) {
    validate(params);
    FixedPointSet out;
    for (double c : {1.0, -1.0}) {
        const double theta = c > 0.0 ? 0.0 : pi;
        const double delta = params.d_c - params.w0 - params.w12 * c;
        const auto plus = label_for(true, c, 1.0);
        const auto minus = label_for(true, c, -1.0);

        if (delta == 0.0) {
            out.diagnostics.push_back(std::string(branch_name(c)) +
                                      ": exact resonance, no stationary photon amplitude on this branch");
            continue;
        }

        FixedPoint fp;
        fp.label = label_for(true, c, delta);
        fp.branch_theta = theta;
        fp.detuning_sign = delta > 0.0 ? 1 : -1;
        fp.delta_c_eff = delta;
        if (params.e == 0.0) {
            fp.state = {0.0, theta, 0.0, 0.0};
            fp.degenerate_photon = true;
            out.rejected.push_back({to_string(partner_of(fp.label)), "undriven cavity: xi = 0 on both labels"});
        } else {
            fp.state = {0.0, theta, params.e / std::abs(delta), delta > 0.0 ? pi / 2.0 : -pi / 2.0};
            const auto rejected = delta > 0.0 ? minus : plus;
            const double xi_other = delta > 0.0 ? -params.e / delta : params.e / delta;
            out.rejected.push_back({to_string(rejected), "unphysical: xi = " + format(xi_other) + " < 0"});
        }
        fp.residual = stationary_residual(params, fp.state);
        out.points.push_back(fp);
    }
    return out;
}

std::array<double, 4> imbalance_cubic(const DimensionlessParams& params, double cos_theta) {
    // u s q^2 + 2c (q^2 - kappa e^2) = 0 with q(s) = D + b s.
    const double c = cos_theta;
    const double d = params.d_c - params.w0;
    const double b = -params.w12 * c;
    const double kappa = params.w12 / params.n_atoms;
    const double u = params.u;
    return {2.0 * c * (d * d - kappa * params.e * params.e),
            u * d * d + 4.0 * c * d * b,
            2.0 * u * d * b + 2.0 * c * b * b,
            u * b * b};
}

double imbalance_condition(const DimensionlessParams& params, double cos_theta, double s) {
    const double q = params.d_c - params.w0 - params.w12 * cos_theta * s;
    const double photons = params.e * params.e / (q * q);
    return s + 2.0 * cos_theta / params.u * effective_tunneling_from_photons(params, photons);
}

std::vector<std::complex<double>> polynomial_roots(std::vector<double> coefficients) {
    while (!coefficients.empty() && coefficients.back() == 0.0) coefficients.pop_back();
    if (coefficients.size() <= 1) return {};
    const auto n = static_cast<Eigen::Index>(coefficients.size() - 1);
    const double lead = coefficients.back();
    if (n == 1) return {std::complex<double>(-coefficients[0] / lead, 0.0)};

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -coefficients[i] / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<std::complex<double>> roots;
    for (Eigen::Index i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()[i]);
    return roots;
}

FixedPointSet finite_imbalance_fixed_points(const DimensionlessParams& params) {
    validate(params);
    FixedPointSet out;
    if (params.u == 0.0) {
        out.diagnostics.emplace_back("u = 0: no finite-imbalance stationary points");
        return out;
    }
    const double d = params.d_c - params.w0;
    const double pole_tol = 1e-12 * (1.0 + std::abs(d) + std::abs(params.w12));

    for (double c : {1.0, -1.0}) {
        const double theta = c > 0.0 ? 0.0 : pi;
        const auto coeffs = imbalance_cubic(params, c);
        const auto roots = polynomial_roots({coeffs.begin(), coeffs.end()});

        struct Root {
            double s;
            bool degenerate;
        };
        std::vector<Root> accepted;
        for (const auto& r : roots) {
            if (std::abs(r.imag()) > 1e-8 * std::max(1.0, std::abs(r))) continue;
            double s = r.real();
            // Newton polish on the un-cleared condition.
            for (int it = 0; it < 8; ++it) {
                const double q = d - params.w12 * c * s;
                if (std::abs(q) <= pole_tol) break;
                const double kappa = params.w12 / params.n_atoms;
                const double dq = -params.w12 * c;
                const double dnu = 2.0 * kappa * params.e * params.e * dq / (q * q * q);
                const double g = imbalance_condition(params, c, s);
                const double dg = 1.0 + 2.0 * c / params.u * dnu;
                if (dg == 0.0) break;
                const double step = g / dg;
                s -= step;
                if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(s))) break;
            }

            const std::string name = std::string(branch_name(c)) + " root s=" + format(s);
            if (!(s > 0.0) || s > 1.0 + 1e-12) {
                out.rejected.push_back({name, "outside (0, 1]: no real imbalance"});
                continue;
            }
            s = std::min(s, 1.0);
            const double q = d - params.w12 * c * s;
            if (std::abs(q) <= pole_tol) {
                out.rejected.push_back({name, "spurious root at delta_C = 0 introduced by clearing denominators"});
                continue;
            }
            if (std::abs(imbalance_condition(params, c, s)) > 1e-9) {
                out.rejected.push_back({name, "does not satisfy the un-cleared stationarity condition"});
                continue;
            }
            bool merged = false;
            for (auto& a : accepted) {
                if (std::abs(a.s - s) <= root_merge_tolerance) {
                    a.degenerate = true;
                    merged = true;
                }
            }
            if (!merged) accepted.push_back({s, false});
        }
        std::sort(accepted.begin(), accepted.end(), [](const Root& a, const Root& b) { return a.s < b.s; });

        for (const auto& root : accepted) {
            const double s = root.s;
            const double zbar = std::sqrt(std::max(0.0, 1.0 - s * s));
            if (zbar == 0.0) {
                out.diagnostics.push_back(std::string(branch_name(c)) +
                                          ": root s=1 coincides with the zero-imbalance point");
                continue;
            }
            const double delta = d - params.w12 * c * s;
            const double xi = params.e / std::abs(delta);
            const double phi = params.e == 0.0 ? 0.0 : (delta > 0.0 ? pi / 2.0 : -pi / 2.0);
            for (int sign : {1, -1}) {
                FixedPoint fp;
                fp.label = label_for(false, c, delta);
                fp.state = {sign * zbar, theta, xi, phi};
                fp.branch_theta = theta;
                fp.z_sign = sign;
                fp.detuning_sign = delta > 0.0 ? 1 : -1;
                fp.delta_c_eff = delta;
                fp.degenerate_photon = params.e == 0.0;
                fp.degenerate_root = root.degenerate;
                fp.residual = stationary_residual(params, fp.state);
                if (!(fp.residual < residual_tolerance)) {
                    out.rejected.push_back({to_string(fp.label) + " z=" + format(fp.state.z),
                                            "residual " + format(fp.residual) + " above tolerance"});
                    continue;
                }
                out.points.push_back(fp);
            }
        }
    }
    return out;
}

FixedPointSet all_fixed_points(const DimensionlessParams& params) {
    auto out = zero_imbalance_fixed_points(params);
    auto finite = finite_imbalance_fixed_points(params);
    out.points.insert(out.points.end(), finite.points.begin(), finite.points.end());
    out.rejected.insert(out.rejected.end(), finite.rejected.begin(), finite.rejected.end());
    out.diagnostics.insert(out.diagnostics.end(), finite.diagnostics.begin(), finite.diagnostics.end());
    return out;
}

std::vector<SeparatrixPoint> separatrix_curve(const DimensionlessParams& params, std::size_t n_points) {
    if (params.w12 == 0.0) throw DomainError("separatrix_curve: w12 = 0, no separatrix");
    const double ratio = (params.d_c - params.w0) / params.w12;
    if (std::abs(ratio - 1.0) <= 1e-14) return {{0.0, 0.0}};
    if (std::abs(ratio + 1.0) <= 1e-14) return {{pi, 0.0}};
    if (!(std::abs(ratio) < 1.0)) return {};
    if (n_points < 3) throw DomainError("separatrix_curve: need at least 3 points");

    // On the Bloch sphere the locus is the circle S_x = ratio.
    const double radius = std::sqrt(1.0 - ratio * ratio);
    std::vector<SeparatrixPoint> curve;
    curve.reserve(n_points + 1);
    for (std::size_t k = 0; k < n_points; ++k) {
        const double psi = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n_points);
        curve.push_back({std::atan2(radius * std::cos(psi), ratio), radius * std::sin(psi)});
    }
    curve.push_back(curve.front());
    return curve;
}

double distance_to_curve(const std::vector<SeparatrixPoint>& curve, double theta, double z) {
    if (curve.empty()) return std::numeric_limits<double>::infinity();
    auto dist_point = [&](const SeparatrixPoint& p) { return std::hypot(wrap_angle(p.theta - theta), p.z - z); };
    double best = dist_point(curve.front());
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const double ax = wrap_angle(curve[i - 1].theta - theta);
        const double ay = curve[i - 1].z - z;
        const double bx = ax + wrap_angle(curve[i].theta - curve[i - 1].theta);
        const double by = curve[i].z - z;
        const double dx = bx - ax, dy = by - ay;
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0.0 ? -(ax * dx + ay * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, std::hypot(ax + t * dx, ay + t * dy));
    }
    return best;
}

std::vector<FixedPointCheck> verify_fixed_points(const DimensionlessParams& params,
                                                 const std::vector<FixedPoint>& points) {
    std::vector<SeparatrixPoint> curve;
    if (params.w12 != 0.0) curve = separatrix_curve(params, 2048);

    std::vector<FixedPointCheck> checks;
    for (const auto& p : points) {
        FixedPointCheck check;
        check.point = p;
        check.point.residual = stationary_residual(params, p.state);
        check.accepted = check.point.residual < residual_tolerance;
        if (check.point.residual < 1e-8) {
            check.point.stability = classify_stability(params, p.state);
        }
        check.separatrix_distance = distance_to_curve(curve, p.state.theta, p.state.z);
        check.near_separatrix = check.separatrix_distance < 0.05;
        checks.push_back(check);
    }
    return checks;
}

} // namespace cavity_bjj
