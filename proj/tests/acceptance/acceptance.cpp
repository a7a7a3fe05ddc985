// One PASS/FAIL line per acceptance criterion. Reference values come from
// closed forms and small oracles written here, not from the library.

#include "cavity_bjj/dynamics.hpp"
#include "cavity_bjj/errors.hpp"
#include "cavity_bjj/fixed_points.hpp"
#include "cavity_bjj/model.hpp"
#include "cavity_bjj/quantum.hpp"
#include "cavity_bjj/reduced.hpp"
#include "cavity_bjj/wannier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cavity_bjj;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

DimensionlessParams reference_params() { return {-100.0, -90.0, -30.0, 12.0, 20.0, 1000}; }

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * pi)); }

// Energy in Bloch/complex form, written from the model definition.
double oracle_energy(const DimensionlessParams& p, const std::array<double, 3>& s, std::complex<double> a) {
    const double n = p.n_atoms;
    const double a2 = std::norm(a);
    return -p.d_c * a2 + 2.0 * p.e * a.imag() + n * (p.u * (1.0 + s[2] * s[2]) / 4.0 - s[0]) +
           a2 * (p.w0 + p.w12 * s[0]);
}

// Flow from the energy: spin precesses about (2/N) grad E, the photon follows Hamilton's equations in (Re, Im).
std::array<double, 5> oracle_flow(const DimensionlessParams& p, const std::array<double, 5>& y) {
    auto energy = [&](std::array<double, 5> v) {
        return oracle_energy(p, {v[0], v[1], v[2]}, {v[3], v[4]});
    };
    std::array<double, 5> grad{};
    constexpr double h = 1e-2;  // energy is at most quadratic per coordinate
    for (int k = 0; k < 5; ++k) {
        auto up = y, dn = y;
        up[k] += h;
        dn[k] -= h;
        grad[k] = (energy(up) - energy(dn)) / (2.0 * h);
    }
    const double scale = 2.0 / p.n_atoms;
    const std::array<double, 3> g{scale * grad[0], scale * grad[1], scale * grad[2]};
    return {g[1] * y[2] - g[2] * y[1], g[2] * y[0] - g[0] * y[2], g[0] * y[1] - g[1] * y[0], grad[4] / 2.0,
            -grad[3] / 2.0};
}

// Stationary residual by direct substitution into the flow written out per component.
double substitution_residual(const DimensionlessParams& p, const MeanFieldState& st) {
    const double s = std::sqrt(std::max(0.0, 1.0 - st.z * st.z));
    const double sx = s * std::cos(st.theta), sy = s * std::sin(st.theta);
    const std::complex<double> a = std::polar(st.xi, st.phi);
    const double nu = 1.0 - p.w12 / p.n_atoms * std::norm(a);
    const double delta = p.d_c - p.w0 - p.w12 * sx;
    const std::complex<double> da = std::complex<double>(0.0, delta) * a + p.e;
    const double r[5] = {-p.u * st.z * sy, 2.0 * nu * st.z + p.u * st.z * sx, -2.0 * nu * sy, da.real(), da.imag()};
    double acc = 0.0;
    for (double v : r) acc += v * v;
    return std::sqrt(acc);
}

// Imbalanced stationary points: S_x = -2 nu(S_x) / u, iterated to a fixed point.
double iterate_spin_x(const DimensionlessParams& p) {
    double sx = -2.0 / p.u;
    for (int k = 0; k < 500; ++k) {
        const double delta = p.d_c - p.w0 - p.w12 * sx;
        const double photons = delta != 0.0 ? p.e * p.e / (delta * delta) : 0.0;
        const double nu = 1.0 - p.w12 / p.n_atoms * photons;
        sx = -2.0 * nu / p.u;
    }
    return sx;
}

// Pure junction integrated with classical RK4 in (z, theta).
std::vector<double> rk4_junction(double lambda, double z, double theta, double horizon, double dt) {
    auto f = [&](double zz, double tt, double& dz, double& dt_) {
        const double s = std::sqrt(1.0 - zz * zz);
        dz = -2.0 * s * std::sin(tt);
        dt_ = 2.0 * (lambda * zz + zz * std::cos(tt) / s);
    };
    std::vector<double> zs{z};
    const auto steps = static_cast<long>(std::llround(horizon / dt));
    for (long k = 0; k < steps; ++k) {
        double k1z, k1t, k2z, k2t, k3z, k3t, k4z, k4t;
        f(z, theta, k1z, k1t);
        f(z + 0.5 * dt * k1z, theta + 0.5 * dt * k1t, k2z, k2t);
        f(z + 0.5 * dt * k2z, theta + 0.5 * dt * k2t, k3z, k3t);
        f(z + dt * k3z, theta + dt * k3t, k4z, k4t);
        z += dt / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z);
        theta += dt / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t);
        zs.push_back(z);
    }
    return zs;
}

const FixedPoint* find_label(const std::vector<FixedPoint>& pts, FixedPointLabel label, int z_sign = 0) {
    for (const auto& p : pts) {
        if (p.label == label && (z_sign == 0 || p.z_sign == z_sign)) return &p;
    }
    return nullptr;
}

void fixed_point_values(Verdict& v) {
    const auto p = reference_params();
    const auto set = zero_imbalance_fixed_points(p);
    const MeanFieldState x1{0.0, 0.0, 1.0, pi / 2}, x4{0.0, pi, 0.5, -pi / 2};
    v.require(substitution_residual(p, x1) < 1e-12 && substitution_residual(p, x4) < 1e-12, "reference points");
    for (auto [label, ref] : {std::pair{FixedPointLabel::X1, x1}, std::pair{FixedPointLabel::X4, x4}}) {
        const auto* fp = find_label(set.points, label);
        if (!fp) {
            v.require(false, to_string(label) + " missing");
            continue;
        }
        const auto& s = fp->state;
        const double gap = std::max({std::abs(s.z - ref.z), angle_gap(s.theta, ref.theta), std::abs(s.xi - ref.xi),
                                     angle_gap(s.phi, ref.phi)});
        const double res = substitution_residual(p, s);
        v.detail << " " << to_string(label) << " gap=" << gap << " residual=" << res;
        v.require(gap < 1e-12 && res < 1e-10 && fp->residual < 1e-10, to_string(label));
    }
    bool x2 = false, x3 = false;
    for (const auto& r : set.rejected) {
        x2 = x2 || r.label == "X2";
        x3 = x3 || r.label == "X3";
    }
    v.require(x2 && x3, "X2 and X3 rejected");
    v.require(!find_label(set.points, FixedPointLabel::X2) && !find_label(set.points, FixedPointLabel::X3),
              "X2/X3 absent");
}

void finite_imbalance(Verdict& v) {
    const auto p = reference_params();
    const double sx = iterate_spin_x(p);
    const double z_ref = std::sqrt(1.0 - sx * sx);
    const double delta = p.d_c - p.w0 - p.w12 * sx;
    const double xi_ref = std::abs(p.e / delta);
    v.detail << " oracle s=" << std::abs(sx) << " z=" << z_ref << " xi=" << xi_ref;
    v.require(sx < 0.0 && std::abs(std::abs(sx) - 0.1753) < 5e-4, "oracle s near 0.1753");
    const auto set = finite_imbalance_fixed_points(p);
    for (int sign : {1, -1}) {
        const auto* fp = find_label(set.points, FixedPointLabel::X8, sign);
        if (!fp) {
            v.require(false, "X8 branch missing");
            continue;
        }
        const double gap = std::max({std::abs(fp->state.z - sign * z_ref), std::abs(fp->state.xi - xi_ref),
                                     angle_gap(fp->state.theta, pi)});
        v.require(gap < 1e-8, "X8 vs iteration");
        v.require(substitution_residual(p, fp->state) < 1e-10, "X8 residual");
    }

    const DimensionlessParams off{-100.0, 0.0, 0.0, -4.0, 0.0, 1000};
    const auto attractive = finite_imbalance_fixed_points(off);
    int hits = 0;
    for (const auto& fp : attractive.points) {
        if (std::abs(std::abs(fp.state.z) - std::sqrt(3.0) / 2.0) < 1e-12 && angle_gap(fp.state.theta, 0.0) < 1e-12)
            ++hits;
    }
    v.detail << " attractive hits=" << hits;
    v.require(hits == 2, "u=-4 points at +-sqrt(3)/2");
}

void fig3_oscillation(Verdict& v) {
    const auto p = reference_params();
    const auto traj = integrate(p, {0.0, 0.5, 0.0, 0.0}, 100.0);
    double zmax = 0.0, xi_max = 0.0, e_lo = 1e300, e_hi = -1e300;
    std::vector<double> zs;
    for (const auto& s : traj.samples()) {
        zs.push_back(s.state.z);
        zmax = std::max(zmax, std::abs(s.state.z));
        xi_max = std::max(xi_max, s.state.xi);
        const double e = oracle_energy(p, s.internal.spin, s.internal.alpha);
        e_lo = std::min(e_lo, e);
        e_hi = std::max(e_hi, e);
    }
    const double e0 = oracle_energy(p, traj[0].internal.spin, traj[0].internal.alpha);
    const double drift = (e_hi - e_lo) / std::abs(e0);
    const auto crossings = count_sign_changes(zs);
    v.detail << " max|z|=" << zmax << " crossings=" << crossings << " xi_max=" << xi_max << " drift=" << drift;
    v.require(zmax >= 0.1 && zmax <= 0.25, "max|z| in [0.1, 0.25]");
    v.require(crossings >= 10, "zero crossings");
    v.require(xi_max < 3.0, "xi bounded");
    v.require(drift < 1e-8, "energy drift");
}

void fig4_trapping_released(Verdict& v) {
    auto p = reference_params();
    const auto traj = integrate(p, {0.5, -pi, 0.0, 0.0}, 100.0);
    double zmin = 1.0;
    std::vector<double> zs;
    for (const auto& s : traj.samples()) {
        zs.push_back(s.state.z);
        zmin = std::min(zmin, s.state.z);
    }
    v.detail << " z_min=" << zmin << " crossings=" << count_sign_changes(zs);
    v.require(count_sign_changes(zs) >= 1, "z crosses 0");
    v.require(zmin < -0.5, "z_min < -0.5");

    const double lambda = p.u / 2.0;
    const double h = lambda * 0.25 / 2.0 - std::sqrt(0.75) * std::cos(-pi);
    const auto oracle = rk4_junction(lambda, 0.5, -pi, 100.0, 1e-3);
    const double oracle_min = *std::min_element(oracle.begin(), oracle.end());
    v.detail << " H=" << h << " cavity-off z_min=" << oracle_min;
    v.require(h > 1.0 && oracle_min > 0.0, "oracle self-trapped");
    v.require(self_trapped(0.5, -pi, lambda), "library trapping criterion");
    const auto lib = pure_bjj(p.u, 0.5, -pi, 100.0);
    double lib_min = 1.0;
    for (const auto& s : lib.samples) lib_min = std::min(lib_min, s.z);
    v.require(lib_min > 0.0, "library junction stays positive");
}

void separatrix(Verdict& v) {
    const auto p = reference_params();
    auto detuning = [&](double z, double theta) {
        return p.d_c - p.w0 - p.w12 * std::sqrt(1.0 - z * z) * std::cos(theta);
    };
    const auto curve = separatrix_curve(p, 720);
    double worst = 0.0;
    for (const auto& c : curve) worst = std::max(worst, std::abs(detuning(c.z, c.theta)));
    v.detail << " max|delta| on curve=" << worst;
    v.require(!curve.empty() && worst < 1e-10, "curve on delta=0");
    const double zs = std::sqrt(8.0) / 3.0, ts = std::acos(1.0 / 3.0);
    for (auto [t, z] : {std::pair{0.0, zs}, std::pair{0.0, -zs}, std::pair{ts, 0.0}, std::pair{-ts, 0.0}}) {
        double best = 1e300;
        for (const auto& c : curve) best = std::min(best, std::hypot(angle_gap(c.theta, t), c.z - z));
        v.require(best < 1e-10, "curve passes reference point");
    }

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uz(-0.98, 0.98), ut(-pi, pi);
    int seeds = 0, kept = 0;
    ReducedOptions opt;
    opt.stride = 0.05;
    while (seeds < 50) {
        const double z = uz(rng), t = ut(rng);
        if (std::abs(detuning(z, t)) < 1.0) continue;
        ++seeds;
        const int sign = detuning(z, t) > 0 ? 1 : -1;
        const auto traj = integrate_reduced(p, z, t, 100.0, opt);
        bool same = !traj.truncated && traj.samples.back().tau == 100.0;
        for (const auto& s : traj.samples) same = same && (detuning(s.z, s.theta) > 0 ? 1 : -1) == sign;
        kept += same;
    }
    v.detail << " seeds keeping sign=" << kept << "/50";
    v.require(kept == 50, "sign of delta preserved");
}

void parameter_pipeline(Verdict& v) {
    DoubleWellSpec well;
    CavityGeometry cavity;
    cavity.k = 2.0;
    cavity.mirror_distance = 50.0;
    cavity.l_h = 0.3;
    cavity.eta = 4.9;
    cavity.delta_c = -8.4;
    const auto report = derive_parameters(well, cavity, 0.002, 1000, 2.0);
    const double doublet = (report.energies[1] - report.energies[0]) / 2.0;
    const double rel = std::abs(report.hubbard.j - doublet) / doublet;
    v.detail << " J=" << report.hubbard.j << " rel=" << rel;
    v.require(rel < 1e-6, "integral J vs doublet splitting");

    DoubleWellSpec harmonic;
    harmonic.form = WellForm::harmonic_gaussian;
    harmonic.omega = 1.0;
    harmonic.barrier_height = 0.0;
    harmonic.half_width = 10.0;
    harmonic.points = 20001;
    const auto levels = solve_double_well(harmonic, 4);
    double worst = 0.0;
    for (int n = 0; n < 4; ++n) worst = std::max(worst, std::abs(levels.energies[n] - (n + 0.5)));
    v.detail << " harmonic err=" << worst;
    v.require(worst < 1e-6, "harmonic levels");

    auto curve = report.ratio_curve;
    std::sort(curve.begin(), curve.end(), [](auto& a, auto& b) { return a.sigma < b.sigma; });
    bool monotone = curve.size() >= 2;
    for (std::size_t k = 1; k < curve.size(); ++k) monotone = monotone && curve[k].ratio <= curve[k - 1].ratio + 1e-12;
    bool bounded = true;
    for (const auto& pt : curve) {
        auto g = cavity;
        g.sigma = pt.sigma;
        const auto c = cavity_couplings(report.basis, g);
        bounded = bounded && std::abs(c.w12) <= std::abs(c.w0) && std::abs(c.overlap_12) <= std::abs(c.overlap_0);
    }
    v.detail << " ratio " << curve.front().ratio << " -> " << curve.back().ratio;
    v.require(monotone, "ratio non-increasing in sigma");
    v.require(curve.front().ratio > 0.98, "narrow-waist ratio > 0.98");
    v.require(bounded, "|W12| <= |W0|");
}

void quantum_validator(Verdict& v) {
    const DimensionlessParams generic{-5.0, -1.0, -0.5, 2.0, 0.5, 10};
    const FockBasis basis(10, 16);
    const auto h = build_hamiltonian(generic, basis);
    const double herm = hermiticity_error(h.matrix);
    const double leak = atom_number_leakage(h);
    v.detail << " herm=" << herm << " leak=" << leak;
    v.require(herm < 1e-14, "Hermiticity");
    v.require(leak == 0.0, "atom number conserved");

    const auto psi0 = coherent_initial_state(0.4, 0.3, 0.0, 0.0, basis);
    const auto e0 = expectations(psi0, h).energy.real();
    double norm_drift = 0.0, energy_drift = 0.0;
    auto psi = psi0;
    for (int k = 0; k < 10; ++k) {
        psi = evolve(psi, h, 5.0);
        norm_drift = std::max(norm_drift, std::abs(psi.amplitudes.norm() - 1.0));
        energy_drift = std::max(energy_drift, std::abs(expectations(psi, h).energy.real() - e0) / std::abs(e0));
        v.require(edge_population(psi, basis) < 1e-8, "cutoff adequate");
    }
    v.detail << " norm drift=" << norm_drift << " energy drift=" << energy_drift;
    v.require(norm_drift < 1e-10, "norm");
    v.require(energy_drift < 1e-8, "energy");

    // Empty cavity driven through the resonance-free detuning: |alpha|^2 = (2e/d_c)^2 sin^2(d_c tau / 2).
    const DimensionlessParams drive{-3.0, 0.0, 0.0, 0.0, 0.8, 40};
    const FockBasis big(40, 40);
    const auto hd = build_hamiltonian(drive, big);
    auto chi = coherent_initial_state(0.0, 0.0, 0.0, 0.0, big);
    double photon_err = 0.0;
    for (int k = 1; k <= 10; ++k) {
        chi = evolve(chi, hd, 0.5);
        const double tau = 0.5 * k;
        const double ref = std::pow(2.0 * drive.e / drive.d_c, 2) * std::pow(std::sin(drive.d_c * tau / 2.0), 2);
        photon_err = std::max(photon_err, std::abs(expectations(chi, hd).photon_number - ref));
    }
    v.detail << " photon err=" << photon_err;
    v.require(photon_err < 1e-6, "driven cavity");

    const DimensionlessParams rabi{-1.0, 0.0, 0.0, 0.0, 0.0, 1};
    const FockBasis single(1, 0);
    const auto hr = build_hamiltonian(rabi, single);
    auto phi = coherent_initial_state(1.0, 0.0, 0.0, 0.0, single);
    double rabi_err = 0.0;
    for (int k = 1; k <= 40; ++k) {
        phi = evolve(phi, hr, 0.25);
        rabi_err = std::max(rabi_err, std::abs(expectations(phi, hr).z - std::cos(2.0 * 0.25 * k)));
    }
    v.detail << " rabi err=" << rabi_err;
    v.require(rabi_err < 1e-8, "Rabi curve");
}

void cross_model(Verdict& v) {
    const DimensionlessParams p{-10.0, -3.0, 0.0, 5.0, 0.0, 500};
    const double z0 = 0.3, t0 = 0.7, horizon = 50.0;
    IntegrationOptions full_opt;
    full_opt.tolerances = {1e-13, 1e-15};
    full_opt.stride = 0.5;
    ReducedOptions red_opt;
    red_opt.tolerances = {1e-13, 1e-15};
    red_opt.stride = 0.5;
    const auto full = integrate(p, {z0, t0, 0.0, 0.0}, horizon, full_opt);
    const auto red = integrate_reduced(p, z0, t0, horizon, red_opt);
    const auto bjj = pure_bjj(p.u, z0, t0, horizon, red_opt);
    double worst = 0.0;
    const bool aligned = full.size() == red.samples.size() && red.samples.size() == bjj.samples.size();
    v.require(aligned, "sample grids agree");
    if (aligned) {
        for (std::size_t k = 0; k < full.size(); ++k) {
            const auto& a = full[k].state;
            const auto& b = red.samples[k];
            const auto& c = bjj.samples[k];
            worst = std::max({worst, std::abs(a.z - b.z), std::abs(a.z - c.z), std::abs(b.z - c.z),
                              angle_gap(a.theta, b.theta), angle_gap(a.theta, c.theta), angle_gap(b.theta, c.theta)});
        }
    }
    v.detail << " pairwise max=" << worst;
    v.require(worst < 1e-9, "pairwise agreement");

    // The three share a stepper, so also check against the fixed-step oracle.
    constexpr double dt = 2.5e-4;
    const auto oracle = rk4_junction(p.u / 2.0, z0, t0, horizon, dt);
    double oracle_gap = 0.0;
    for (std::size_t k = 0; k < full.size(); ++k) {
        const auto idx = static_cast<std::size_t>(std::llround(full[k].tau / dt));
        oracle_gap = std::max(oracle_gap, std::abs(full[k].state.z - oracle.at(idx)));
    }
    v.detail << " vs RK4 oracle=" << oracle_gap;
    v.require(oracle_gap < 1e-9, "agreement with RK4 oracle");

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double consistency = 0.0;
    for (int k = 0; k < 1000; ++k) {
        DimensionlessParams q{100.0 * unit(rng), 100.0 * unit(rng), 50.0 * unit(rng), 20.0 * unit(rng),
                              20.0 * unit(rng), 1000};
        const MeanFieldState st{unit(rng), pi * unit(rng), 3.0 * (1.0 + unit(rng)), pi * unit(rng)};
        const auto y = to_internal(st).to_vector();
        const auto lib = rhs(q, y);
        const auto ref = oracle_flow(q, y);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 5; ++i) {
            num += (lib[i] - ref[i]) * (lib[i] - ref[i]);
            den += ref[i] * ref[i];
        }
        consistency = std::max(consistency, std::sqrt(num / std::max(den, 1e-300)));
    }
    v.detail << " flow-vs-energy rel=" << consistency;
    v.require(consistency < 1e-6, "Hamiltonian consistency");
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget;  // seconds
        std::function<void(Verdict&)> body;
    };
    const std::vector<Criterion> criteria{
        {"AC1 zero-imbalance fixed points", 1.0, fixed_point_values},
        {"AC2 finite-imbalance branch", 1.0, finite_imbalance},
        {"AC3 plasma oscillation", 5.0, fig3_oscillation},
        {"AC4 cavity-released trapping", 5.0, fig4_trapping_released},
        {"AC5 separatrix", 0.0, separatrix},
        {"AC6 parameter pipeline", 0.0, parameter_pipeline},
        {"AC7 quantum validator", 60.0, quantum_validator},
        {"AC8 cross-model consistency", 0.0, cross_model},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Verdict v;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(v);
        } catch (const std::exception& ex) {
            v.require(false, std::string("exception: ") + ex.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget > 0.0) v.require(secs < c.budget, "runtime budget");
        failures += !v.pass;
        std::printf("%s %s (%.3f s)%s\n", c.name, v.pass ? "PASS" : "FAIL", secs, v.detail.str().c_str());
    }
    return failures == 0 ? 0 : 1;
}
