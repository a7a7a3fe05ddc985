#include "cavity_bjj/wannier.hpp"

#include "cavity_bjj/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cavity_bjj {

double DoubleWellSpec::potential(double x) const {
    switch (form) {
        case WellForm::quartic: {
            const double r = (x / a) * (x / a) - 1.0;
            return v0 * r * r;
        }
        case WellForm::harmonic_gaussian:
            return 0.5 * omega * omega * x * x +
                   barrier_height * std::exp(-x * x / (2.0 * barrier_width * barrier_width));
    }
    return 0.0;
}

std::vector<double> make_grid(const DoubleWellSpec& spec) {
    if (spec.points < 5 || spec.points % 2 == 0) {
        throw DomainError("grid needs an odd number of points >= 5");
    }
    if (!(spec.half_width > 0.0)) throw DomainError("grid half width must be > 0");
    const double h = 2.0 * spec.half_width / (spec.points - 1);
    const int center = (spec.points - 1) / 2;
    std::vector<double> x(spec.points);
    for (int i = 0; i < spec.points; ++i) x[i] = (i - center) * h;
    return x;
}

double trapezoid(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
    return sum * h;
}

std::vector<double> apply_hamiltonian(const std::vector<double>& potential, double h, const std::vector<double>& f) {
    const std::size_t n = f.size();
    const double diag = 1.0 / (h * h);
    const double off = -0.5 / (h * h);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = (diag + potential[i]) * f[i];
        if (i > 0) v += off * f[i - 1];
        if (i + 1 < n) v += off * f[i + 1];
        out[i] = v;
    }
    return out;
}

EigenPairs solve_double_well(const DoubleWellSpec& spec, int count) {
    EigenPairs out;
    out.x = make_grid(spec);
    const auto n = static_cast<lapack_int>(out.x.size());
    if (count < 1 || count > n / 4) throw DomainError("eigenpair count must be in [1, N_x/4]");
    out.h = out.x[1] - out.x[0];
    out.potential.resize(n);
    for (lapack_int i = 0; i < n; ++i) out.potential[i] = spec.potential(out.x[i]);

    std::vector<double> d(n), e(n, -0.5 / (out.h * out.h));
    for (lapack_int i = 0; i < n; ++i) d[i] = 1.0 / (out.h * out.h) + out.potential[i];

    lapack_int found = 0;
    std::vector<double> w(n);
    std::vector<double> z(static_cast<std::size_t>(n) * count);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, count,
                                           0.0, &found, w.data(), z.data(), n, support.data());
    if (info != 0 || found != count) {
        throw ResolutionError("tridiagonal eigensolver failed (info=" + std::to_string(info) + ")");
    }

    const auto norm_factor = 1.0 / std::sqrt(out.h);
    for (int k = 0; k < count; ++k) {
        std::vector<double> v(z.begin() + static_cast<std::ptrdiff_t>(k) * n,
                              z.begin() + static_cast<std::ptrdiff_t>(k + 1) * n);
        for (auto& c : v) c *= norm_factor;
        const double norm = std::sqrt(trapezoid([&] {
            std::vector<double> sq(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
            return sq;
        }(), out.h));
        for (auto& c : v) c /= norm;

        double parity = 0.0;
        for (lapack_int i = 0; i < n; ++i) parity += v[i] * v[n - 1 - i];
        parity *= out.h;
        const double expected = (k % 2 == 0) ? 1.0 : -1.0;
        if (std::abs(parity - expected) > 1e-6) {
            throw ResolutionError("grid too coarse: state " + std::to_string(k) + " has parity " +
                                  std::to_string(parity));
        }
        double orientation = 0.0;
        for (lapack_int i = 0; i < n; ++i) {
            if (k % 2 == 0 || out.x[i] > 0.0) orientation += v[i];
        }
        if (orientation < 0.0) {
            for (auto& c : v) c = -c;
        }
        out.states.push_back(std::move(v));
        out.energies.push_back(w[k]);
    }

    for (int a = 0; a < count; ++a) {
        for (int b = 0; b <= a; ++b) {
            std::vector<double> prod(n);
            for (lapack_int i = 0; i < n; ++i) prod[i] = out.states[a][i] * out.states[b][i];
            const double overlap = trapezoid(prod, out.h);
            if (std::abs(overlap - (a == b ? 1.0 : 0.0)) > 1e-8) {
                throw ResolutionError("grid too coarse: eigenstates not orthonormal");
            }
        }
    }
    return out;
}

WannierBasis build_wannier(const EigenPairs& pairs, const DoubleWellSpec& spec) {
    if (pairs.states.size() < 3) throw DomainError("build_wannier needs at least three eigenpairs");
    WannierBasis basis;
    basis.spec = spec;
    basis.x = pairs.x;
    basis.h = pairs.h;
    basis.potential = pairs.potential;
    basis.e0 = pairs.energies[0];
    basis.e1 = pairs.energies[1];
    basis.e2 = pairs.energies[2];
    basis.delta_dw = basis.e2 - 0.5 * (basis.e0 + basis.e1);
    if (!(basis.delta_dw > 0.0)) throw DomainError("doublet is not separated from the third level");

    const auto& p0 = pairs.states[0];
    const auto& p1 = pairs.states[1];
    const std::size_t n = p0.size();
    basis.w1.resize(n);
    basis.w2.resize(n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < n; ++i) {
        basis.w1[i] = (p0[i] - p1[i]) * inv_sqrt2;
        basis.w2[i] = (p0[i] + p1[i]) * inv_sqrt2;
    }

    std::vector<double> xw(n);
    for (std::size_t i = 0; i < n; ++i) xw[i] = basis.x[i] * basis.w1[i] * basis.w1[i];
    const double mean_x = trapezoid(xw, basis.h);
    if (std::abs(mean_x) < basis.h) {
        throw DomainError("cannot fix Wannier orientation: <x> of the left orbital vanishes");
    }
    if (mean_x > 0.0) std::swap(basis.w1, basis.w2);
    return basis;
}

OnSiteParams hubbard_from_basis(const WannierBasis& basis, double g_gg, double l_h) {
    if (!(l_h > 0.0)) throw DomainError("l_H must be > 0");
    const std::size_t n = basis.w1.size();
    const auto hw1 = apply_hamiltonian(basis.potential, basis.h, basis.w1);
    const auto hw2 = apply_hamiltonian(basis.potential, basis.h, basis.w2);
    std::vector<double> f11(n), f12(n), f4(n);
    for (std::size_t i = 0; i < n; ++i) {
        f11[i] = basis.w1[i] * hw1[i];
        f12[i] = basis.w1[i] * hw2[i];
        const double w2 = basis.w1[i] * basis.w1[i];
        f4[i] = w2 * w2;
    }
    OnSiteParams out;
    out.eps = 1.0 / (l_h * l_h) + trapezoid(f11, basis.h);
    out.j = -trapezoid(f12, basis.h);
    out.j_doublet = 0.5 * (basis.e1 - basis.e0);
    out.u = g_gg / (2.0 * pi * l_h * l_h) * trapezoid(f4, basis.h);
    if (std::abs(out.j - out.j_doublet) > 1e-6 * std::abs(out.j_doublet)) {
        throw ResolutionError("hopping integral disagrees with the doublet splitting; refine the grid");
    }
    return out;
}

double mode_prefactor(const CavityGeometry& geom) {
    if (!(geom.sigma > 0.0) || !(geom.mirror_distance > 0.0) || !(geom.l_h > 0.0)) {
        throw DomainError("cavity geometry needs sigma, L and l_H > 0");
    }
    return (1.0 + std::exp(-geom.k * geom.k * geom.l_h * geom.l_h)) /
           (geom.mirror_distance * pi * geom.sigma * std::sqrt(geom.l_h * geom.l_h + geom.sigma * geom.sigma));
}

CavityCouplings cavity_couplings(const WannierBasis& basis, const CavityGeometry& geom) {
    const double prefactor = mode_prefactor(geom);
    if (geom.sigma < basis.h) throw ResolutionError("cavity waist below the grid spacing");
    const std::size_t n = basis.x.size();
    std::vector<double> f0(n), f12(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = std::exp(-basis.x[i] * basis.x[i] / (geom.sigma * geom.sigma));
        f0[i] = basis.w1[i] * basis.w1[i] * g;
        f12[i] = basis.w1[i] * basis.w2[i] * g;
    }
    CavityCouplings out;
    out.overlap_0 = trapezoid(f0, basis.h);
    out.overlap_12 = trapezoid(f12, basis.h);
    out.w0 = geom.u0 * prefactor * out.overlap_0;
    out.w12 = geom.u0 * prefactor * out.overlap_12;
    return out;
}

double barrier_width(const WannierBasis& basis) {
    const auto& spec = basis.spec;
    const double energy = 0.5 * (basis.e0 + basis.e1);
    if (!(spec.potential(0.0) > energy)) {
        throw DomainError("doublet lies above the barrier top; barrier width undefined");
    }
    double inside = 0.0;
    double outside = -1.0;
    for (double x : basis.x) {
        if (x <= 0.0) continue;
        if (spec.potential(x) < energy) {
            outside = x;
            break;
        }
        inside = x;
    }
    if (outside < 0.0) throw DomainError("no classical turning point inside the grid");
    for (int it = 0; it < 200 && outside - inside > 1e-15; ++it) {
        const double mid = 0.5 * (inside + outside);
        (spec.potential(mid) > energy ? inside : outside) = mid;
    }
    return 2.0 * 0.5 * (inside + outside);
}

std::vector<RatioPoint> ratio_scan(const WannierBasis& basis, const CavityGeometry& geom,
                                   const std::vector<double>& sigma_values) {
    if (sigma_values.size() < 2) throw DomainError("ratio_scan needs at least two sigma values");
    const double width = barrier_width(basis);
    std::vector<RatioPoint> out;
    out.reserve(sigma_values.size());
    for (double sigma : sigma_values) {
        CavityGeometry g = geom;
        g.sigma = sigma;
        const auto c = cavity_couplings(basis, g);
        out.push_back({sigma, sigma / width, c.overlap_12 / c.overlap_0});
    }
    return out;
}

ValidityReport two_mode_validity(const WannierBasis& basis, const CavityGeometry& geom, double xi_sq_max) {
    if (!(xi_sq_max >= 0.0)) throw DomainError("xi_sq_max must be >= 0");
    ValidityReport out;
    const std::size_t n = basis.x.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double density = 0.5 * (basis.w1[i] * basis.w1[i] + basis.w2[i] * basis.w2[i]);
        f[i] = density * std::exp(-basis.x[i] * basis.x[i] / (geom.sigma * geom.sigma));
    }
    out.mean_f2 = mode_prefactor(geom) * trapezoid(f, basis.h);
    const double shift = std::abs(geom.u0) * xi_sq_max * out.mean_f2;
    out.margin = shift == 0.0 ? std::numeric_limits<double>::infinity() : basis.delta_dw / shift;
    out.pass = out.margin >= 10.0;
    return out;
}

DimensionlessParams to_dimensionless(const HubbardParams& hubbard, const CavityGeometry& geom, int n_atoms) {
    if (!(hubbard.j > 0.0)) throw DomainError("to_dimensionless: J must be > 0");
    if (n_atoms < 1) throw DomainError("to_dimensionless: n_atoms must be >= 1");
    DimensionlessParams p;
    p.d_c = geom.delta_c / hubbard.j;
    p.w0 = hubbard.w0 * n_atoms / hubbard.j;
    p.w12 = hubbard.w12 * n_atoms / hubbard.j;
    p.u = hubbard.u * n_atoms / hubbard.j;
    p.e = geom.eta / hubbard.j;
    p.n_atoms = n_atoms;
    return p;
}

PhysicalCouplings from_dimensionless(const DimensionlessParams& params, double j) {
    if (!(j > 0.0)) throw DomainError("from_dimensionless: J must be > 0");
    return {params.d_c * j, params.e * j, params.w0 * j / params.n_atoms, params.w12 * j / params.n_atoms,
            params.u * j / params.n_atoms};
}

ParameterReport derive_parameters(const DoubleWellSpec& well, const CavityGeometry& cavity, double g_gg,
                                  int n_atoms, double xi_sq_max, int ratio_points) {
    ParameterReport r;
    r.well = well;
    r.cavity = cavity;
    const auto pairs = solve_double_well(well, 5);
    r.energies = pairs.energies;
    r.basis = build_wannier(pairs, well);
    const auto onsite = hubbard_from_basis(r.basis, g_gg, cavity.l_h);
    const auto couplings = cavity_couplings(r.basis, cavity);
    r.hubbard = {onsite.eps, onsite.j, onsite.u, couplings.w0, couplings.w12, g_gg};
    r.j_doublet = onsite.j_doublet;
    r.barrier_width = barrier_width(r.basis);
    r.dimensionless = to_dimensionless(r.hubbard, cavity, n_atoms);
    r.xi_sq_max = xi_sq_max;
    r.validity = two_mode_validity(r.basis, cavity, xi_sq_max);
    if (!r.validity.pass) r.warnings.emplace_back("two-mode validity margin below 10");
    if (std::abs(r.hubbard.w12) > std::abs(r.hubbard.w0)) r.warnings.emplace_back("|W12| > |W0|");
    for (auto& w : validate(r.dimensionless)) r.warnings.push_back(std::move(w));

    if (ratio_points >= 2) {
        std::vector<double> sigmas;
        for (int i = 0; i < ratio_points; ++i) {
            const double t = static_cast<double>(i) / (ratio_points - 1);
            sigmas.push_back(r.barrier_width * std::pow(10.0, -2.0 + 4.0 * t));
        }
        // Waists below the grid spacing are unresolved; keep the resolvable part.
        std::erase_if(sigmas, [&](double s) { return s < 4.0 * r.basis.h; });
        if (sigmas.size() >= 2) r.ratio_curve = ratio_scan(r.basis, cavity, sigmas);
    }
    return r;
}

} // namespace cavity_bjj
