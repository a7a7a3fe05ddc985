#include "cavity_bjj/errors.hpp"
#include "cavity_bjj/wannier.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cavity_bjj;

namespace {

const WannierBasis& default_basis() {
    static const WannierBasis basis = [] {
        const DoubleWellSpec spec;
        return build_wannier(solve_double_well(spec), spec);
    }();
    return basis;
}

CavityGeometry geometry(double sigma = 0.2) {
    CavityGeometry g;
    g.sigma = sigma;
    g.k = 2.0;
    g.mirror_distance = 50.0;
    g.l_h = 0.3;
    g.u0 = -1.0;
    return g;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

} // namespace

TEST(Wannier, HarmonicSpectrum) {
    DoubleWellSpec spec;
    spec.form = WellForm::harmonic_gaussian;
    spec.omega = 1.0;
    spec.barrier_height = 0.0;
    spec.half_width = 10.0;
    spec.points = 20001;
    const auto pairs = solve_double_well(spec, 3);
    for (int n = 0; n < 3; ++n) EXPECT_NEAR(pairs.energies[n], n + 0.5, 1e-6);
}

TEST(Wannier, ParityAndCountGuard) {
    const DoubleWellSpec spec;
    const auto pairs = solve_double_well(spec, 5);
    const auto& x = pairs.x;
    const std::size_t n = x.size();
    for (int k = 0; k < 5; ++k) {
        const double sign = k % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n; i += 97) EXPECT_NEAR(pairs.states[k][i], sign * pairs.states[k][n - 1 - i], 1e-8);
    }
    EXPECT_NEAR(pairs.x[(n - 1) / 2], 0.0, 0.0);
    EXPECT_THROW(solve_double_well(DoubleWellSpec{WellForm::quartic, 3.75, 1.0, 1.0, 0.0, 0.5, 4.0, 21}, 6), DomainError);
}

TEST(Wannier, SplittingDecreasesWithBarrier) {
    double previous = INFINITY;
    for (double v0 : {2.0, 3.0, 4.0, 6.0, 8.0, 12.0}) {
        DoubleWellSpec spec;
        spec.v0 = v0;
        spec.points = 4001;
        const auto pairs = solve_double_well(spec, 3);
        const double split = pairs.energies[1] - pairs.energies[0];
        EXPECT_LT(split, previous);
        previous = split;
    }
}

TEST(Wannier, BasisInvariants) {
    const auto& b = default_basis();
    const std::size_t n = b.x.size();
    std::vector<double> f11(n), f22(n), f12(n), left(n);
    for (std::size_t i = 0; i < n; ++i) {
        f11[i] = b.w1[i] * b.w1[i];
        f22[i] = b.w2[i] * b.w2[i];
        f12[i] = b.w1[i] * b.w2[i];
        left[i] = b.x[i] < 0.0 ? f11[i] : 0.0;
        EXPECT_NEAR(b.w2[i], b.w1[n - 1 - i], 1e-8);
    }
    EXPECT_NEAR(trapezoid(f11, b.h), 1.0, 1e-8);
    EXPECT_NEAR(trapezoid(f22, b.h), 1.0, 1e-8);
    EXPECT_NEAR(trapezoid(f12, b.h), 0.0, 1e-8);
    EXPECT_GT(b.delta_dw, 0.0);
    EXPECT_LT(std::abs(b.w1.front()), 1e-10);
    EXPECT_LT(std::abs(b.w1.back()), 1e-10);

    DoubleWellSpec deep;
    deep.v0 = 12.0;
    const auto db = build_wannier(solve_double_well(deep), deep);
    std::vector<double> mass(n);
    for (std::size_t i = 0; i < n; ++i) mass[i] = db.x[i] < 0.0 ? db.w1[i] * db.w1[i] : 0.0;
    EXPECT_GT(trapezoid(mass, db.h), 0.99);
}

TEST(Wannier, HubbardConstants) {
    const auto& b = default_basis();
    const auto onsite = hubbard_from_basis(b, 0.05, 0.3);
    EXPECT_NEAR(onsite.j, onsite.j_doublet, 1e-6 * onsite.j_doublet);
    EXPECT_GT(onsite.j, 0.0);
    EXPECT_GT(onsite.u, 0.0);
    EXPECT_EQ(hubbard_from_basis(b, 0.0, 0.3).u, 0.0);
    // calibration: hopping is about a tenth of the on-site energy above the transverse zero point
    const double ratio = onsite.j / (onsite.eps - 1.0 / (0.3 * 0.3));
    EXPECT_NEAR(ratio, 0.1, 0.005);
}

TEST(Wannier, CavityCouplingLimits) {
    const auto& b = default_basis();
    const double width = barrier_width(b);
    EXPECT_GT(width, 0.5);
    EXPECT_LT(width, 1.5);

    const auto narrow = cavity_couplings(b, geometry(0.05 * width));
    EXPECT_GT(narrow.w12 / narrow.w0, 0.98);

    const auto wide = cavity_couplings(b, geometry(100.0 * 2.0));
    EXPECT_LT(wide.w12 / wide.w0, 0.01);

    auto off = geometry();
    off.u0 = 0.0;
    const auto zero = cavity_couplings(b, off);
    EXPECT_EQ(zero.w0, 0.0);
    EXPECT_EQ(zero.w12, 0.0);
    EXPECT_THROW(cavity_couplings(b, geometry(0.5 * b.h)), ResolutionError);
}

TEST(Wannier, StarkShiftSymmetricInOrbitals) {
    const auto& b = default_basis();
    for (double sigma : {0.05, 0.2, 1.0, 5.0}) {
        const auto g = geometry(sigma);
        std::vector<double> f1(b.x.size()), f2(b.x.size());
        for (std::size_t i = 0; i < b.x.size(); ++i) {
            const double w = std::exp(-b.x[i] * b.x[i] / (sigma * sigma));
            f1[i] = b.w1[i] * b.w1[i] * w;
            f2[i] = b.w2[i] * b.w2[i] * w;
        }
        EXPECT_NEAR(trapezoid(f1, b.h), trapezoid(f2, b.h), 1e-10);
        const auto c = cavity_couplings(b, g);
        EXPECT_LE(std::abs(c.w12), std::abs(c.w0));
        EXPECT_LT(c.w0, 0.0);
        EXPECT_LT(c.w12, 0.0);
    }
}

TEST(Wannier, RatioScanMonotone) {
    const auto& b = default_basis();
    const double width = barrier_width(b);
    std::vector<double> sigmas;
    for (int i = 0; i < 50; ++i) sigmas.push_back(width * std::pow(10.0, -1.0 + 3.0 * i / 49.0));
    const auto curve = ratio_scan(b, geometry(), sigmas);
    ASSERT_EQ(curve.size(), 50u);
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i].ratio, curve[i - 1].ratio);
    for (const auto& p : curve) {
        EXPECT_GT(p.ratio, 0.0);
        EXPECT_LE(p.ratio, 1.0);
    }
    EXPECT_LT(curve.back().ratio, 0.5);
    EXPECT_THROW(ratio_scan(b, geometry(), {0.3}), DomainError);

    auto degenerate = b;
    degenerate.w2 = degenerate.w1;
    for (const auto& p : ratio_scan(degenerate, geometry(), {0.1, 1.0, 10.0})) EXPECT_DOUBLE_EQ(p.ratio, 1.0);
}

TEST(Wannier, ValidityMargin) {
    const auto& b = default_basis();
    EXPECT_TRUE(std::isinf(two_mode_validity(b, geometry(), 0.0).margin));
    auto off = geometry();
    off.u0 = 0.0;
    EXPECT_TRUE(std::isinf(two_mode_validity(b, off, 2.0).margin));
    const auto report = two_mode_validity(b, geometry(), 2.0);
    EXPECT_TRUE(std::isfinite(report.margin));
    EXPECT_GT(report.margin, 0.0);
    EXPECT_THROW(two_mode_validity(b, geometry(), -1.0), DomainError);
}

TEST(Wannier, DimensionlessBridge) {
    HubbardParams unit{0.0, 1.0, 0.012, -0.09, -0.03, 0.0};
    CavityGeometry g;
    g.delta_c = -100.0;
    g.eta = 20.0;
    const auto p = to_dimensionless(unit, g, 1000);
    EXPECT_NEAR(p.d_c, -100.0, 1e-12);
    EXPECT_NEAR(p.w0, -90.0, 1e-12);
    EXPECT_NEAR(p.w12, -30.0, 1e-12);
    EXPECT_NEAR(p.u, 12.0, 1e-12);
    EXPECT_NEAR(p.e, 20.0, 1e-12);

    HubbardParams doubled{0.0, 2.0, 0.024, -0.18, -0.06, 0.0};
    CavityGeometry g2 = g;
    g2.delta_c *= 2.0;
    g2.eta *= 2.0;
    const auto q = to_dimensionless(doubled, g2, 1000);
    EXPECT_NEAR(q.d_c, p.d_c, 1e-12);
    EXPECT_NEAR(q.u, p.u, 1e-12);

    const auto back = from_dimensionless(q, 2.0);
    EXPECT_NEAR(back.delta_c, g2.delta_c, 1e-12);
    EXPECT_NEAR(back.w0, doubled.w0, 1e-15);
    EXPECT_NEAR(back.u, doubled.u, 1e-15);

    unit.j = 0.0;
    EXPECT_THROW(to_dimensionless(unit, g, 10), DomainError);
}

TEST(Wannier, GridConvergence) {
    const auto& coarse = default_basis();
    DoubleWellSpec fine_spec;
    fine_spec.points = 2 * fine_spec.points - 1;
    const auto fine = build_wannier(solve_double_well(fine_spec), fine_spec);
    const auto a = hubbard_from_basis(coarse, 0.05, 0.3);
    const auto b = hubbard_from_basis(fine, 0.05, 0.3);
    EXPECT_LT(relative(a.eps, b.eps), 1e-6);
    EXPECT_LT(relative(a.j, b.j), 1e-6);
    EXPECT_LT(relative(a.u, b.u), 1e-6);
    const auto ca = cavity_couplings(coarse, geometry());
    const auto cb = cavity_couplings(fine, geometry());
    EXPECT_LT(relative(ca.w0, cb.w0), 1e-6);
    EXPECT_LT(relative(ca.w12, cb.w12), 1e-6);
}

TEST(Wannier, FullPipeline) {
    const auto report = derive_parameters(DoubleWellSpec{}, geometry(), 0.002, 1000, 2.0, 20);
    EXPECT_EQ(report.energies.size(), 5u);
    EXPECT_GT(report.dimensionless.u, 0.0);
    EXPECT_LT(report.dimensionless.w0, 0.0);
    EXPECT_GE(report.ratio_curve.size(), 2u);
    EXPECT_TRUE(report.validity.pass);
}
