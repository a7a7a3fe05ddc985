#include "cavity_bjj/errors.hpp"
#include "cavity_bjj/fixed_points.hpp"
#include "cavity_bjj/portrait.hpp"
#include "cavity_bjj/reduced.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cavity_bjj;

namespace {

DimensionlessParams reference_params() { return {-100.0, -90.0, -30.0, 12.0, 20.0, 1000}; }

} // namespace

TEST(Reduced, SubstitutionExamples) {
    const auto p = reference_params();
    EXPECT_DOUBLE_EQ(adiabatic_photon_number(p, 0.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(adiabatic_photon_number(p, 0.0, pi), 0.25);
    EXPECT_EQ(reduced_rhs(p, 0.0, 0.0).dz, 0.0);
    const auto curve = separatrix_curve(p, 16);
    EXPECT_THROW(reduced_rhs(p, curve[3].z, curve[3].theta), SingularityError);
}

TEST(Reduced, MatchesFullFieldAtAdiabaticPhoton) {
    const auto p = reference_params();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uz(-0.9, 0.9), ut(-pi, pi);
    for (int i = 0; i < 100; ++i) {
        const double z = uz(rng), theta = ut(rng);
        if (std::abs(effective_detuning(p, z, theta)) < 1.0) continue;
        const auto red = reduced_rhs(p, z, theta);
        const auto full = rhs_polar(p, adiabatic_initial_state(p, z, theta));
        EXPECT_NEAR(red.dz, full.z, 1e-10);
        EXPECT_NEAR(red.dtheta, full.theta, 1e-10);
    }
}

TEST(Reduced, PureJunctionIdentity) {
    const DimensionlessParams p{-100.0, -90.0, 0.0, 12.0, 20.0, 1000};
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> uz(-1.0, 1.0), ut(-pi, pi);
    for (int i = 0; i < 200; ++i) {
        const double z = uz(rng), theta = ut(rng);
        const double s = std::sqrt(1.0 - z * z);
        const std::array<double, 3> spin{s * std::cos(theta), s * std::sin(theta), z};
        const auto a = reduced_bloch_rhs(p, spin);
        const auto b = junction_bloch_rhs(spin, p.u, 1.0);
        for (int k = 0; k < 3; ++k) EXPECT_EQ(a[k], b[k]);
    }
    const auto red = integrate_reduced(p, 0.4, 0.3, 20.0);
    const auto bjj = pure_bjj(p.u, 0.4, 0.3, 20.0);
    ASSERT_EQ(red.samples.size(), bjj.samples.size());
    for (std::size_t i = 0; i < red.samples.size(); ++i) EXPECT_EQ(red.samples[i].z, bjj.samples[i].z);
}

TEST(Reduced, EnergyIsConserved) {
    const auto p = reference_params();
    for (auto [z0, t0] : {std::pair{0.0, 0.5}, std::pair{0.5, -pi}, std::pair{-0.3, 2.5}}) {
        ReducedOptions tight;
        tight.tolerances = {1e-12, 1e-14};
        const auto traj = integrate_reduced(p, z0, t0, 100.0, tight);
        ASSERT_FALSE(traj.truncated) << traj.diagnostic;
        EXPECT_LT(traj.energy_drift(), 1e-9);
        EXPECT_NEAR(traj.samples.front().energy, reduced_energy(p, z0, t0), 1e-9);
    }
}

TEST(Reduced, InteriorAndExteriorExamples) {
    const auto p = reference_params();
    const auto inside = integrate_reduced(p, 0.0, 0.5, 100.0);
    for (const auto& s : inside.samples) EXPECT_GT(s.delta_c_eff, 0.0);
    const auto outside = integrate_reduced(p, 0.5, -pi, 100.0);
    for (const auto& s : outside.samples) EXPECT_LT(s.delta_c_eff, 0.0);
}

// The exterior start keeps its reduced energy, which exceeds every exterior state on z = 0,
// so the adiabatic orbit stays trapped. Only the full model (photons starting empty) crosses.
TEST(Reduced, ExteriorStartStaysAboveZeroImbalance) {
    const auto p = reference_params();
    const double start = reduced_energy(p, 0.5, -pi);
    double ceiling = -1e300;
    for (int k = 0; k <= 20000; ++k) {
        const double theta = -pi + 2.0 * pi * k / 20000.0;
        if (effective_detuning(p, 0.0, theta) < 0.0) ceiling = std::max(ceiling, reduced_energy(p, 0.0, theta));
    }
    EXPECT_GT(start - ceiling, 0.5 * p.n_atoms);
    const auto outside = integrate_reduced(p, 0.5, -pi, 100.0);
    double z_min = 1.0;
    for (const auto& s : outside.samples) z_min = std::min(z_min, s.z);
    EXPECT_GT(z_min, 0.0);
    const auto full = integrate(p, {0.5, -pi, 0.0, 0.0}, 100.0);
    double full_min = 1.0;
    for (const auto& s : full.samples()) full_min = std::min(full_min, s.state.z);
    EXPECT_LT(full_min, 0.0);
}

TEST(Reduced, SeparatrixConfinesRandomInteriorSeeds) {
    const auto p = reference_params();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uz(-1.0, 1.0), ut(-pi, pi);
    int seeds = 0;
    while (seeds < 50) {
        const double z = uz(rng), theta = ut(rng);
        // nu grows like 1/delta^2, so seeds hugging the curve are kept out of a unit band
        if (!(effective_detuning(p, z, theta) > 1.0)) continue;
        ++seeds;
        const auto traj = integrate_reduced(p, z, theta, 100.0);
        ASSERT_FALSE(traj.truncated) << traj.diagnostic;
        for (const auto& s : traj.samples) ASSERT_GT(s.delta_c_eff, 0.0);
    }
}

TEST(Reduced, TrappingOracleExamples) {
    EXPECT_NEAR(bjj_energy(6.0, 0.5, -pi), 0.75 + std::sqrt(0.75), 1e-12);
    EXPECT_TRUE(self_trapped(0.5, -pi, 6.0));
    EXPECT_FALSE(self_trapped(0.5, 0.0, 6.0));
    EXPECT_FALSE(self_trapped(0.9, -pi, 0.0));
}

TEST(Reduced, TrappingOracleAgreesWithIntegration) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ul(0.0, 12.0), uz(0.05, 0.95), ut(-pi, pi);
    int checked = 0;
    while (checked < 100) {
        const double lambda = ul(rng), z0 = uz(rng), t0 = ut(rng);
        if (std::abs(bjj_energy(lambda, z0, t0) - 1.0) <= 0.05) continue;
        ++checked;
        const auto traj = pure_bjj(2.0 * lambda, z0, t0, 100.0);
        bool crossed = false;
        for (const auto& s : traj.samples) crossed = crossed || s.z < 0.0;
        EXPECT_EQ(self_trapped(z0, t0, lambda), !crossed) << lambda << " " << z0 << " " << t0;
    }
}

TEST(Reduced, FullVersusReduced) {
    const DimensionlessParams off{-100.0, 0.0, 0.0, 12.0, 0.0, 1000};
    const auto m = compare_full_vs_reduced(off, adiabatic_initial_state(off, 0.3, 0.2), 50.0);
    EXPECT_LT(m.max_dz, 1e-9);
    EXPECT_LT(m.max_dtheta, 1e-9);

    const auto p = reference_params();
    const auto inside = compare_full_vs_reduced(p, adiabatic_initial_state(p, 0.0, 0.5), 50.0);
    EXPECT_TRUE(inside.adiabatic_valid);
    EXPECT_GT(inside.min_abs_detuning, 10.0);

    const auto curve = separatrix_curve(p, 64);
    // just inside the ring
    const double zi = curve[5].z * 0.999, ti = curve[5].theta * 0.999;
    const auto near = compare_full_vs_reduced(p, adiabatic_initial_state(p, zi, ti), 20.0);
    EXPECT_FALSE(near.adiabatic_valid);
    EXPECT_NE(near.diagnostic.find("adiabatic elimination invalid"), std::string::npos);
    EXPECT_THROW(compare_full_vs_reduced(p, {0.0, 0.5, 0.0, 0.0}, 1.0), DomainError);
}

TEST(Portrait, RepulsiveGridSigns) {
    PortraitSpec spec;
    spec.theta_points = 101;
    spec.z_points = 81;
    spec.horizon = 5.0;
    const auto p = reference_params();
    const auto grid = render_portrait(p, spec);
    EXPECT_EQ(grid.trajectories.size(), 16u);
    EXPECT_GT(grid.separatrix.size(), 10u);
    EXPECT_DOUBLE_EQ(grid.theta_axis.back(), pi);
    EXPECT_GT(grid.theta_axis.front(), -pi);
    EXPECT_DOUBLE_EQ(grid.z_axis.front(), -1.0);
    EXPECT_DOUBLE_EQ(grid.z_axis.back(), 1.0);
    for (std::size_t j = 0; j < grid.z_axis.size(); ++j) {
        for (std::size_t i = 0; i < grid.theta_axis.size(); ++i) {
            const auto c = grid.cell(i, j);
            const double s = std::sqrt(1.0 - grid.z_axis[j] * grid.z_axis[j]);
            const bool inside = s * std::cos(grid.theta_axis[i]) > 1.0 / 3.0;
            if (!grid.capped[c]) {
                EXPECT_EQ(grid.detuning[c] > 0.0, inside);
                EXPECT_DOUBLE_EQ(grid.photon_map[c], 400.0 / (grid.detuning[c] * grid.detuning[c]));
            }
        }
    }
}

TEST(Portrait, ThreadCountDoesNotChangeResult) {
    PortraitSpec spec;
    spec.theta_points = 41;
    spec.z_points = 41;
    spec.horizon = 3.0;
    spec.threads = 1;
    const auto a = render_portrait(reference_params(), spec);
    spec.threads = 3;
    const auto b = render_portrait(reference_params(), spec);
    EXPECT_EQ(a.photon_map, b.photon_map);
    EXPECT_EQ(portrait_svg(a), portrait_svg(b));
}

TEST(Portrait, NoCavityCouplingAndAttractive) {
    auto p = reference_params();
    p.w12 = 0.0;
    PortraitSpec spec;
    spec.theta_points = 21;
    spec.z_points = 21;
    spec.horizon = 2.0;
    const auto flat = render_portrait(p, spec);
    EXPECT_TRUE(flat.separatrix.empty());
    for (double v : flat.photon_map) EXPECT_DOUBLE_EQ(v, flat.photon_map.front());

    p = reference_params();
    p.u = -12.0;
    const auto attractive = render_portrait(p, spec);
    bool theta_zero_imbalance = false;
    for (const auto& fp : attractive.fixed_points) {
        theta_zero_imbalance = theta_zero_imbalance || (fp.branch_theta == 0.0 && fp.z_sign != 0);
    }
    EXPECT_TRUE(theta_zero_imbalance);
    EXPECT_THROW(render_portrait(p, PortraitSpec{1, 5}), DomainError);
}
