#pragma once

// Phase portrait of the reduced model over (theta, z): adiabatic photon
// number per cell, reduced trajectories from seed points, the delta_C = 0
// separatrix and the stationary points.

#include "cavity_bjj/fixed_points.hpp"
#include "cavity_bjj/model.hpp"
#include "cavity_bjj/reduced.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace cavity_bjj {

struct PortraitSpec {
    int theta_points = 401;
    int z_points = 401;
    double cap_threshold = 1e-3;  ///< |delta_C| below this is capped and flagged
    double horizon = 30.0;
    double stride = 0.05;
    bool default_seeds = true;
    std::vector<std::array<double, 2>> seeds;  ///< extra (z, theta) seeds
    ode::Tolerances tolerances{1e-9, 1e-11};
    int threads = 0;  ///< 0: CAVITY_BJJ_THREADS, else hardware concurrency
};

struct PortraitTrajectory {
    double z0 = 0.0;
    double theta0 = 0.0;
    std::vector<std::array<double, 2>> points;  ///< (theta, z)
    bool truncated = false;
    std::string diagnostic;
};

struct PortraitGrid {
    std::vector<double> theta_axis;   ///< uniform over (-pi, pi]
    std::vector<double> z_axis;       ///< uniform over [-1, 1]
    std::vector<double> photon_map;   ///< index j * theta_points + i
    std::vector<double> detuning;     ///< delta_C per cell
    std::vector<std::uint8_t> capped;
    double cap_value = 0.0;
    std::vector<PortraitTrajectory> trajectories;
    std::vector<SeparatrixPoint> separatrix;
    std::vector<FixedPoint> fixed_points;

    std::size_t cell(std::size_t i_theta, std::size_t j_z) const { return j_z * theta_axis.size() + i_theta; }
};

/// 16 seeds: z in {-0.875, -0.625, ..., 0.875} at theta = 0 and theta = -pi.
std::vector<std::array<double, 2>> default_portrait_seeds();

/// Worker count from CAVITY_BJJ_THREADS (>= 1) or the hardware.
int worker_count();

PortraitGrid render_portrait(const DimensionlessParams& params, const PortraitSpec& spec = {});

/// 1000x1000 SVG: theta horizontal over (-pi, pi], z vertical over [-1, 1].
std::string portrait_svg(const PortraitGrid& grid);

} // namespace cavity_bjj
