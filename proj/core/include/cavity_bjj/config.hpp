#pragma once

// Run configuration. The file format is YAML (block or flow style); see
// README.md for the full key reference. Every real-valued field accepts the
// symbolic forms `pi`, `-pi`, `pi/2`, `3*pi/4`, `-2*pi`. Unknown keys are
// rejected and all problems are reported together.

#include "cavity_bjj/model.hpp"
#include "cavity_bjj/ode.hpp"
#include "cavity_bjj/wannier.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cavity_bjj {

struct DerivedSource {
    DoubleWellSpec well;
    CavityGeometry cavity;
    double g_gg = 0.0;
    int n_atoms = 1;
    double xi_sq_max = 0.0;
    int ratio_points = 50;
};

struct IntegrationSection {
    double horizon = 100.0;
    double stride = 0.1;
    ode::Tolerances tolerances{};
};

struct PortraitSection {
    int theta_points = 401;
    int z_points = 401;
    double cap_threshold = 1e-3;
    double horizon = 30.0;
    double stride = 0.05;
    bool default_seeds = true;
    std::vector<std::array<double, 2>> seeds;  ///< (z, theta)
};

struct ReducedSection {
    double horizon = 100.0;
    double stride = 0.05;
    double singularity_floor = 1e-6;
    bool compare = true;
};

struct QuantumSection {
    int n_atoms = 10;
    std::optional<int> photon_cutoff;  ///< default max(20, ceil(8 xi^2))
    double horizon = 10.0;
    double stride = 0.1;
    double tolerance = 1e-10;
};

struct RunConfig {
    std::string scenario = "run";
    std::optional<DimensionlessParams> params;
    std::optional<DerivedSource> derived;
    MeanFieldState initial{};
    IntegrationSection integration;
    PortraitSection portrait;
    ReducedSection reduced;
    QuantumSection quantum;
    std::string output_dir = "out";
};

/// Parses and validates. Throws ConfigError listing every problem with its
/// line:column location.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Parses a real number or a symbolic multiple of pi. Returns nullopt on failure.
std::optional<double> parse_real(const std::string& text);

} // namespace cavity_bjj
