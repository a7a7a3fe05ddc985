#pragma once

// Stationary states of the mean-field equations.
//
// Zero-imbalance points (z = 0, theta in {0, pi}, phi = +-pi/2) follow in
// closed form. Finite-imbalance points solve
//
//   s = -(2 cos(theta) / u) * nu(xi(s)),   xi(s) = e / |d_c - w0 - w12 s cos(theta)|,
//
// for s = sqrt(1 - z^2), which becomes a cubic in s once denominators are
// cleared. Labels follow the usual convention: X1/X2 (z=0, theta=0),
// X3/X4 (z=0, theta=pi), X5/X6 (z!=0, theta=0), X7/X8 (z!=0, theta=pi), with
// odd labels on the delta_C > 0 side and even labels on the delta_C < 0 side.

#include "cavity_bjj/dynamics.hpp"
#include "cavity_bjj/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cavity_bjj {

enum class FixedPointLabel { X1, X2, X3, X4, X5, X6, X7, X8 };

std::string to_string(FixedPointLabel label);

struct FixedPoint {
    FixedPointLabel label = FixedPointLabel::X1;
    MeanFieldState state;
    double branch_theta = 0.0;      ///< 0 or pi
    int z_sign = 0;                 ///< sign of z (0 on the zero-imbalance branch)
    int detuning_sign = 0;          ///< sign of delta_C at the point
    double delta_c_eff = 0.0;
    double residual = 0.0;          ///< ||rhs|| in the internal representation
    bool degenerate_photon = false; ///< e == 0: xi = 0 and phi is arbitrary
    bool degenerate_root = false;   ///< two roots of the cubic merged
    std::optional<StabilityReport> stability;
};

/// A candidate that the closed form produces but which is not physical.
struct RejectedCandidate {
    std::string label;
    std::string reason;
};

struct FixedPointSet {
    std::vector<FixedPoint> points;
    std::vector<RejectedCandidate> rejected;
    std::vector<std::string> diagnostics;
};

/// Internal-coordinate residual ||rhs(state)||.
double stationary_residual(const DimensionlessParams& params, const MeanFieldState& state);

FixedPointSet zero_imbalance_fixed_points(const DimensionlessParams& params);

/// Coefficients {a0, a1, a2, a3} of the cleared cubic for one branch
/// (cos_theta = +1 or -1), so that sum a_k s^k = 0.
std::array<double, 4> imbalance_cubic(const DimensionlessParams& params, double cos_theta);

/// Un-cleared stationarity condition g(s) = s + (2 cos(theta)/u) nu(xi(s)).
double imbalance_condition(const DimensionlessParams& params, double cos_theta, double s);

/// Real roots of a polynomial with coefficients {a0, a1, ..., an} via the
/// eigenvalues of its companion matrix. Leading exact zeros are stripped.
std::vector<std::complex<double>> polynomial_roots(std::vector<double> coefficients);

FixedPointSet finite_imbalance_fixed_points(const DimensionlessParams& params);

/// Union of both families.
FixedPointSet all_fixed_points(const DimensionlessParams& params);

struct SeparatrixPoint {
    double theta = 0.0;
    double z = 0.0;
};

/// The delta_C = 0 locus sqrt(1-z^2) cos(theta) = (d_c - w0)/w12 as a closed
/// polyline in (theta, z). Empty when |ratio| > 1; a single point when
/// |ratio| = 1. Throws DomainError when w12 == 0.
std::vector<SeparatrixPoint> separatrix_curve(const DimensionlessParams& params, std::size_t n_points);

/// Smallest Euclidean distance in the (theta, z) plane from a point to a
/// polyline (theta differences wrapped to (-pi, pi]). Infinity for an empty curve.
double distance_to_curve(const std::vector<SeparatrixPoint>& curve, double theta, double z);

struct FixedPointCheck {
    FixedPoint point;
    bool accepted = false;        ///< residual < 1e-10
    bool near_separatrix = false; ///< within 0.05 of the delta_C = 0 curve
    double separatrix_distance = 0.0;
};

/// Re-evaluates residuals, attaches stability reports to stationary points
/// and flags proximity to the separatrix.
std::vector<FixedPointCheck> verify_fixed_points(const DimensionlessParams& params,
                                                 const std::vector<FixedPoint>& points);

} // namespace cavity_bjj
