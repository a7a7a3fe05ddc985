#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with PI step-size control and
// the fourth-order continuous extension, for fixed-size real systems. The
// error norm is the scaled max-norm, so identically-zero components never
// influence the step sequence.
//
// Output is delivered through an observer at uniformly spaced sample times
// t0 + k*stride (direction aware), so sampling is independent of the
// adaptive step sequence. Integration runs forward or backward in time.

#include "cavity_bjj/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

namespace cavity_bjj::ode {

template <std::size_t N>
using Vector = std::array<double, N>;

struct Tolerances {
    double rtol = 1e-10;
    double atol = 1e-12;
};

struct Options {
    Tolerances tolerances{};
    double initial_step = 0.0;   ///< 0 selects the step automatically
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
    double fixed_step = 0.0;     ///< > 0 disables error control (order studies)
};

struct Statistics {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    double min_step = std::numeric_limits<double>::infinity();
    double max_step = 0.0;
    /// Sum of the max-norm local error estimates of all accepted steps.
    double error_estimate = 0.0;
};

namespace detail {

// Butcher tableau of Dormand & Prince (1980), dense output per Hairer & Wanner.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<Vector<N>, 5> coeffs{};

    Vector<N> at(double t) const {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        Vector<N> y{};
        for (std::size_t i = 0; i < N; ++i) {
            const auto& c = coeffs;
            y[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
        }
        return y;
    }
};

} // namespace detail

/// Integrates dy/dt = rhs(t, y) from t0 to t1.
///
/// `rhs` has signature `Vector<N>(double t, const Vector<N>& y)`; `observer`
/// has signature `void(double t, const Vector<N>& y)`. With stride > 0 the
/// observer sees t0 + k*stride for every k with the sample inside [t0, t1],
/// then t1 itself when it is not already on the lattice. With stride == 0 it
/// sees t0 and the end of every accepted step. Returns step statistics;
/// throws IntegrationError on step-size underflow or an exhausted budget.
template <std::size_t N, class Rhs, class Observer>
Statistics integrate(Rhs&& rhs, Vector<N> y, double t0, double t1, double stride,
                     Observer&& observer, const Options& options = {}) {
    using detail::DenseStep;
    namespace k = detail;

    Statistics stats;
    const double span = t1 - t0;
    const double dir = span >= 0.0 ? 1.0 : -1.0;
    const double length = std::abs(span);

    std::size_t next_sample = 0;
    std::size_t n_lattice = 0;
    if (stride > 0.0) n_lattice = static_cast<std::size_t>(std::floor(length / stride + 1e-9));
    const bool end_on_lattice =
        stride > 0.0 && std::abs(static_cast<double>(n_lattice) * stride - length) <= 1e-9 * stride;
    auto sample_time = [&](std::size_t k_sample) {
        if (k_sample == n_lattice && end_on_lattice) return t1;
        if (k_sample > n_lattice) return t1;
        return t0 + dir * static_cast<double>(k_sample) * stride;
    };
    const std::size_t total_samples = stride > 0.0 ? n_lattice + 1 + (end_on_lattice ? 0 : 1) : 0;

    observer(t0, y);
    if (stride > 0.0) next_sample = 1;
    if (length == 0.0) return stats;

    const auto& tol = options.tolerances;
    auto scale = [&](double a, double b) { return tol.atol + tol.rtol * std::max(std::abs(a), std::abs(b)); };

    Vector<N> k1 = rhs(t0, y);
    ++stats.rhs_evaluations;

    double h;
    if (options.fixed_step > 0.0) {
        h = options.fixed_step;
    } else if (options.initial_step > 0.0) {
        h = options.initial_step;
    } else {
        // Hairer's starting-step heuristic.
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = tol.atol + tol.rtol * std::abs(y[i]);
            d0 = std::max(d0, std::abs(y[i]) / sk);
            d1 = std::max(d1, std::abs(k1[i]) / sk);
        }
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, length);
        Vector<N> y1{};
        for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h0 * k1[i];
        const Vector<N> f1 = rhs(t0 + dir * h0, y1);
        ++stats.rhs_evaluations;
        double d2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = tol.atol + tol.rtol * std::abs(y[i]);
            d2 = std::max(d2, std::abs(f1[i] - k1[i]) / sk);
        }
        d2 /= h0;
        const double dmax = std::max(d1, d2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
        h = std::min(100.0 * h0, h1);
    }
    h = std::min(h, options.max_step);

    constexpr double safety = 0.9;
    constexpr double beta = 0.04;
    constexpr double expo = 0.2 - beta * 0.75;
    constexpr double fac_min = 0.2;   // largest shrink is 1/5
    constexpr double fac_max = 10.0;  // largest growth
    double err_old = 1e-4;
    bool last_rejected = false;

    double t = t0;
    std::size_t steps = 0;
    DenseStep<N> dense;

    while (dir * (t1 - t) > 0.0) {
        if (++steps > options.max_steps) {
            throw IntegrationError("step budget exhausted", t);
        }
        const double remaining = std::abs(t1 - t);
        bool final_step = false;
        if (h >= remaining * (1.0 - 1e-13)) {
            h = remaining;
            final_step = true;
        }
        if (!final_step && h < 1e-14 * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "step size underflow at t=" << t << " (h=" << h << ")";
            throw IntegrationError(msg.str(), t);
        }
        const double hs = dir * h;

        Vector<N> yt{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, y_new{};
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * k::a21 * k1[i];
        k2 = rhs(t + k::c2 * hs, yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (k::a31 * k1[i] + k::a32 * k2[i]);
        k3 = rhs(t + k::c3 * hs, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (k::a41 * k1[i] + k::a42 * k2[i] + k::a43 * k3[i]);
        k4 = rhs(t + k::c4 * hs, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (k::a51 * k1[i] + k::a52 * k2[i] + k::a53 * k3[i] + k::a54 * k4[i]);
        k5 = rhs(t + k::c5 * hs, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (k::a61 * k1[i] + k::a62 * k2[i] + k::a63 * k3[i] + k::a64 * k4[i] +
                                 k::a65 * k5[i]);
        k6 = rhs(t + hs, yt);
        for (std::size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + hs * (k::a71 * k1[i] + k::a73 * k3[i] + k::a74 * k4[i] + k::a75 * k5[i] +
                                    k::a76 * k6[i]);
        const double t_new = final_step ? t1 : t + hs;
        k7 = rhs(t_new, y_new);
        stats.rhs_evaluations += 6;

        double err = 0.0;
        double err_max = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = hs * (k::e1 * k1[i] + k::e3 * k3[i] + k::e4 * k4[i] + k::e5 * k5[i] +
                                    k::e6 * k6[i] + k::e7 * k7[i]);
            err = std::max(err, std::abs(ei) / scale(y[i], y_new[i]));
            err_max = std::max(err_max, std::abs(ei));
        }

        const bool fixed = options.fixed_step > 0.0;
        if (!std::isfinite(err) && !fixed) {
            h *= fac_min;
            ++stats.rejected;
            last_rejected = true;
            continue;
        }

        if (fixed || err <= 1.0) {
            dense.t0 = t;
            dense.h = t_new - t;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = y_new[i] - y[i];
                const double bspl = hs * k1[i] - ydiff;
                dense.coeffs[0][i] = y[i];
                dense.coeffs[1][i] = ydiff;
                dense.coeffs[2][i] = bspl;
                dense.coeffs[3][i] = ydiff - hs * k7[i] - bspl;
                dense.coeffs[4][i] = hs * (k::d1 * k1[i] + k::d3 * k3[i] + k::d4 * k4[i] + k::d5 * k5[i] +
                                           k::d6 * k6[i] + k::d7 * k7[i]);
            }

            ++stats.accepted;
            stats.min_step = std::min(stats.min_step, h);
            stats.max_step = std::max(stats.max_step, h);
            stats.error_estimate += err_max;

            if (stride > 0.0) {
                while (next_sample < total_samples) {
                    const double ts = sample_time(next_sample);
                    if (dir * (ts - t_new) > 0.0) break;
                    observer(ts, ts == t_new ? y_new : dense.at(ts));
                    ++next_sample;
                }
            } else {
                observer(t_new, y_new);
            }

            y = y_new;
            k1 = k7;
            t = t_new;
            if (fixed) continue;

            const double e = std::max(err, 1e-10);
            double fac = std::pow(e, expo) / std::pow(err_old, beta);
            fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
            double h_new = h / fac;
            if (last_rejected) h_new = std::min(h_new, h);
            err_old = e;
            last_rejected = false;
            h = std::min(h_new, options.max_step);
        } else {
            const double fac = std::min(1.0 / fac_min, std::pow(err, 0.2) / safety);
            h /= fac;
            ++stats.rejected;
            last_rejected = true;
        }
    }
    return stats;
}

} // namespace cavity_bjj::ode
