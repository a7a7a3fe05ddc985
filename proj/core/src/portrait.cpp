#include "cavity_bjj/portrait.hpp"

#include "cavity_bjj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace cavity_bjj {

namespace {

template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
    const auto n = static_cast<std::size_t>(std::max(1, workers));
    if (n == 1 || count < 2) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < count; k += n) body(k);
        });
    }
    for (auto& t : pool) t.join();
}

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// Piecewise-linear dark-blue to yellow ramp.
std::array<int, 3> ramp(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double f = t - k;
    std::array<int, 3> rgb{};
    for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
    return rgb;
}

} // namespace

std::vector<std::array<double, 2>> default_portrait_seeds() {
    std::vector<std::array<double, 2>> seeds;
    for (double theta : {0.0, -pi}) {
        for (int k = 0; k < 8; ++k) seeds.push_back({-0.875 + 0.25 * k, theta});
    }
    return seeds;
}

int worker_count() {
    if (const char* env = std::getenv("CAVITY_BJJ_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

PortraitGrid render_portrait(const DimensionlessParams& params, const PortraitSpec& spec) {
    validate(params);
    if (spec.theta_points < 2 || spec.z_points < 2) throw DomainError("portrait grid must be at least 2x2");
    if (!(spec.cap_threshold > 0.0)) throw DomainError("portrait cap threshold must be > 0");
    const int workers = spec.threads > 0 ? spec.threads : worker_count();

    PortraitGrid grid;
    const auto nt = static_cast<std::size_t>(spec.theta_points);
    const auto nz = static_cast<std::size_t>(spec.z_points);
    for (std::size_t i = 0; i < nt; ++i) grid.theta_axis.push_back(-pi + 2.0 * pi * (i + 1.0) / nt);
    for (std::size_t j = 0; j < nz; ++j) grid.z_axis.push_back(-1.0 + 2.0 * j / (nz - 1.0));
    grid.photon_map.assign(nt * nz, 0.0);
    grid.detuning.assign(nt * nz, 0.0);
    grid.capped.assign(nt * nz, 0);
    grid.cap_value = params.e * params.e / (spec.cap_threshold * spec.cap_threshold);

    parallel_for(nz, workers, [&](std::size_t j) {
        const double z = grid.z_axis[j];
        for (std::size_t i = 0; i < nt; ++i) {
            const auto c = grid.cell(i, j);
            const double delta = effective_detuning(params, z, grid.theta_axis[i]);
            grid.detuning[c] = delta;
            if (std::abs(delta) < spec.cap_threshold) {
                grid.capped[c] = 1;
                grid.photon_map[c] = grid.cap_value;
            } else {
                grid.photon_map[c] = params.e * params.e / (delta * delta);
            }
        }
    });

    auto seeds = spec.default_seeds ? default_portrait_seeds() : std::vector<std::array<double, 2>>{};
    seeds.insert(seeds.end(), spec.seeds.begin(), spec.seeds.end());
    grid.trajectories.resize(seeds.size());
    ReducedOptions options;
    options.tolerances = spec.tolerances;
    options.stride = spec.stride;
    parallel_for(seeds.size(), workers, [&](std::size_t k) {
        auto& out = grid.trajectories[k];
        out.z0 = seeds[k][0];
        out.theta0 = seeds[k][1];
        try {
            const auto traj = integrate_reduced(params, out.z0, out.theta0, spec.horizon, options);
            out.truncated = traj.truncated;
            out.diagnostic = traj.diagnostic;
            for (const auto& s : traj.samples) out.points.push_back({s.theta, s.z});
        } catch (const Error& err) {
            out.truncated = true;
            out.diagnostic = err.what();
        }
    });

    if (params.w12 != 0.0) grid.separatrix = separatrix_curve(params, 720);
    grid.fixed_points = all_fixed_points(params).points;
    return grid;
}

std::string portrait_svg(const PortraitGrid& grid) {
    constexpr double size = 1000.0;
    const std::size_t nt = grid.theta_axis.size();
    const std::size_t nz = grid.z_axis.size();
    const double cw = size / nt;
    const double ch = size / nz;
    auto x_of = [&](double theta) { return (theta + pi) / (2.0 * pi) * size; };
    auto y_of = [&](double z) { return (1.0 - z) / 2.0 * size; };

    double vmax = 0.0;
    for (std::size_t c = 0; c < grid.photon_map.size(); ++c) {
        if (!grid.capped[c]) vmax = std::max(vmax, grid.photon_map[c]);
    }
    constexpr int levels = 64;
    auto level_of = [&](std::size_t c) {
        if (grid.capped[c]) return levels;
        if (vmax <= 0.0) return 0;
        const double t = std::log1p(grid.photon_map[c]) / std::log1p(vmax);
        return std::clamp(static_cast<int>(t * (levels - 1) + 0.5), 0, levels - 1);
    };
    auto color_of = [&](int level) -> std::string {
        if (level == levels) return "#ffffff";
        const auto rgb = ramp(static_cast<double>(level) / (levels - 1));
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
        return buf;
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n";
    svg += "<g id=\"photon-map\" shape-rendering=\"crispEdges\">\n";
    for (std::size_t j = 0; j < nz; ++j) {
        const double y = (nz - 1 - j) * ch;
        std::size_t i = 0;
        while (i < nt) {
            const int level = level_of(grid.cell(i, j));
            std::size_t run = i + 1;
            while (run < nt && level_of(grid.cell(run, j)) == level) ++run;
            svg += "<rect x=\"" + fixed(i * cw) + "\" y=\"" + fixed(y) + "\" width=\"" + fixed((run - i) * cw + 0.01) +
                   "\" height=\"" + fixed(ch + 0.01) + "\" fill=\"" + color_of(level) + "\"/>\n";
            i = run;
        }
    }
    svg += "</g>\n";

    auto polylines = [&](const std::vector<std::array<double, 2>>& pts, const std::string& attrs) {
        std::string out;
        std::string current;
        double last_theta = 0.0;
        auto flush = [&] {
            if (!current.empty()) out += "<polyline points=\"" + current + "\" " + attrs + "/>\n";
            current.clear();
        };
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (k > 0 && std::abs(pts[k][0] - last_theta) > pi) flush();
            if (!current.empty()) current += ' ';
            current += fixed(x_of(pts[k][0])) + "," + fixed(y_of(pts[k][1]));
            last_theta = pts[k][0];
        }
        flush();
        return out;
    };

    svg += "<g id=\"trajectories\">\n";
    for (const auto& t : grid.trajectories) {
        svg += polylines(t.points, "fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"");
    }
    svg += "</g>\n";

    svg += "<g id=\"separatrix\">\n";
    std::vector<std::array<double, 2>> sep;
    for (const auto& p : grid.separatrix) sep.push_back({p.theta, p.z});
    if (sep.size() > 1) svg += polylines(sep, "fill=\"none\" stroke=\"#d62728\" stroke-width=\"3\"");
    svg += "</g>\n";

    svg += "<g id=\"fixed-points\">\n";
    for (const auto& p : grid.fixed_points) {
        const double theta = p.state.theta <= -pi ? pi : p.state.theta;
        const std::string cx = fixed(x_of(theta));
        const std::string cy = fixed(y_of(p.state.z));
        svg += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"7\" fill=\"#ff7f0e\" stroke=\"#000000\"/>\n";
        svg += "<text x=\"" + cx + "\" y=\"" + cy + "\" dx=\"9\" dy=\"-9\" font-size=\"20\">" + to_string(p.label) +
               "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

} // namespace cavity_bjj
