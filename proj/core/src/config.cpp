#include "cavity_bjj/config.hpp"

#include "cavity_bjj/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cavity_bjj {

namespace {

std::optional<double> parse_plain(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

class Reader {
public:
    std::vector<std::string> problems;

    static std::string where(const YAML::Node& node) {
        const auto mark = node.Mark();
        if (mark.line < 0) return "";
        return std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1) + ": ";
    }

    void fail(const YAML::Node& node, const std::string& message) { problems.push_back(where(node) + message); }

    bool expect_map(const YAML::Node& node, const std::string& name) {
        if (node.IsMap()) return true;
        fail(node, "'" + name + "' must be a mapping");
        return false;
    }

    void check_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) {
        for (const auto& item : node) {
            const auto key = item.first.Scalar();
            if (!allowed.count(key)) {
                fail(item.first, "unknown key '" + key + "'" + (section.empty() ? "" : " in '" + section + "'"));
            }
        }
    }

    bool real(const YAML::Node& parent, const std::string& key, double& out) {
        const auto node = parent[key];
        if (!node) return false;
        if (!node.IsScalar()) {
            fail(node, "'" + key + "' must be a number");
            return false;
        }
        const auto value = parse_real(node.Scalar());
        if (!value) {
            fail(node, "'" + key + "' must be a number, got \"" + node.Scalar() + "\"");
            return false;
        }
        out = *value;
        return true;
    }

    bool integer(const YAML::Node& parent, const std::string& key, int& out) {
        const auto node = parent[key];
        if (!node) return false;
        const auto text = node.IsScalar() ? node.Scalar() : std::string{};
        int value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
            fail(node, "'" + key + "' must be an integer, got \"" + text + "\"");
            return false;
        }
        out = value;
        return true;
    }

    bool boolean(const YAML::Node& parent, const std::string& key, bool& out) {
        const auto node = parent[key];
        if (!node) return false;
        const auto text = node.IsScalar() ? node.Scalar() : std::string{};
        if (text == "true") {
            out = true;
        } else if (text == "false") {
            out = false;
        } else {
            fail(node, "'" + key + "' must be true or false, got \"" + text + "\"");
            return false;
        }
        return true;
    }

    bool string(const YAML::Node& parent, const std::string& key, std::string& out) {
        const auto node = parent[key];
        if (!node) return false;
        if (!node.IsScalar()) {
            fail(node, "'" + key + "' must be a string");
            return false;
        }
        out = node.Scalar();
        return true;
    }

    void require(const YAML::Node& parent, const std::string& section, const std::string& key) {
        if (!parent[key]) fail(parent, "missing required key '" + key + "' in '" + section + "'");
    }

    void check(bool ok, const YAML::Node& node, const std::string& message) {
        if (!ok) fail(node, message);
    }
};

DimensionlessParams read_params(Reader& r, const YAML::Node& node) {
    DimensionlessParams p;
    if (!r.expect_map(node, "params")) return p;
    r.check_keys(node, "params", {"d_c", "w0", "w12", "u", "e", "n_atoms"});
    for (const char* key : {"d_c", "w0", "w12", "u", "e", "n_atoms"}) r.require(node, "params", key);
    r.real(node, "d_c", p.d_c);
    r.real(node, "w0", p.w0);
    r.real(node, "w12", p.w12);
    r.real(node, "u", p.u);
    if (r.real(node, "e", p.e)) r.check(p.e >= 0.0, node["e"], "'e' must be >= 0");
    if (r.integer(node, "n_atoms", p.n_atoms)) r.check(p.n_atoms >= 1, node["n_atoms"], "'n_atoms' must be >= 1");
    return p;
}

DerivedSource read_derived(Reader& r, const YAML::Node& node) {
    DerivedSource d;
    if (!r.expect_map(node, "derived")) return d;
    r.check_keys(node, "derived", {"well", "cavity", "g_gg", "n_atoms", "xi_sq_max", "ratio_points"});
    r.require(node, "derived", "n_atoms");
    r.real(node, "g_gg", d.g_gg);
    if (r.integer(node, "n_atoms", d.n_atoms)) r.check(d.n_atoms >= 1, node["n_atoms"], "'n_atoms' must be >= 1");
    if (r.real(node, "xi_sq_max", d.xi_sq_max)) {
        r.check(d.xi_sq_max >= 0.0, node["xi_sq_max"], "'xi_sq_max' must be >= 0");
    }
    if (r.integer(node, "ratio_points", d.ratio_points)) {
        r.check(d.ratio_points == 0 || d.ratio_points >= 2, node["ratio_points"], "'ratio_points' must be 0 or >= 2");
    }

    if (const auto well = node["well"]; well && r.expect_map(well, "well")) {
        r.check_keys(well, "well",
                     {"form", "v0", "a", "omega", "barrier_height", "barrier_width", "half_width", "points"});
        std::string form = "quartic";
        if (r.string(well, "form", form)) {
            if (form == "quartic") {
                d.well.form = WellForm::quartic;
            } else if (form == "harmonic_gaussian") {
                d.well.form = WellForm::harmonic_gaussian;
            } else {
                r.fail(well["form"], "'form' must be quartic or harmonic_gaussian, got \"" + form + "\"");
            }
        }
        r.real(well, "v0", d.well.v0);
        if (r.real(well, "a", d.well.a)) r.check(d.well.a > 0.0, well["a"], "'a' must be > 0");
        r.real(well, "omega", d.well.omega);
        r.real(well, "barrier_height", d.well.barrier_height);
        if (r.real(well, "barrier_width", d.well.barrier_width)) {
            r.check(d.well.barrier_width > 0.0, well["barrier_width"], "'barrier_width' must be > 0");
        }
        if (r.real(well, "half_width", d.well.half_width)) {
            r.check(d.well.half_width > 0.0, well["half_width"], "'half_width' must be > 0");
        }
        if (r.integer(well, "points", d.well.points)) {
            r.check(d.well.points >= 21 && d.well.points % 2 == 1, well["points"], "'points' must be odd and >= 21");
        }
    }
    if (const auto cav = node["cavity"]; cav && r.expect_map(cav, "cavity")) {
        r.check_keys(cav, "cavity", {"sigma", "k", "mirror_distance", "l_h", "u0", "eta", "delta_c"});
        if (r.real(cav, "sigma", d.cavity.sigma)) r.check(d.cavity.sigma > 0.0, cav["sigma"], "'sigma' must be > 0");
        r.real(cav, "k", d.cavity.k);
        if (r.real(cav, "mirror_distance", d.cavity.mirror_distance)) {
            r.check(d.cavity.mirror_distance > 0.0, cav["mirror_distance"], "'mirror_distance' must be > 0");
        }
        if (r.real(cav, "l_h", d.cavity.l_h)) r.check(d.cavity.l_h > 0.0, cav["l_h"], "'l_h' must be > 0");
        r.real(cav, "u0", d.cavity.u0);
        if (r.real(cav, "eta", d.cavity.eta)) r.check(d.cavity.eta >= 0.0, cav["eta"], "'eta' must be >= 0");
        r.real(cav, "delta_c", d.cavity.delta_c);
    }
    return d;
}

void read_tolerances(Reader& r, const YAML::Node& node, ode::Tolerances& tol) {
    if (r.real(node, "rtol", tol.rtol)) r.check(tol.rtol > 0.0, node["rtol"], "'rtol' must be > 0");
    if (r.real(node, "atol", tol.atol)) r.check(tol.atol > 0.0, node["atol"], "'atol' must be > 0");
}

void read_positive(Reader& r, const YAML::Node& node, const std::string& key, double& out) {
    if (r.real(node, key, out)) r.check(out > 0.0, node[key], "'" + key + "' must be > 0");
}

} // namespace

std::optional<double> parse_real(const std::string& raw) {
    const std::string text = trim(raw);
    if (auto plain = parse_plain(text)) {
        if (std::isfinite(*plain)) return plain;
        return std::nullopt;
    }
    // [sign][coef*]pi[/den]
    std::string_view s = text;
    double sign = 1.0;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        if (s.front() == '-') sign = -1.0;
        s.remove_prefix(1);
    }
    const auto pi_pos = s.find("pi");
    if (pi_pos == std::string_view::npos) return std::nullopt;
    double coef = 1.0;
    if (pi_pos > 0) {
        if (s[pi_pos - 1] != '*') return std::nullopt;
        const auto c = parse_plain(s.substr(0, pi_pos - 1));
        if (!c) return std::nullopt;
        coef = *c;
    }
    auto rest = s.substr(pi_pos + 2);
    double den = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/') return std::nullopt;
        const auto d = parse_plain(rest.substr(1));
        if (!d || *d == 0.0) return std::nullopt;
        den = *d;
    }
    return sign * coef * pi / den;
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& err) {
        throw ConfigError({std::to_string(err.mark.line + 1) + ":" + std::to_string(err.mark.column + 1) +
                           ": syntax error: " + err.msg});
    }
    if (!root.IsMap()) throw ConfigError({"configuration must be a mapping of sections"});

    Reader r;
    RunConfig cfg;
    r.check_keys(root, "", {"scenario", "params", "derived", "initial", "integration", "portrait", "reduced",
                            "quantum", "output"});
    r.string(root, "scenario", cfg.scenario);

    const auto params = root["params"];
    const auto derived = root["derived"];
    if (params && derived) {
        r.fail(derived, "both 'params' and 'derived' given; use exactly one parameter source");
    } else if (!params && !derived) {
        r.fail(root, "missing parameter source: give either 'params' or 'derived'");
    }
    if (params) cfg.params = read_params(r, params);
    if (derived) cfg.derived = read_derived(r, derived);

    if (const auto init = root["initial"]; init && r.expect_map(init, "initial")) {
        r.check_keys(init, "initial", {"z", "theta", "xi", "phi"});
        if (r.real(init, "z", cfg.initial.z)) {
            r.check(std::abs(cfg.initial.z) <= 1.0, init["z"], "'z' must lie in [-1, 1]");
        }
        r.real(init, "theta", cfg.initial.theta);
        if (r.real(init, "xi", cfg.initial.xi)) r.check(cfg.initial.xi >= 0.0, init["xi"], "'xi' must be >= 0");
        r.real(init, "phi", cfg.initial.phi);
    }

    if (const auto sec = root["integration"]; sec && r.expect_map(sec, "integration")) {
        r.check_keys(sec, "integration", {"horizon", "stride", "rtol", "atol"});
        read_positive(r, sec, "horizon", cfg.integration.horizon);
        read_positive(r, sec, "stride", cfg.integration.stride);
        read_tolerances(r, sec, cfg.integration.tolerances);
    }

    if (const auto sec = root["portrait"]; sec && r.expect_map(sec, "portrait")) {
        auto& p = cfg.portrait;
        r.check_keys(sec, "portrait",
                     {"theta_points", "z_points", "cap_threshold", "horizon", "stride", "default_seeds", "seeds"});
        if (r.integer(sec, "theta_points", p.theta_points)) {
            r.check(p.theta_points >= 2, sec["theta_points"], "'theta_points' must be >= 2");
        }
        if (r.integer(sec, "z_points", p.z_points)) r.check(p.z_points >= 2, sec["z_points"], "'z_points' must be >= 2");
        read_positive(r, sec, "cap_threshold", p.cap_threshold);
        read_positive(r, sec, "horizon", p.horizon);
        read_positive(r, sec, "stride", p.stride);
        r.boolean(sec, "default_seeds", p.default_seeds);
        if (const auto seeds = sec["seeds"]) {
            if (!seeds.IsSequence()) {
                r.fail(seeds, "'seeds' must be a list of [z, theta] pairs");
            } else {
                for (const auto& seed : seeds) {
                    std::optional<double> z, theta;
                    if (seed.IsSequence() && seed.size() == 2 && seed[0].IsScalar() && seed[1].IsScalar()) {
                        z = parse_real(seed[0].Scalar());
                        theta = parse_real(seed[1].Scalar());
                    }
                    if (!z || !theta) {
                        r.fail(seed, "seed must be a [z, theta] pair of numbers");
                    } else if (std::abs(*z) > 1.0) {
                        r.fail(seed, "seed z must lie in [-1, 1]");
                    } else {
                        p.seeds.push_back({*z, *theta});
                    }
                }
            }
        }
    }

    if (const auto sec = root["reduced"]; sec && r.expect_map(sec, "reduced")) {
        r.check_keys(sec, "reduced", {"horizon", "stride", "singularity_floor", "compare"});
        read_positive(r, sec, "horizon", cfg.reduced.horizon);
        read_positive(r, sec, "stride", cfg.reduced.stride);
        read_positive(r, sec, "singularity_floor", cfg.reduced.singularity_floor);
        r.boolean(sec, "compare", cfg.reduced.compare);
    }

    if (const auto sec = root["quantum"]; sec && r.expect_map(sec, "quantum")) {
        auto& q = cfg.quantum;
        r.check_keys(sec, "quantum", {"n_atoms", "photon_cutoff", "horizon", "stride", "tolerance"});
        if (r.integer(sec, "n_atoms", q.n_atoms)) {
            r.check(q.n_atoms >= 1 && q.n_atoms <= 60, sec["n_atoms"], "'n_atoms' must lie in [1, 60]");
        }
        int cutoff = 0;
        if (r.integer(sec, "photon_cutoff", cutoff)) {
            r.check(cutoff >= 0, sec["photon_cutoff"], "'photon_cutoff' must be >= 0");
            q.photon_cutoff = cutoff;
        }
        if (r.real(sec, "horizon", q.horizon)) r.check(q.horizon >= 0.0, sec["horizon"], "'horizon' must be >= 0");
        read_positive(r, sec, "stride", q.stride);
        read_positive(r, sec, "tolerance", q.tolerance);
    }

    if (const auto sec = root["output"]; sec && r.expect_map(sec, "output")) {
        r.check_keys(sec, "output", {"dir"});
        r.string(sec, "dir", cfg.output_dir);
    }

    if (!r.problems.empty()) throw ConfigError(r.problems);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot read configuration file '" + path + "'"});
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config(buffer.str());
    } catch (const ConfigError& err) {
        std::vector<std::string> located;
        for (const auto& p : err.problems()) located.push_back(path + ":" + p);
        throw ConfigError(located);
    }
}

} // namespace cavity_bjj
