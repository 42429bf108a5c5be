#pragma once

/**
 * @file config.hpp
 * @brief Run configuration shared by the command-line front end.
 *
 * Recognized JSON keys (all optional):
 *   surface        {a, eta, delta} object
 *   surface_file   path to such an object
 *   a_values       [float, ...]
 *   seed           {x0_init, phi, psi, xi}
 *   s_grid         [float, ...] or "lo:hi:n"
 *   tolerance      float (sets rtol and atol) | rtol, atol
 *   modes, moments, samples, jobs
 *   out            output directory
 *   sphere         {count, rng_seed}
 *   deltas         [float, ...]
 *   gap_point      [x0, y1, x2, y2, p_x0, p_y1, p_x2, p_y2]
 */

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainlab/io.hpp"

namespace chainlab {

struct RunConfig {
    json surface = json{{"a", 0.5}};
    std::vector<double> a_values;
    FamilySeed seed;
    std::vector<double> s_grid;
    double rtol = 1e-12;
    double atol = 1e-12;
    int modes = 8;
    int moments = 16;
    std::size_t samples = 512;
    std::string out = ".";
    unsigned jobs = 1;
    int sphere_count = 20;
    std::uint64_t rng_seed = 20240501;
    std::vector<double> deltas{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    PhasePoint gap_point{0.3, 0.2, {0.4, 0.3}, 0.7, -0.6, {0.5, -0.2}};

    Hypersurface hypersurface() const { return surface_from_json(surface); }
    std::shared_ptr<const Hypersurface> hypersurface_ptr() const {
        return std::make_shared<const Hypersurface>(hypersurface());
    }
    double surface_a() const { return surface.at("a").get<double>(); }

    void set_a(double a) {
        surface["a"] = a;
        a_values = {a};
    }

    IntegrationOptions integration() const {
        IntegrationOptions o;
        o.rtol = rtol;
        o.atol = atol;
        return o;
    }

    ScanOptions scan_options() const {
        ScanOptions o;
        o.integration = integration();
        o.jobs = jobs;
        return o;
    }

    ObstructionOptions obstruction_options() const {
        ObstructionOptions o;
        o.scan = scan_options();
        o.stationarity.modes = modes;
        o.stationarity.moments = moments;
        o.samples = samples;
        return o;
    }

    /// Throws ConfigError on any violated precondition.
    void validate() const {
        (void)hypersurface();
        const auto tol_ok = [](double x) { return x >= 1e-13 * (1 - 1e-9) && x <= 1e-6 * (1 + 1e-9); };
        if (!tol_ok(rtol) || !tol_ok(atol)) throw ConfigError("tolerances must lie in [1e-13, 1e-6]");
        for (double s : s_grid)
            if (!(s > 0.0 && s <= 0.3)) throw ConfigError("s-grid values must lie in (0, 0.3]");
        if (modes < 4) throw ConfigError("modes must be >= 4");
        if (moments < modes + 2) throw ConfigError("moments must be >= modes + 2");
        if (samples < 8 || (samples & (samples - 1)) != 0) throw ConfigError("samples must be a power of two");
        if (samples < static_cast<std::size_t>(8 * (modes + moments)))
            throw ConfigError("samples must be >= 8 (modes + moments)");
        if (jobs < 1) throw ConfigError("jobs must be >= 1");
        if (sphere_count < 1) throw ConfigError("sphere.count must be >= 1");
        for (double d : deltas)
            if (!(d > 0.0 && d <= 0.3)) throw ConfigError("deltas must lie in (0, 0.3]");
        for (double a : a_values)
            if (!std::isfinite(a)) throw ConfigError("a_values must be finite");
    }
};

inline RunConfig config_from_json(const json& j, const std::string& base_dir = ".") {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    static const std::set<std::string> known{"surface", "surface_file", "a_values", "seed",   "s_grid",
                                             "tolerance", "rtol",       "atol",     "modes",  "moments",
                                             "samples",  "jobs",         "out",      "sphere", "deltas",
                                             "gap_point"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");

    RunConfig c;
    const auto num = [&](const json& v, const char* what) {
        if (!v.is_number()) throw ConfigError(std::string("config: '") + what + "' must be a number");
        return v.get<double>();
    };
    const auto integer = [&](const json& v, const char* what) {
        if (!v.is_number_integer()) throw ConfigError(std::string("config: '") + what + "' must be an integer");
        return v.get<long long>();
    };
    const auto num_array = [&](const json& v, const char* what) {
        if (!v.is_array()) throw ConfigError(std::string("config: '") + what + "' must be an array");
        std::vector<double> out;
        for (const auto& x : v) out.push_back(num(x, what));
        return out;
    };

    if (j.contains("surface") && j.contains("surface_file"))
        throw ConfigError("config: give either 'surface' or 'surface_file'");
    if (j.contains("surface")) c.surface = j["surface"];
    if (j.contains("surface_file")) {
        if (!j["surface_file"].is_string()) throw ConfigError("config: 'surface_file' must be a string");
        std::string p = j["surface_file"].get<std::string>();
        if (!p.empty() && p.front() != '/') p = base_dir + "/" + p;
        c.surface = read_json_file(p);
    }
    (void)surface_from_json(c.surface);
    if (j.contains("a_values")) c.a_values = num_array(j["a_values"], "a_values");
    if (j.contains("seed")) c.seed = seed_from_json(j["seed"]);
    if (j.contains("s_grid")) {
        const json& g = j["s_grid"];
        c.s_grid = g.is_string() ? parse_grid(g.get<std::string>()) : num_array(g, "s_grid");
    }
    if (j.contains("tolerance")) c.rtol = c.atol = num(j["tolerance"], "tolerance");
    if (j.contains("rtol")) c.rtol = num(j["rtol"], "rtol");
    if (j.contains("atol")) c.atol = num(j["atol"], "atol");
    if (j.contains("modes")) c.modes = static_cast<int>(integer(j["modes"], "modes"));
    if (j.contains("moments")) c.moments = static_cast<int>(integer(j["moments"], "moments"));
    if (j.contains("samples")) {
        const long long n = integer(j["samples"], "samples");
        if (n < 0) throw ConfigError("config: 'samples' must be positive");
        c.samples = static_cast<std::size_t>(n);
    }
    if (j.contains("jobs")) {
        const long long n = integer(j["jobs"], "jobs");
        if (n < 1) throw ConfigError("config: 'jobs' must be >= 1");
        c.jobs = static_cast<unsigned>(n);
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw ConfigError("config: 'out' must be a string");
        c.out = j["out"].get<std::string>();
    }
    if (j.contains("sphere")) {
        const json& s = j["sphere"];
        if (!s.is_object()) throw ConfigError("config: 'sphere' must be an object");
        if (s.contains("count")) c.sphere_count = static_cast<int>(integer(s["count"], "sphere.count"));
        if (s.contains("rng_seed")) c.rng_seed = static_cast<std::uint64_t>(integer(s["rng_seed"], "sphere.rng_seed"));
    }
    if (j.contains("deltas")) c.deltas = num_array(j["deltas"], "deltas");
    if (j.contains("gap_point")) {
        const auto v = num_array(j["gap_point"], "gap_point");
        if (v.size() != 8) throw ConfigError("config: 'gap_point' needs eight numbers");
        State s;
        std::copy(v.begin(), v.end(), s.begin());
        c.gap_point = PhasePoint::from_state(s);
    }
    return c;
}

} // namespace chainlab
