#pragma once

/**
 * @file io.hpp
 * @brief JSON/CSV readers and writers for surfaces, seeds, trajectories and
 *        reports. Output is deterministic: keys sorted, doubles round-trip.
 */

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainlab/flow.hpp"
#include "chainlab/moments.hpp"
#include "chainlab/surface.hpp"

namespace chainlab {

using json = nlohmann::json;

/// Malformed user input (bad JSON, wrong shapes, violated preconditions).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

namespace detail {

inline double number_at(const json& row, std::size_t i, const char* what) {
    if (!row.is_array() || row.size() <= i || !row[i].is_number())
        throw ConfigError(std::string("surface: malformed ") + what + " entry");
    return row[i].get<double>();
}

inline int exponent_at(const json& row, std::size_t i, const char* what) {
    const double v = number_at(row, i, what);
    if (v < 0 || v != static_cast<int>(v)) throw ConfigError(std::string("surface: bad exponent in ") + what);
    return static_cast<int>(v);
}

} // namespace detail

/// {a: float, eta: [[k, alpha, beta, re, im], ...], delta: [[alpha, beta, re, im], ...]}
inline Hypersurface surface_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("surface: expected an object");
    if (!j.contains("a") || !j["a"].is_number()) throw ConfigError("surface: missing numeric field 'a'");
    WeightedSeries eta, delta;
    if (j.contains("eta")) {
        if (!j["eta"].is_array()) throw ConfigError("surface: 'eta' must be an array");
        for (const auto& row : j["eta"]) {
            if (!row.is_array() || row.size() != 5) throw ConfigError("surface: eta rows have five entries");
            eta.add_term({detail::exponent_at(row, 0, "eta"), detail::exponent_at(row, 1, "eta"),
                          detail::exponent_at(row, 2, "eta")},
                         {detail::number_at(row, 3, "eta"), detail::number_at(row, 4, "eta")});
        }
    }
    if (j.contains("delta")) {
        if (!j["delta"].is_array()) throw ConfigError("surface: 'delta' must be an array");
        for (const auto& row : j["delta"]) {
            if (!row.is_array() || row.size() != 4) throw ConfigError("surface: delta rows have four entries");
            delta.add_term({0, detail::exponent_at(row, 0, "delta"), detail::exponent_at(row, 1, "delta")},
                           {detail::number_at(row, 2, "delta"), detail::number_at(row, 3, "delta")});
        }
    }
    try {
        return Hypersurface(j["a"].get<double>(), eta, delta);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline json surface_to_json(const Hypersurface& m) {
    json j;
    j["a"] = m.a();
    j["eta"] = json::array();
    for (const auto& [mono, c] : m.eta().terms()) j["eta"].push_back({mono.y1, mono.z2, mono.zb2, c.real(), c.imag()});
    j["delta"] = json::array();
    for (const auto& [mono, c] : m.delta().terms()) j["delta"].push_back({mono.z2, mono.zb2, c.real(), c.imag()});
    return j;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
}

inline FamilySeed seed_from_json(const json& j) {
    FamilySeed s;
    if (j.is_null()) return s;
    if (!j.is_object()) throw ConfigError("seed: expected an object");
    const auto reals = [&](const char* key) {
        std::vector<double> v;
        if (!j.contains(key)) return v;
        if (!j[key].is_array()) throw ConfigError(std::string("seed: '") + key + "' must be an array");
        for (const auto& x : j[key]) {
            if (!x.is_number()) throw ConfigError(std::string("seed: non-numeric entry in ") + key);
            v.push_back(x.get<double>());
        }
        return v;
    };
    s.x0_init = reals("x0_init");
    s.phi = reals("phi");
    s.psi = reals("psi");
    if (j.contains("xi")) {
        if (!j["xi"].is_array()) throw ConfigError("seed: 'xi' must be an array");
        for (const auto& x : j["xi"]) {
            if (x.is_number())
                s.xi.emplace_back(x.get<double>(), 0.0);
            else if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number())
                s.xi.emplace_back(x[0].get<double>(), x[1].get<double>());
            else
                throw ConfigError("seed: xi entries are numbers or [re, im] pairs");
        }
    }
    return s;
}

/// "lo:hi:n" -> n evenly spaced values.
inline std::vector<double> parse_grid(const std::string& text) {
    double lo = 0, hi = 0;
    int n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !(in >> std::ws).eof())
        throw ConfigError("grid must look like lo:hi:n, got '" + text + "'");
    if (n > 1 && !(hi > lo)) throw ConfigError("grid: hi must exceed lo");
    return linspace(lo, hi, n);
}

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_trajectory_csv(std::ostream& os, const ChainTrajectory& tr) {
    os << "t,x0,y1,re_z2,im_z2,p_x0,p_y1,p_x2,p_y2,H_residual\n";
    for (std::size_t i = 0; i < tr.times().size(); ++i) {
        os << format_double(tr.times()[i]);
        for (double v : tr.samples()[i]) os << ',' << format_double(v);
        os << ',' << format_double(tr.h_residuals()[i]) << '\n';
    }
}

inline json gamma_json(const std::vector<cplx>& gamma) {
    json g = json::array();
    for (std::size_t k = 0; k < gamma.size(); ++k) g.push_back({static_cast<int>(k), gamma[k].real(), gamma[k].imag()});
    return g;
}

inline json report_to_json(const StationarityReport& r, const std::string& slope_context) {
    return json{{"s", r.s},           {"residual", r.residual}, {"slope_context", slope_context},
                {"gamma", gamma_json(r.gamma)}, {"c_min", r.c_min},   {"K", r.modes},
                {"M_max", r.moments}, {"N", r.samples},         {"condition", r.condition}};
}

/// Coefficient of e^{3 i tau} in (z2/s - e^{i tau}) / s^4 for one member.
inline cplx member_c3(const FamilyMember& m, int n = 256) {
    const auto z = rescaled_curve(m, n);
    std::vector<cplx> d(z.size());
    for (std::size_t j = 0; j < z.size(); ++j)
        d[j] = (z[j] - std::polar(1.0, kTwoPi * static_cast<double>(j) / n)) / std::pow(m.s, 4);
    return fourier_coeffs(d).coeff(3);
}

inline json member_json(const FamilyMember& m) {
    json j{{"s", m.s}, {"chi", m.chi}};
    if (m.ok()) {
        const cplx c3 = member_c3(m);
        j["T_s"] = m.period();
        j["max_H_drift"] = m.trajectory->max_h_drift();
        j["c3_fit"] = {c3.real(), c3.imag()};
    } else {
        j["T_s"] = nullptr;
        j["max_H_drift"] = m.trajectory ? json(m.trajectory->max_h_drift()) : json(nullptr);
        j["c3_fit"] = nullptr;
        j["error"] = m.error;
    }
    return j;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

} // namespace chainlab
