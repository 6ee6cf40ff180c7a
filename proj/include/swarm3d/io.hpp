// Scenario files, CSV/JSON run output and SVG trajectory plots.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarm3d/dynamics.hpp"
#include "swarm3d/error.hpp"
#include "swarm3d/scenarios.hpp"

namespace swarm3d::io {

using nlohmann::json;

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline Vec3 vec_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError(std::string(what) + " must be an array of 3 numbers");
    }
    std::array<double, 3> c{};
    for (std::size_t k = 0; k < 3; ++k) {
        if (!j[k].is_number()) {
            throw ConfigError(std::string(what) + " must be an array of 3 numbers");
        }
        c[k] = j[k].get<double>();
    }
    return {c[0], c[1], c[2]};
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; })) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

inline double number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number()) {
        throw ConfigError(std::string("params.") + key + " must be a number");
    }
    return obj[key].get<double>();
}

inline bool flag(const json& obj, const char* key, bool fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_boolean()) {
        throw ConfigError(std::string("params.") + key + " must be true or false");
    }
    return obj[key].get<bool>();
}

}  // namespace detail

inline json params_json(const SimParams& p) {
    return json{
        {"R", p.perception.safety_radius},
        {"kappa", p.perception.kappa},
        {"sigma", p.damping.sigma},
        {"nu", p.damping.nu},
        {"dt", p.dt},
        {"t_end", p.t_end},
        {"seed", p.seed},
        {"mean_field_scaling", p.avoidance.mean_field_scaling},
        {"potential", std::string(to_string(p.potential))},
        {"avoidance_enabled", p.avoidance_enabled},
    };
}

inline json scenario_json(const ScenarioSpec& s) {
    json agents = json::array();
    for (const auto& a : s.agents) {
        agents.push_back({{"id", a.id},
                          {"x", detail::vec_json(a.x)},
                          {"v", detail::vec_json(a.v)},
                          {"target", detail::vec_json(a.target)}});
    }
    json obstacles = json::array();
    for (const auto& o : s.obstacles) {
        obstacles.push_back({{"center", detail::vec_json(o.center)},
                             {"radius", o.radius},
                             {"velocity", detail::vec_json(o.velocity)}});
    }
    return json{{"agents", agents}, {"obstacles", obstacles}, {"params", params_json(s.params)}};
}

/// Parses a scenario document. Missing params take the built-in defaults; unknown keys
/// and malformed values throw ConfigError.
inline ScenarioSpec scenario_from_json(const json& doc, std::string name = "file") {
    detail::reject_unknown(doc, {"agents", "obstacles", "params"}, "scenario");
    if (!doc.contains("agents") || !doc["agents"].is_array()) {
        throw ConfigError("scenario needs an 'agents' array");
    }
    ScenarioSpec s;
    s.name = std::move(name);
    int next_id = 0;
    for (const auto& a : doc["agents"]) {
        detail::reject_unknown(a, {"id", "x", "v", "target"}, "agent");
        AgentState st;
        st.id = next_id;
        if (a.contains("id")) {
            if (!a["id"].is_number_integer()) {
                throw ConfigError("agent id must be an integer");
            }
            st.id = a["id"].get<int>();
        }
        next_id = st.id + 1;
        st.x = detail::vec_from(a.value("x", json()), "agent x");
        st.v = detail::vec_from(a.value("v", json()), "agent v");
        st.target = detail::vec_from(a.value("target", json()), "agent target");
        s.agents.push_back(st);
    }
    if (doc.contains("obstacles")) {
        if (!doc["obstacles"].is_array()) {
            throw ConfigError("'obstacles' must be an array");
        }
        for (const auto& o : doc["obstacles"]) {
            detail::reject_unknown(o, {"center", "radius", "velocity"}, "obstacle");
            ObstacleSpec ob;
            ob.center = detail::vec_from(o.value("center", json()), "obstacle center");
            if (!o.contains("radius") || !o["radius"].is_number()) {
                throw ConfigError("obstacle radius must be a number");
            }
            ob.radius = o["radius"].get<double>();
            if (o.contains("velocity")) {
                ob.velocity = detail::vec_from(o["velocity"], "obstacle velocity");
            }
            s.obstacles.push_back(ob);
        }
    }
    const json params = doc.value("params", json::object());
    detail::reject_unknown(params,
                           {"R", "kappa", "sigma", "nu", "dt", "t_end", "seed",
                            "mean_field_scaling", "potential", "avoidance_enabled"},
                           "params");
    SimParams p = default_params(40.0, 0);
    p.perception.safety_radius = detail::number(params, "R", p.perception.safety_radius);
    p.perception.kappa = detail::number(params, "kappa", p.perception.kappa);
    p.damping.sigma = detail::number(params, "sigma", p.damping.sigma);
    p.damping.nu = detail::number(params, "nu", p.damping.nu);
    p.dt = detail::number(params, "dt", p.dt);
    p.t_end = detail::number(params, "t_end", p.t_end);
    if (params.contains("seed")) {
        if (!params["seed"].is_number_unsigned()) {
            throw ConfigError("params.seed must be a non-negative integer");
        }
        p.seed = params["seed"].get<std::uint64_t>();
    }
    p.avoidance.mean_field_scaling =
        detail::flag(params, "mean_field_scaling", p.avoidance.mean_field_scaling);
    p.avoidance_enabled = detail::flag(params, "avoidance_enabled", p.avoidance_enabled);
    if (params.contains("potential")) {
        const auto kind = params["potential"].is_string()
                              ? parse_potential_kind(params["potential"].get<std::string>())
                              : std::nullopt;
        if (!kind) {
            throw ConfigError("params.potential must be one of none, smooth, distance");
        }
        p.potential = *kind;
    }
    s.params = p;
    validate(s);
    return s;
}

inline ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("malformed scenario file '" + path + "': " + e.what());
    }
    return scenario_from_json(doc, path);
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    return out;
}

inline void save_scenario(const ScenarioSpec& s, const std::string& path) {
    auto out = open_out(path);
    out << scenario_json(s).dump(2) << '\n';
}

inline void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
    out << "t,agent_id,x,y,z,vx,vy,vz,speed\n";
    for (std::size_t k = 0; k < log.times.size(); ++k) {
        const std::string t = fmt17(log.times[k]);
        for (const auto& a : log.states[k]) {
            out << t << ',' << a.id << ',' << fmt17(a.x.x) << ',' << fmt17(a.x.y) << ','
                << fmt17(a.x.z) << ',' << fmt17(a.v.x) << ',' << fmt17(a.v.y) << ','
                << fmt17(a.v.z) << ',' << fmt17(norm(a.v)) << '\n';
        }
    }
}

inline void write_diagnostics_csv(std::ostream& out, const TrajectoryLog& log) {
    out << "t,energy,kinetic,potential,min_pair_dist,max_a_squared\n";
    for (const auto& d : log.diagnostics) {
        out << fmt17(d.t) << ',' << fmt17(d.energy) << ',' << fmt17(d.kinetic) << ','
            << fmt17(d.potential) << ',' << fmt17(d.min_pair_dist) << ','
            << fmt17(d.max_a_squared) << '\n';
    }
}

inline json meta_json(const ScenarioSpec& s, const TrajectoryLog& log) {
    json p = params_json(s.params);
    p["output_interval"] = s.params.output_interval;
    p["pair_gain"] = s.params.avoidance.pair_gain;
    p["obstacle_gain"] = s.params.avoidance.obstacle_gain;
    p["epsilon"] = s.params.avoidance.epsilon;
    p["degeneracy_threshold"] = s.params.avoidance.degeneracy_threshold;
    p["speed_projection"] = s.params.speed_projection;
    return json{{"scenario", s.name},
                {"agents", s.agents.size()},
                {"obstacles", s.obstacles.size()},
                {"params", p},
                {"seed", s.params.seed},
                {"eps_draw", log.eps_draw},
                {"steps", log.steps},
                {"samples", log.times.size()},
                {"penetrations", log.penetrations.size()},
                {"min_pair_dist", std::isfinite(log.min_pair_dist) ? json(log.min_pair_dist)
                                                                   : json(nullptr)}};
}

/// Axis pair for a 2-D projection: 0 = x, 1 = y, 2 = z.
struct Projection {
    int h = 0;
    int v = 1;
    const char* label = "xy";
};

inline void write_svg(std::ostream& out, const ScenarioSpec& s, const TrajectoryLog& log,
                      Projection proj) {
    auto coord = [](const Vec3& p, int axis) { return axis == 0 ? p.x : axis == 1 ? p.y : p.z; };
    double lo_h = std::numeric_limits<double>::infinity(), hi_h = -lo_h;
    double lo_v = lo_h, hi_v = -lo_h;
    auto grow = [&](const Vec3& p, double r) {
        lo_h = std::min(lo_h, coord(p, proj.h) - r);
        hi_h = std::max(hi_h, coord(p, proj.h) + r);
        lo_v = std::min(lo_v, coord(p, proj.v) - r);
        hi_v = std::max(hi_v, coord(p, proj.v) + r);
    };
    for (const auto& st : log.states) {
        for (const auto& a : st) {
            grow(a.x, 0.0);
        }
    }
    for (const auto& a : s.agents) {
        grow(a.target, 0.0);
    }
    for (const auto& obs : log.obstacles) {
        for (const auto& o : obs) {
            grow(o.center, o.radius);
        }
    }
    if (!std::isfinite(lo_h)) {
        lo_h = lo_v = -1.0;
        hi_h = hi_v = 1.0;
    }
    double span_h = std::max(hi_h - lo_h, 1e-9);
    double span_v = std::max(hi_v - lo_v, 1e-9);
    lo_h -= 0.1 * span_h;
    lo_v -= 0.1 * span_v;
    span_h *= 1.2;
    span_v *= 1.2;

    constexpr double width = 600.0;
    const double scale = width / std::max(span_h, span_v);
    const double w = span_h * scale, hgt = span_v * scale;
    auto px = [&](const Vec3& p) { return (coord(p, proj.h) - lo_h) * scale; };
    auto py = [&](const Vec3& p) { return hgt - (coord(p, proj.v) - lo_v) * scale; };
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt17(w) << "\" height=\""
        << fmt17(hgt) << "\" viewBox=\"0 0 " << fmt17(w) << ' ' << fmt17(hgt) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"8\" y=\"16\" font-size=\"12\" font-family=\"sans-serif\">" << s.name
        << " (" << proj.label << ")</text>\n";
    if (!log.obstacles.empty()) {
        for (const auto& o : log.obstacles.back()) {
            out << "<circle cx=\"" << fmt17(px(o.center)) << "\" cy=\"" << fmt17(py(o.center))
                << "\" r=\"" << fmt17(o.radius * scale)
                << "\" fill=\"#cccccc\" stroke=\"black\"/>\n";
        }
    }
    const std::size_t n = log.states.empty() ? 0 : log.states.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        const char* color = palette[i % 10];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& st : log.states) {
            out << fmt17(px(st[i].x)) << ',' << fmt17(py(st[i].x)) << ' ';
        }
        out << "\"/>\n";
        const Vec3& t = s.agents[i].target;
        out << "<path d=\"M" << fmt17(px(t) - 5) << ' ' << fmt17(py(t) - 5) << " l10 10 m0 -10 l-10 10\" stroke=\""
            << color << "\" stroke-width=\"2\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace swarm3d::io
