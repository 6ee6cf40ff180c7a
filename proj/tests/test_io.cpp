#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "swarm3d/io.hpp"

using namespace swarm3d;

namespace {

std::string traj_csv(const TrajectoryLog& log) {
    std::ostringstream out;
    io::write_trajectory_csv(out, log);
    return out.str();
}

std::size_t lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(Io, SeventeenDigits) {
    EXPECT_EQ(io::fmt17(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(io::fmt17(1.0 / 3)), 1.0 / 3);
}

TEST(Io, ScenarioRoundTripIsBitExact) {
    auto s = obstacles_scenario(5, 9);
    s.params.t_end = 3;
    s.params.damping.nu = 0.01;
    s.params.avoidance.mean_field_scaling = false;
    const auto text = io::scenario_json(s).dump();
    const auto back = io::scenario_from_json(nlohmann::json::parse(text), "obstacles");
    ASSERT_EQ(back.agents.size(), s.agents.size());
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        EXPECT_EQ(back.agents[i].x, s.agents[i].x);
        EXPECT_EQ(back.agents[i].v, s.agents[i].v);
        EXPECT_EQ(back.agents[i].id, s.agents[i].id);
    }
    EXPECT_EQ(back.params.damping.nu, 0.01);
    EXPECT_FALSE(back.params.avoidance.mean_field_scaling);
    EXPECT_EQ(traj_csv(run(s.world(), s.params)), traj_csv(run(back.world(), back.params)));
}

TEST(Io, RejectsUnknownKeysAndBadValues) {
    using nlohmann::json;
    const json agent = {{"x", {0, 0, 0}}, {"v", {1, 0, 0}}, {"target", {1, 1, 1}}};
    EXPECT_NO_THROW(io::scenario_from_json(json{{"agents", {agent}}}));
    EXPECT_THROW(io::scenario_from_json(json{{"agents", {agent}}, {"extra", 1}}), ConfigError);
    EXPECT_THROW(io::scenario_from_json(json{{"agents", {agent}}, {"params", {{"gain", 1}}}}),
                 ConfigError);
    EXPECT_THROW(io::scenario_from_json(json{{"agents", {{{"x", {0, 0}}}}}}), ConfigError);
    EXPECT_THROW(
        io::scenario_from_json(json{{"agents", {agent}}, {"params", {{"potential", "cubic"}}}}),
        ConfigError);
    EXPECT_THROW(io::scenario_from_json(json{{"obstacles", json::array()}}), ConfigError);
}

TEST(Io, DefaultsForMissingParams) {
    using nlohmann::json;
    const json agent = {{"x", {0, 0, 0}}, {"v", {1, 0, 0}}, {"target", {1, 1, 1}}};
    const auto s = io::scenario_from_json(json{{"agents", {agent, agent}}, {"params", {{"R", 2.0}}}});
    EXPECT_EQ(s.params.perception.safety_radius, 2.0);
    EXPECT_EQ(s.params.perception.kappa, -0.5);
    EXPECT_EQ(s.params.damping.sigma, 0.25);
    EXPECT_EQ(s.agents[1].id, 1);
}

TEST(Io, CsvShape) {
    auto s = circle_scenario(3, 0.5);
    s.params.t_end = 2;
    const auto log = run(s.world(), s.params);
    const auto traj = traj_csv(log);
    EXPECT_EQ(traj.substr(0, traj.find('\n')), "t,agent_id,x,y,z,vx,vy,vz,speed");
    EXPECT_EQ(lines(traj), 1 + log.times.size() * 3);
    std::ostringstream diag;
    io::write_diagnostics_csv(diag, log);
    EXPECT_EQ(diag.str().substr(0, diag.str().find('\n')),
              "t,energy,kinetic,potential,min_pair_dist,max_a_squared");
    EXPECT_EQ(lines(diag.str()), 1 + log.times.size());
}

TEST(Io, MetaAndSvg) {
    auto s = obstacles_scenario(3, 4);
    s.params.t_end = 1;
    const auto log = run(s.world(), s.params);
    const auto meta = io::meta_json(s, log);
    EXPECT_EQ(meta["seed"], 4u);
    EXPECT_EQ(meta["eps_draw"].get<double>(), log.eps_draw);
    EXPECT_EQ(meta["params"]["potential"], "smooth");
    std::ostringstream svg;
    io::write_svg(svg, s, log, {0, 1, "xy"});
    const auto text = svg.str();
    EXPECT_EQ(text.rfind("<svg", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n') > 5, true);
    EXPECT_NE(text.find("<polyline"), std::string::npos);
    EXPECT_NE(text.find("<circle"), std::string::npos);
}
