#include <gtest/gtest.h>

#include <fstream>

#include "helpers.hpp"
#include "pyrofront/config.hpp"
#include "pyrofront/error.hpp"

using namespace pyrofront;

namespace {

std::string write_file(const std::string& name, const std::string& text) {
  const auto dir = pftest::scratch_dir("config_" + name);
  const auto path = (dir / "cfg.json").string();
  std::ofstream(path) << text;
  return path;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, EmptyFileGivesExperimentDefaults) {
  const auto cfg = load_config(write_file("empty", ""));
  EXPECT_EQ(cfg.env.grid_size, 16);
  EXPECT_EQ(cfg.agent.fov, 5);
  EXPECT_EQ(cfg.env.num_ignitions, 10);
  EXPECT_EQ(cfg.env.num_veg_patches, 5);
  EXPECT_EQ(cfg.env.period_magnitude, 20.0);
  EXPECT_EQ(cfg.env.period_phase, 80.0);
  EXPECT_EQ(cfg.env.wind_amplitude, 80.0);
  EXPECT_EQ(cfg.env.wind_variation, 20.0);
  EXPECT_EQ(cfg.env.wind_max, 100.0);
  EXPECT_EQ(cfg.agent.steer_limit_deg, 180.0);
  EXPECT_EQ(cfg.reward.alpha_det, 10.0);
  EXPECT_EQ(cfg.reward.alpha_mon, 10.0);
  EXPECT_EQ(cfg.agent.move_hover_ratio, 2.0);
  EXPECT_EQ(cfg.reward.alpha_bel, 40.0);
  EXPECT_EQ(cfg.reward.r_brn, -200.0);
  EXPECT_EQ(cfg.reward.burnout_limit, 10);
  EXPECT_EQ(cfg.num_episodes, 20);
  EXPECT_EQ(cfg.max_iterations, 500);
}

TEST(Config, EmptyObjectEqualsEmptyFile) {
  EXPECT_EQ(to_json(config_from_json("{}")), to_json(config_from_json("  \n")));
}

TEST(Config, OverridesWinOverFile) {
  const auto path = write_file("override", R"({"agent": {"fov": 7}, "env": {"grid_size": 20}})");
  const auto cfg = load_config(path, {"fov=3", "grid=16"});
  EXPECT_EQ(cfg.agent.fov, 3);
  EXPECT_EQ(cfg.env.grid_size, 16);
}

TEST(Config, DottedOverridesAndEnums) {
  ExperimentConfig cfg;
  apply_override(cfg, "env.sigma_spread=0.75");
  apply_override(cfg, "mode=observation");
  apply_override(cfg, "scenario=static_batch");
  apply_override(cfg, "env.wind_pattern=radial");
  EXPECT_DOUBLE_EQ(cfg.env.sigma_spread, 0.75);
  EXPECT_EQ(cfg.mode, RunMode::kObservation);
  EXPECT_EQ(cfg.scenario, Scenario::kStaticBatch);
  EXPECT_EQ(cfg.env.wind_pattern, WindPattern::kRadial);
}

TEST(Config, UnknownKeyNamesTheKey) {
  const auto msg = message_of([] { config_from_json(R"({"env": {"grid_sise": 16}})"); });
  EXPECT_NE(msg.find("env.grid_sise"), std::string::npos) << msg;
  EXPECT_EQ(code_of([] { config_from_json(R"({"bogus": 1})"); }), ErrorCode::kConfig);
  ExperimentConfig cfg;
  EXPECT_NE(message_of([&] { apply_override(cfg, "train.nope=1"); }).find("train.nope"), std::string::npos);
}

TEST(Config, InvalidEnumRejected) {
  EXPECT_EQ(code_of([] { config_from_json(R"({"mode": "oracle"})"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { config_from_json(R"({"env": {"wind_pattern": "spiral"}})"); }), ErrorCode::kConfig);
}

TEST(Config, SmallPhaseFactorViolatesInvariant) {
  const auto path = write_file("mphi", R"({"env": {"m_phi": 0.1}})");
  const auto msg = message_of([&] { load_config(path); });
  EXPECT_NE(msg.find("m_phi >= 1/2"), std::string::npos) << msg;
}

TEST(Config, OtherInvariantsNamed) {
  auto rejects = [](const std::string& o, const std::string& needle) {
    const auto msg = message_of([&] { load_config("", {o}); });
    EXPECT_NE(msg.find(needle), std::string::npos) << o << " -> " << msg;
  };
  rejects("fov=4", "fov odd");
  rejects("fov=19", "fov <= grid_size");
  rejects("env.sigma_spread=0", "sigma_spread > 0");
  rejects("train.gamma=1", "gamma in [0, 1)");
  rejects("reward.burnout_limit=0", "burnout_limit >= 1");
  rejects("agent.classification_error=[[0.5,0.5,0.5],[0,1,0],[0,0,1]]", "rows sum to 1");
}

TEST(Config, ResolvedJsonRoundTrips) {
  ExperimentConfig cfg;
  apply_override(cfg, "seed=12345678901");
  apply_override(cfg, "env.eps_rad=2.5");
  const auto text = to_json(cfg);
  EXPECT_EQ(to_json(config_from_json(text)), text);
  EXPECT_EQ(config_from_json(text).seed, 12345678901ULL);
}

TEST(Config, OutputDirIsAcceptedButNotSerialized) {
  const auto cfg = config_from_json(R"({"output_dir": "elsewhere"})");
  EXPECT_EQ(cfg.output_dir, "elsewhere");
  EXPECT_EQ(to_json(cfg).find("elsewhere"), std::string::npos);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_EQ(code_of([] { load_config("/nonexistent/cfg.json"); }), ErrorCode::kIo);
}
