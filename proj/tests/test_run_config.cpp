#include <string>

#include <gtest/gtest.h>

#include "srn/errors.hpp"
#include "srn/run_config.hpp"

using namespace srn;

TEST(RunConfig, ParsesKeysAndComments) {
  const RunConfig c = parse_run_config(
      "# a gd run\n"
      "experiment = gd\n"
      "m = 1   # two layers\n"
      "eta = 2.5e-3\n"
      "steps = 400\n"
      "init_scale = large\n"
      "mode = empirical\n"
      "seed = 17\n\n");
  EXPECT_EQ(c.experiment, Experiment::gd);
  EXPECT_EQ(*c.m, 1);
  EXPECT_DOUBLE_EQ(*c.eta, 2.5e-3);
  EXPECT_EQ(*c.steps, 400);
  EXPECT_EQ(c.init->scale, InitScale::large);
  EXPECT_EQ(*c.mode, DescentMode::empirical);
  EXPECT_EQ(c.seed, 17u);
  EXPECT_FALSE(c.d.has_value());
}

TEST(RunConfig, ExplicitInitAndAnchors) {
  const RunConfig c = parse_run_config("experiment = reanchor\nm = 0\nanchors = 0, 100,2500\ninit_scale = 0.3\n");
  EXPECT_EQ(c.init->scale, InitScale::explicit_k);
  EXPECT_DOUBLE_EQ(c.init->k, 0.3);
  EXPECT_EQ(c.anchors, (std::vector<long long>{0, 100, 2500}));
}

TEST(RunConfig, UnknownKeyHasLineContext) {
  try {
    parse_run_config("experiment = flow\nm = 1\nlearning_rate = 0.1\n", "cfg/a.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("cfg/a.cfg:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("learning_rate"), std::string::npos) << msg;
  }
}

TEST(RunConfig, RejectsBadInput) {
  EXPECT_THROW(parse_run_config("experiment = flow\nm = -1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("experiment = flow\nm = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_run_config("experiment = gd\nm = 1\neta = 0\nsteps = 3\n"), ConfigError);
  EXPECT_THROW(parse_run_config("experiment = flow\nm = 1\nm = 2\n"), ConfigError);
  EXPECT_THROW(parse_run_config("experiment = nonsense\n"), ConfigError);
  EXPECT_THROW(parse_run_config("m = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("experiment = flow\nm 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("experiment = reanchor\nm = 1\nanchors = 5,2\n"), ConfigError);
  EXPECT_THROW(parse_run_config("experiment = flow\nm = 1\nmode = stochastic\n"), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/x.cfg"), ConfigError);
}

TEST(RunConfig, RequiredKeys) {
  EXPECT_THROW(parse_run_config("experiment = gd\nm = 1\nsteps = 10\n"), ConfigError);
  EXPECT_THROW(parse_run_config("experiment = figure-angle\nm = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("experiment = reanchor\nm = 1\n"), ConfigError);
  EXPECT_NO_THROW(parse_run_config("experiment = lemma-verify\n"));
  EXPECT_NO_THROW(parse_run_config("experiment = deep-general\ninit_scale = small\n"));
  for (Experiment e : all_experiments()) {
    for (const auto& k : required_keys(e)) {
      const auto& keys = config_keys();
      EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end()) << k;
    }
  }
}

TEST(RunConfig, ExperimentNamesRoundTrip) {
  for (Experiment e : all_experiments()) EXPECT_EQ(parse_experiment(to_string(e)), e);
}

TEST(RunConfig, RenderRoundTrips) {
  RunConfig c = parse_run_config(
      "experiment = figure-magnitude\nm = 2\nd = 30\nn = 1234\neta = 1e-4\nsteps = 777\n"
      "init_scale = 0.125\ntarget_scale = 0.05\nseed = 99\ndt = 0.002\nt_end = 3\n"
      "output_dir = some/dir\nmode = population\nrecord_every = 7\neps = 0.02\n"
      "depth = 3\nwidth = 8\nconfigs = 2\npaper_scale = true\n");
  const std::string text = render_run_config(c);
  const RunConfig back = parse_run_config(text);
  EXPECT_EQ(render_run_config(back), text);
  EXPECT_EQ(*back.n, 1234);
  EXPECT_DOUBLE_EQ(back.init->k, 0.125);
  EXPECT_TRUE(back.paper_scale);
  EXPECT_EQ(back.output_dir, "some/dir");
}
