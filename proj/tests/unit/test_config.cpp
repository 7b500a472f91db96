#include "phcs/config.hpp"

#include <set>

#include <gtest/gtest.h>

#include "phcs/error.hpp"

using namespace phcs;

namespace {

std::string message_of(std::string_view text) {
    try {
        parse_config(text, "run.cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(ParseConfig, SectionsAndComments)
{
    const auto kv = parse_config("# top\nrun.seed = 4\n[utility]\nkind = linear ; inline\nlambda=2.5\n\n[sim]\nm = 20 # size\n");
    EXPECT_EQ(kv.at("run.seed"), "4");
    EXPECT_EQ(kv.at("utility.kind"), "linear");
    EXPECT_EQ(kv.at("utility.lambda"), "2.5");
    EXPECT_EQ(kv.at("sim.m"), "20");
    EXPECT_EQ(kv.size(), 4u);
}

TEST(ParseConfig, Errors)
{
    EXPECT_EQ(message_of("[sim\n"), "run.cfg:1: unterminated section header");
    EXPECT_EQ(message_of("\nrun.seed\n"), "run.cfg:2: expected key = value");
    EXPECT_EQ(message_of("[sim]\nbogus = 1\n"), "run.cfg:2: unknown key 'sim.bogus'");
}

TEST(KnownKeys, Unique)
{
    const auto keys = known_config_keys();
    std::set<std::string_view> seen(keys.begin(), keys.end());
    EXPECT_EQ(seen.size(), keys.size());
    EXPECT_TRUE(seen.count("utility.r_min"));
}

TEST(MakeRunConfig, Defaults)
{
    const auto syn = make_run_config(RunMode::simulate, {});
    EXPECT_EQ(syn.source, DataSource::synthetic);
    EXPECT_EQ(syn.score.gamma, 3.0);
    EXPECT_TRUE(syn.score.normalize);
    EXPECT_EQ(syn.variant, Variant::ph_cs);
    EXPECT_EQ(syn.baseline, Baseline::none);
    EXPECT_NO_THROW(syn.validate());

    const auto files = make_run_config(RunMode::select, {{"data.cal", "a.csv"}, {"data.test", "b.csv"}});
    EXPECT_EQ(files.source, DataSource::files);
    EXPECT_EQ(files.score.gamma, 50.0);
    EXPECT_FALSE(files.score.normalize);
    EXPECT_NO_THROW(files.validate());
}

TEST(MakeRunConfig, TypedValues)
{
    const auto cfg = make_run_config(RunMode::simulate, {{"run.seed", "99"},
                                                         {"run.trials", "12"},
                                                         {"run.cs_baseline", "matched_fdp"},
                                                         {"utility.kind", "linear"},
                                                         {"utility.lambda", "100"},
                                                         {"utility.u_table", "0, 1, 2"},
                                                         {"sim.noise", "heteroscedastic"},
                                                         {"sim.model", "ridge"},
                                                         {"score.normalize", "off"}});
    EXPECT_EQ(cfg.seed, 99u);
    EXPECT_EQ(cfg.n_trials, 12u);
    EXPECT_EQ(cfg.baseline, Baseline::matched_fdp);
    EXPECT_EQ(cfg.utility.kind, UtilityKind::linear_tradeoff);
    EXPECT_EQ(cfg.utility.lambda, 100.0);
    EXPECT_EQ(cfg.utility.u_table, (std::vector<double>{0, 1, 2}));
    EXPECT_EQ(cfg.sim.noise, NoiseModel::heteroscedastic);
    EXPECT_EQ(cfg.model, ModelKind::ridge);
    EXPECT_FALSE(cfg.score.normalize);
}

TEST(MakeRunConfig, Rejections)
{
    EXPECT_THROW(make_run_config(RunMode::select, {{"run.seed", "-1"}}), ConfigError);
    EXPECT_THROW(make_run_config(RunMode::select, {{"run.alpha", "abc"}}), ConfigError);
    EXPECT_THROW(make_run_config(RunMode::select, {{"sim.model", "forest"}}), ConfigError);
    EXPECT_THROW(make_run_config(RunMode::select, {{"data.source", "synthetic"}, {"data.cal", "x"}}), ConfigError);
    EXPECT_THROW(make_run_config(RunMode::select, {{"nope", "1"}}), ConfigError);
    EXPECT_THROW(make_run_config(RunMode::simulate, {{"utility.r_min", "500"}}).validate(), ConfigError);
    EXPECT_THROW(make_run_config(RunMode::select, {{"run.variant", "cs"}}).validate(), ConfigError);
    EXPECT_THROW(make_run_config(RunMode::select, {{"run.workers", "0"}}).validate(), ConfigError);
    EXPECT_THROW(make_run_config(RunMode::select, {{"data.source", "files"}}).validate(), ConfigError);
}
