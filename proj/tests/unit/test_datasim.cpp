#include "phcs/datasim.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include <gtest/gtest.h>

#include "phcs/error.hpp"

using namespace phcs;

namespace {

LabeledBatch batch(std::vector<std::vector<double>> rows, std::vector<double> y) {
    LabeledBatch b;
    b.covariates.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t d = 0; d < rows[i].size(); ++d)
            b.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d];
    b.responses = std::move(y);
    return b;
}

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(SyntheticMean, Examples)
{
    std::vector<double> x(synthetic_dim, 0.0);
    x[3] = 1.0;
    EXPECT_DOUBLE_EQ(synthetic_mean(x), 5.0);
    x[0] = 0.5;
    x[1] = -1.0;
    x[3] = 0.0;
    EXPECT_DOUBLE_EQ(synthetic_mean(x), 5.0 * (-0.5 + std::exp(-1.0)));
}

TEST(SyntheticNoise, Scales)
{
    std::vector<double> x(synthetic_dim, 0.0);
    x[3] = 1.0;
    SyntheticConfig cfg;
    EXPECT_DOUBLE_EQ(synthetic_noise_sd(cfg, x), 0.15);
    cfg.noise = NoiseModel::heteroscedastic;
    EXPECT_DOUBLE_EQ(synthetic_noise_sd(cfg, x), 0.025);
}

TEST(GenSynthetic, ShapesRangesAndDeterminism)
{
    SyntheticConfig cfg;
    cfg.n_train = 50;
    cfg.n_cal = 30;
    cfg.m = 10;
    Rng a(7, 3), b(7, 3), c(7, 4);
    const auto d1 = gen_synthetic(cfg, a);
    const auto d2 = gen_synthetic(cfg, b);
    const auto d3 = gen_synthetic(cfg, c);
    EXPECT_EQ(d1.train.size(), 50u);
    EXPECT_EQ(d1.cal.size(), 30u);
    EXPECT_EQ(d1.test.size(), 10u);
    EXPECT_EQ(d1.test.covariates.cols(), 20);
    EXPECT_EQ(d1.cal.role, BatchRole::calibration);
    EXPECT_LE(d1.train.covariates.maxCoeff(), 1.0);
    EXPECT_GE(d1.train.covariates.minCoeff(), -1.0);
    EXPECT_EQ(hash_batches(d1), hash_batches(d2));
    EXPECT_NE(hash_batches(d1), hash_batches(d3));
}

TEST(GenSynthetic, NoiseMoments)
{
    SyntheticConfig cfg;
    cfg.n_train = 100000;
    cfg.n_cal = 1;
    cfg.m = 1;
    Rng rng(9, 0);
    const auto data = gen_synthetic(cfg, rng);
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < data.train.size(); ++i) {
        const double r = data.train.responses[i] - synthetic_mean(data.train.row(i));
        sum += r;
        sq += r * r;
    }
    const double n = static_cast<double>(data.train.size());
    EXPECT_NEAR(sum / n, 0.0, 4 * 0.15 / std::sqrt(n));
    EXPECT_NEAR(std::sqrt(sq / n), 0.15, 0.002);
}

TEST(Knn, Example)
{
    const auto train = batch({{0.0}, {1.0}, {2.0}, {10.0}}, {1.0, 2.0, 3.0, 40.0});
    const KnnRegressor knn(train, 2);
    EXPECT_DOUBLE_EQ(knn.predict(std::vector<double>{0.2}), 1.5);
    EXPECT_DOUBLE_EQ(knn.predict(std::vector<double>{9.0}), 21.5);
    // 0.5 is equidistant from 0 and 1; the third point decides nothing.
    EXPECT_DOUBLE_EQ(knn.predict(std::vector<double>{0.5}), 1.5);
    // Tie at distance 1 between indices 0 and 2: the lower index wins.
    EXPECT_DOUBLE_EQ(KnnRegressor(train, 2).predict(std::vector<double>{1.0}), 1.5);
    EXPECT_THROW(KnnRegressor(train, 5), ConfigError);
    EXPECT_THROW(knn.predict(std::vector<double>{0.0, 1.0}), DataError);
}

TEST(Ridge, RecoversLinearModel)
{
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (int i = 0; i < 6; ++i) {
        const double a = i, b = (i * i) % 5;
        rows.push_back({a, b});
        y.push_back(1.0 + 2.0 * a - b);
    }
    const RidgeRegressor model(batch(rows, y), 1e-10);
    EXPECT_NEAR(model.intercept(), 1.0, 1e-6);
    EXPECT_NEAR(model.coefficients()(0), 2.0, 1e-6);
    EXPECT_NEAR(model.coefficients()(1), -1.0, 1e-6);
    EXPECT_NEAR(model.predict(std::vector<double>{3.0, 3.0}), 4.0, 1e-6);
}

TEST(Ridge, PenaltyShrinksAndSingularDesignNeedsIt)
{
    const auto train = batch({{1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}}, {1.0, 2.0, 3.0});
    const std::string msg = message_of([&] { RidgeRegressor(train, 0.0); });
    EXPECT_NE(msg.find("reg > 0"), std::string::npos) << msg;
    const RidgeRegressor shrunk(train, 1.0);
    EXPECT_LT(std::abs(shrunk.coefficients()(0)), 0.5);
    EXPECT_NEAR(shrunk.coefficients()(0), shrunk.coefficients()(1), 1e-12);
    EXPECT_THROW(RidgeRegressor(train, -1.0), ConfigError);
}

TEST(ParsePredictions, Classifier)
{
    const auto data = parse_predictions("# preds\nmu,label\n0.2,1\n\n0.9,0\n", "mu,c\n0.5,0\n0.1,0\n");
    EXPECT_EQ(data.mode, FileMode::classifier);
    ASSERT_EQ(data.cal.size(), 2u);
    EXPECT_DOUBLE_EQ(data.cal[1].mu, 0.9);
    EXPECT_EQ(data.cal[0].y, 1.0);
    EXPECT_EQ(data.cal[0].c, 0.0);
    EXPECT_EQ(data.test.size(), 2u);
    EXPECT_FALSE(data.labeled());
    EXPECT_FALSE(data.has_external_e());
}

TEST(ParsePredictions, RegressionWithOptionalColumns)
{
    const auto data = parse_predictions("mu,y,c\n1.5,2.0,1.0\n", "mu,c,y,e_g,w\n2.0,1.0,3.0,4.0,0.5\n");
    EXPECT_EQ(data.mode, FileMode::regression);
    EXPECT_TRUE(data.labeled());
    EXPECT_TRUE(data.has_external_e());
    EXPECT_TRUE(data.has_weights());
    EXPECT_EQ(*data.test[0].e_g, 4.0);
    EXPECT_EQ(*data.test[0].w, 0.5);
}

TEST(ParsePredictions, ErrorsNameFileAndLine)
{
    EXPECT_EQ(message_of([] { parse_predictions("mu,label\n0.2,1\n0.3,x\n", "mu,c\n0.5,0\n", "cal.csv", "t.csv"); }),
              "cal.csv:3: cannot parse 'x' as a number");
    EXPECT_EQ(message_of([] { parse_predictions("mu,label\n1.2,1\n", "mu,c\n0.5,0\n", "cal.csv", "t.csv"); }),
              "cal.csv:2: prediction outside [0, 1] in classifier mode");
    EXPECT_EQ(message_of([] { parse_predictions("mu,label\n0.2,2\n", "mu,c\n0.5,0\n", "cal.csv", "t.csv"); }),
              "cal.csv:2: label must be 0 or 1");
    EXPECT_EQ(message_of([] { parse_predictions("mu,label\n0.2,1\n", "mu,c\n0.5\n", "cal.csv", "t.csv"); }),
              "t.csv:2: expected 2 fields, got 1");
    EXPECT_EQ(message_of([] { parse_predictions("mu,q\n", "mu,c\n", "cal.csv", "t.csv"); }),
              "cal.csv:1: calibration header must be 'mu,label' or 'mu,y,c'");
    EXPECT_EQ(message_of([] { parse_predictions("mu,label\n", "mu,c,z\n", "cal.csv", "t.csv"); }),
              "t.csv:1: unknown column in test header");
    EXPECT_EQ(message_of([] { parse_predictions("mu,y,c\n1,1,1\n", "mu,c,w\n1,1,-1\n", "cal.csv", "t.csv"); }),
              "t.csv:2: w must be non-negative");
}

TEST(LoadPredictions, MissingFile)
{
    const auto msg = message_of([] { load_predictions("/nonexistent/cal.csv", "/nonexistent/test.csv"); });
    EXPECT_EQ(msg, "cannot open /nonexistent/cal.csv");
}
