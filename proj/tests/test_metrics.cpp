#include <gtest/gtest.h>

#include <cmath>

#include "colonsynth/metrics/depth_metrics.hpp"
#include "oracles.hpp"

using namespace colonsynth;

TEST(Metrics, RmseHandExample) {
    const ImageD y(2, 2, std::vector<double>{1, 2, 3, 4});
    const ImageD p(2, 2, std::vector<double>{1, 2, 3, 6});
    EXPECT_DOUBLE_EQ(rmse(y, p), 1.0);
    EXPECT_DOUBLE_EQ(rmse(y, y), 0.0);
    EXPECT_THROW(rmse(y, ImageD(1, 4)), std::invalid_argument);
}

TEST(Metrics, ThresholdIsStrict) {
    // Ratio exactly 1.25 fails, just under passes.
    const ImageD y(3, 1, std::vector<double>{4.0, 4.0, 4.0});
    const ImageD p(3, 1, std::vector<double>{5.0, 4.999, 3.2});
    const auto r = threshold_accuracy(y, p);
    EXPECT_EQ(r.n_within, 1u);
    EXPECT_NEAR(r.percent, 100.0 / 3.0, 1e-12);
}

TEST(Metrics, NonPositivePixelsCountAsInvalidFailures) {
    const ImageD y(4, 1, std::vector<double>{1, 0, 2, 3});
    const ImageD p(4, 1, std::vector<double>{1, 1, -1, 3});
    const auto r = threshold_accuracy(y, p);
    EXPECT_EQ(r.n_invalid, 2u);
    EXPECT_EQ(r.n_within, 2u);
    EXPECT_DOUBLE_EQ(r.percent, 50.0);
}

TEST(Metrics, BinsCoverZeroToEighteen) {
    const ImageD y(5, 1, std::vector<double>{0.0, 0.999, 1.0, 17.5, 18.0});
    const ImageD p(5, 1, std::vector<double>{1.0, 0.999, 2.0, 17.5, 0.0});
    const auto bins = binned_rmse(y, p);
    ASSERT_EQ(bins.size(), 18u);
    EXPECT_DOUBLE_EQ(bins[0].lo, 0.0);
    EXPECT_DOUBLE_EQ(bins[17].hi, 18.0);
    EXPECT_EQ(bins[0].count, 2u);
    EXPECT_DOUBLE_EQ(bins[0].rmse, std::sqrt(0.5));
    EXPECT_EQ(bins[1].count, 1u);
    EXPECT_EQ(bins[17].count, 1u);  // 18.0 itself is outside [0, 18)
    EXPECT_TRUE(std::isnan(bins[5].rmse));
}

TEST(Metrics, MatchLoopOraclesExactly) {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto y = oracle::random_image(64, 48, rng, 0.1, 25.0);
        ImageD p = y;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] *= rng.uniform(0.6, 1.5);
        EXPECT_EQ(rmse(y, p), oracle::rmse(y, p));
        EXPECT_EQ(thacc(y, p, 1.25), oracle::thacc(y, p, 1.25));
        const auto bins = binned_rmse(y, p);
        const auto ref = oracle::binned_rmse(y, p);
        for (std::size_t b = 0; b < 18; ++b) {
            EXPECT_EQ(bins[b].count, ref[b].count);
            if (ref[b].count > 0) {
                EXPECT_EQ(bins[b].rmse, ref[b].rmse);
            }
        }
    }
}

TEST(Metrics, EvaluateBundlesEverything) {
    Rng rng(3);
    const auto y = oracle::random_image(10, 10, rng, 1, 17);
    const auto r = evaluate_depth(y, y, true);
    EXPECT_EQ(r.rmse, 0.0);
    EXPECT_EQ(r.thacc, 100.0);
    EXPECT_EQ(r.bins.size(), 18u);
}
