#include <random>

#include <gtest/gtest.h>

#include "cfarq/sim.hpp"
#include "cfarq/uncoded.hpp"
#include "oracles.hpp"

namespace {

using namespace cfarq;

TEST(Uncoded, PerfectChannelsAreExact) {
    const CompositeChannel c = compose_channels(memoryless_channel(0.0), memoryless_channel(0.0));
    for (int k : {2, 3, 4, 6}) {
        const ProtocolParams p = ProtocolParams::uncoded(k, k + 2);
        EXPECT_NEAR(uncoded_throughput(c, p), 1.0, 1e-12);
        EXPECT_NEAR(uncoded_mean_delay(c, p), k, 1e-12);
        const Eigen::RowVectorXd w = c.initial_distribution();
        EXPECT_NEAR(cfarq::testing::scalar_pgf(uncoded_mgf_transmission(c, p), w, 0.6), 0.6, 1e-12);
        EXPECT_NEAR(cfarq::testing::scalar_pgf(uncoded_mgf_delay(c, p), w, 0.6), std::pow(0.6, k), 1e-12);
    }
}

// Memoryless forward link, perfect feedback: geometric attempts of k slots.
TEST(Uncoded, PerfectFeedbackClosedForm) {
    for (double e : {0.1, 0.4, 0.7}) {
        const CompositeChannel c = compose_channels(memoryless_channel(e), memoryless_channel(0.0));
        for (int k : {2, 4}) {
            const ProtocolParams p = ProtocolParams::uncoded(k, k + 2);
            EXPECT_NEAR(uncoded_throughput(c, p), 1 - e, 1e-10);
            EXPECT_NEAR(uncoded_mean_delay(c, p), k / (1 - e), 1e-10);
        }
    }
}

TEST(Uncoded, NormalizationOnRandomGrid) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> kd(2, 4), offd(1, 4);
    for (int i = 0; i < 100; ++i) {
        const CompositeChannel c = compose_channels(build_ge_channel(cfarq::testing::random_ge(rng, 0.6)),
                                                    build_ge_channel(cfarq::testing::random_ge(rng, 0.6)));
        const int k = kd(rng);
        const ProtocolParams p = ProtocolParams::uncoded(k, k + offd(rng));
        const Eigen::RowVectorXd w = c.initial_weights();
        EXPECT_NEAR(pgf_moments(uncoded_mgf_transmission(c, p), w).normalization, 1.0, 1e-9);
        EXPECT_NEAR(pgf_moments(uncoded_mgf_delay(c, p), w).normalization, 1.0, 1e-9);
        EXPECT_GE(uncoded_mean_delay(c, p), k - 1e-12);
    }
}

TEST(Uncoded, DerivativeMatchesFiniteDifference) {
    const CompositeChannel c = compose_channels(burst_channel(0.3, 0.2), build_ge_channel({0.1, 0.4, 0.05, 0.5}));
    const ProtocolParams p = ProtocolParams::uncoded(3, 6);
    const Eigen::RowVectorXd w = c.initial_weights();
    const double tau = pgf_moments(uncoded_mgf_transmission(c, p), w).mean;
    const double delay = pgf_moments(uncoded_mgf_delay(c, p), w).mean;
    EXPECT_NEAR(cfarq::testing::fd_mean(uncoded_mgf_transmission(c, p), w), tau, 1e-5 * tau);
    EXPECT_NEAR(cfarq::testing::fd_mean(uncoded_mgf_delay(c, p), w), delay, 1e-5 * delay);
}

TEST(Uncoded, Preconditions) {
    const CompositeChannel c = compose_channels(memoryless_channel(0.1), memoryless_channel(0.1));
    EXPECT_THROW(uncoded_mgf_transmission(c, ProtocolParams::uncoded(2, 2)), InvalidParameter);
    EXPECT_THROW(uncoded_mgf_delay(c, ProtocolParams::cf(2, 5)), InvalidParameter);
}

TEST(UncodedOracle, MemorylessThirtyPercent) {
    const ChannelHmm ch = memoryless_channel(0.3);
    const ProtocolParams p = ProtocolParams::uncoded(2, 5);
    const CompositeChannel c = compose_channels(ch, ch);
    const SimStats s = simulate_uncoded(ch, ch, p, 100000, 201);
    EXPECT_LE(std::abs(uncoded_throughput(c, p) - s.throughput_estimate), 3 * s.std_error_throughput);
    EXPECT_LE(std::abs(uncoded_mean_delay(c, p) - s.mean_delay_estimate), 3 * s.std_error_delay);
}

} // namespace
