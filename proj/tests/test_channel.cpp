#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "cfarq/channel.hpp"
#include "oracles.hpp"

namespace {

using namespace cfarq;
using cfarq::testing::max_abs;

TEST(Channel, StationaryMatchesClosedForm) {
    const ChannelHmm ch = build_ge_channel({0.1, 0.3, 0.2, 0.9});
    EXPECT_NEAR(ch.stationary(0), 0.75, 1e-15);
    EXPECT_NEAR(ch.stationary(1), 0.25, 1e-15);
}

TEST(Channel, SymmetricTransitionsGiveUniformStationary) {
    for (double q : {0.05, 0.3, 0.5, 0.9}) {
        const ChannelHmm ch = build_ge_channel({q, q, 0.2, 0.2});
        EXPECT_NEAR(ch.stationary(0), 0.5, 1e-15);
        EXPECT_NEAR(ch.stationary(1), 0.5, 1e-15);
    }
}

TEST(Channel, EqualEmissionsGiveThatErasureRate) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int i = 0; i < 50; ++i) {
        const double e = u(rng);
        EXPECT_NEAR(build_ge_channel({u(rng), u(rng), e, e}).erasure_rate, e, 1e-14);
    }
}

TEST(Channel, ErasureRateIsDotProduct) {
    EXPECT_NEAR(build_ge_channel({0.1, 0.3, 0.0, 0.4}).erasure_rate, 0.1, 1e-15);
}

TEST(Channel, StationaryIsLeftFixedPoint) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        const ChannelHmm ch = build_ge_channel(cfarq::testing::random_ge(rng));
        EXPECT_LT(max_abs(ch.stationary * ch.transition - ch.stationary), 1e-14);
        EXPECT_NEAR(ch.stationary.sum(), 1.0, 1e-15);
        EXPECT_LT(max_abs(ch.success + ch.error - ch.transition), 1e-15);
    }
}

TEST(Channel, GeneralStationarySolverOnThreeStates) {
    Eigen::Matrix3d p;
    p << 0.5, 0.25, 0.25, 0.1, 0.8, 0.1, 0.3, 0.3, 0.4;
    const Eigen::RowVectorXd pi = stationary_distribution(p);
    EXPECT_LT(max_abs(pi * p - pi), 1e-14);
    EXPECT_NEAR(pi.sum(), 1.0, 1e-15);
}

TEST(Channel, ObservationMatricesAtExtremes) {
    EXPECT_EQ(max_abs(memoryless_channel(0.0).error), 0.0);
    EXPECT_EQ(max_abs(memoryless_channel(1.0).success), 0.0);
    const ChannelHmm half = memoryless_channel(0.5);
    EXPECT_TRUE(half.success.isConstant(0.25, 0.0));
    EXPECT_TRUE(half.error.isConstant(0.25, 0.0));
}

TEST(Channel, BurstChannelHitsTargetRate) {
    for (double e : {0.1, 0.3, 0.5})
        for (double r : {0.1, 0.3, 0.9})
            for (double eb : {0.6, 1.0}) {
                const double pi_bad = e / eb;
                if (r * pi_bad / (1 - pi_bad) > 1.0) {
                    EXPECT_THROW(burst_channel(e, r, 0.0, eb), InvalidParameter);
                    continue;
                }
                const ChannelHmm ch = burst_channel(e, r, 0.0, eb);
                EXPECT_NEAR(ch.erasure_rate, e, 1e-12);
                EXPECT_DOUBLE_EQ(ch.params.r, r);
                EXPECT_NEAR(1.0 / ch.params.r, 1.0 / r, 1e-12); // mean burst length
            }
}

TEST(Channel, InvalidParametersAreRejected) {
    EXPECT_THROW(build_ge_channel({1.2, 0.3, 0, 0}), InvalidParameter);
    EXPECT_THROW(build_ge_channel({0.1, -0.1, 0, 0}), InvalidParameter);
    EXPECT_THROW(build_ge_channel({0.1, 0.3, 0, 1.5}), InvalidParameter);
    EXPECT_THROW(build_ge_channel({0.0, 0.0, 0, 0}), InvalidParameter); // reducible chain
    EXPECT_THROW(memoryless_channel(-0.1), InvalidParameter);
    EXPECT_THROW(burst_channel(0.7, 0.1, 0.0, 0.6), InvalidParameter); // target above eps_B
}

TEST(Composite, ObservationPartitionIsRowStochastic) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const CompositeChannel c = compose_channels(build_ge_channel(cfarq::testing::random_ge(rng)),
                                                    build_ge_channel(cfarq::testing::random_ge(rng)));
        const Eigen::Matrix4d sum = c.p(0, 0) + c.p(0, 1) + c.p(1, 0) + c.p(1, 1);
        EXPECT_LT(max_abs(sum - c.transition), 1e-15);
        EXPECT_LT((sum.rowwise().sum() - Eigen::Vector4d::Ones()).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LT(max_abs(c.fwd_success + c.fwd_error - c.transition), 1e-15);
        EXPECT_LT(max_abs(c.rev_success + c.rev_error - c.transition), 1e-15);
        EXPECT_LT(max_abs(c.stationary * c.transition - c.stationary), 1e-14);
    }
}

// (A (x) B)(C (x) D) = AC (x) BD, so products of composite observations
// factor into per-link products.
TEST(Composite, MixedProductProperty) {
    const ChannelHmm f = build_ge_channel({0.1, 0.3, 0.05, 0.7});
    const ChannelHmm r = build_ge_channel({0.2, 0.4, 0.1, 0.5});
    const CompositeChannel c = compose_channels(f, r);
    const Eigen::Matrix4d lhs = c.p(0, 1) * c.p(1, 0);
    const Eigen::Matrix4d rhs = Eigen::kroneckerProduct(Eigen::Matrix2d(f.success * f.error),
                                                        Eigen::Matrix2d(r.error * r.success));
    EXPECT_LT(max_abs(lhs - rhs), 1e-15);
}

TEST(Composite, PerfectForwardLink) {
    const CompositeChannel c = compose_channels(memoryless_channel(0.0), burst_channel(0.3, 0.2));
    EXPECT_EQ(max_abs(c.fwd_error), 0.0);
    EXPECT_LT(max_abs(c.fwd_success - c.transition), 1e-16);
}

TEST(Composite, HalfErasureBothWays) {
    const CompositeChannel c = compose_channels(memoryless_channel(0.5), memoryless_channel(0.5));
    EXPECT_TRUE(c.p(1, 1).isConstant(0.0625, 1e-16));
}

TEST(Composite, InitialDistribution) {
    const CompositeChannel c = compose_channels(build_ge_channel({0.1, 0.3, 0.0, 0.4}), memoryless_channel(0.2));
    const Eigen::RowVector4d w = c.initial_weights();
    EXPECT_NEAR(w.sum(), 0.9, 1e-14); // pi P_0x 1 = 1 - forward erasure rate
    EXPECT_NEAR(c.initial_distribution().sum(), 1.0, 1e-15);
    EXPECT_THROW(compose_channels(memoryless_channel(1.0), memoryless_channel(0.1)).initial_distribution(),
                 InvalidParameter);
}

} // namespace
