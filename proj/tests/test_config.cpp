#include <random>

#include <gtest/gtest.h>

#include "cfarq/config.hpp"

namespace {

using namespace cfarq;

constexpr const char* kSample = R"(
# forward erasure sweep over a bursty reverse link
protocol = both
fwd.model = memoryless
fwd.e = 0.2
rev.model = burst
rev.e = 0.1
rev.r = 0.1
k = 2
timeout.offset = 2
sweep.param = fwd.e
sweep.start = 0.2
sweep.stop = 0.6
sweep.steps = 5
sim.enabled = false
)";

TEST(Config, ParsesSample) {
    const SweepConfig c = parse_config(std::string(kSample));
    EXPECT_EQ(c.protocol, ProtocolChoice::kBoth);
    EXPECT_EQ(c.fwd.model, ChannelSpec::Model::kMemoryless);
    EXPECT_DOUBLE_EQ(c.rev.r, 0.1);
    EXPECT_EQ(c.k, 2);
    EXPECT_EQ(c.timeout_offset, 2);
    EXPECT_FALSE(c.timeout.has_value());
    ASSERT_TRUE(c.sweep.has_value());
    EXPECT_EQ(c.sweep->values().size(), 5u);
    EXPECT_DOUBLE_EQ(c.sweep->values().back(), 0.6);
    EXPECT_EQ(c.params_for(ProtocolChoice::kCf).timeout, 5);
    EXPECT_EQ(c.params_for(ProtocolChoice::kUncoded).timeout, 4);
    EXPECT_NO_THROW(validate(c));
}

TEST(Config, AbsoluteTimeoutReplacesOffset) {
    const SweepConfig c = parse_config(std::string("timeout = 7\nfwd.e = 0.1\n"));
    EXPECT_EQ(c.timeout, 7);
    EXPECT_FALSE(c.timeout_offset.has_value());
    EXPECT_EQ(c.params_for(ProtocolChoice::kCf).timeout, 7);
}

SweepConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 2);
    SweepConfig c;
    c.protocol = static_cast<ProtocolChoice>(pick(rng));
    for (ChannelSpec* ch : {&c.fwd, &c.rev}) {
        ch->model = static_cast<ChannelSpec::Model>(pick(rng));
        switch (ch->model) {
        case ChannelSpec::Model::kGe:
            ch->q = u(rng), ch->r = u(rng), ch->eps_g = u(rng), ch->eps_b = u(rng);
            break;
        case ChannelSpec::Model::kMemoryless: ch->e = u(rng); break;
        case ChannelSpec::Model::kBurst: ch->e = u(rng), ch->r = u(rng), ch->eps_g = u(rng), ch->eps_b = u(rng); break;
        }
    }
    c.k = 2 + pick(rng);
    if (pick(rng) == 0) {
        c.timeout = 10 + pick(rng);
        c.timeout_offset.reset();
    } else {
        c.timeout_offset = 1 + pick(rng);
    }
    if (pick(rng) != 0) c.sweep = SweepAxis{"fwd.e", u(rng), u(rng), 1 + pick(rng) * 7};
    c.sim = {pick(rng) == 1, 1 + rng() % 1000000, rng()};
    if (pick(rng) == 2) c.out = "out/run.csv";
    c.variant = pick(rng) == 0 ? FormulaVariant::kLiteral : FormulaVariant::kSlotExact;
    return c;
}

TEST(Config, RoundTripIsIdentity) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 500; ++i) {
        const SweepConfig c = random_config(rng);
        const std::string text = serialize(c);
        const SweepConfig back = parse_config(text);
        ASSERT_EQ(back, c) << text;
        ASSERT_EQ(serialize(back), text);
    }
}

TEST(Config, SubstituteAppliesValue) {
    const SweepConfig c = parse_config(std::string(kSample));
    const SweepConfig p = substitute(c, "fwd.e", 0.45);
    EXPECT_DOUBLE_EQ(p.fwd.e, 0.45);
    EXPECT_FALSE(p.sweep.has_value());
    EXPECT_EQ(substitute(c, "k", 4).k, 4);
    EXPECT_THROW(substitute(c, "k", 2.5), ConfigError);
}

struct BadCase {
    const char* text;
    const char* needle; // expected fragment of the message
};

void PrintTo(const BadCase& bc, std::ostream* os) { *os << '"' << bc.text << '"'; }

class ConfigErrors : public ::testing::TestWithParam<BadCase> {};

TEST_P(ConfigErrors, ParseOrValidateFailsWithFieldMessage) {
    const BadCase& bc = GetParam();
    try {
        validate(parse_config(std::string(bc.text)));
        FAIL() << "accepted: " << bc.text;
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(bc.needle), std::string::npos) << e.what();
    }
}

INSTANTIATE_TEST_SUITE_P(
    Cases, ConfigErrors,
    ::testing::Values(BadCase{"bogus = 1\n", "unknown key bogus"},
                      BadCase{"fwd.e = abc\n", "fwd.e"},
                      BadCase{"fwd.e = 1.5\n", "fwd"},
                      BadCase{"fwd.q = 0.1\n", "not used by the memoryless model"},
                      BadCase{"k = 2.5\n", "k: expected an integer"},
                      BadCase{"k = 1\n", "k"},
                      BadCase{"timeout = 3\n", "cf"},
                      BadCase{"timeout = 5\ntimeout.offset = 1\n", "mutually exclusive"},
                      BadCase{"protocol = tcp\n", "protocol"},
                      BadCase{"sweep.param = fwd.e\n", "sweep.start"},
                      BadCase{"sweep.steps = 3\n", "without sweep.param"},
                      BadCase{"sweep.param = fwd.e\nsweep.start = 0\nsweep.stop = 1.2\nsweep.steps = 3\n",
                              "at fwd.e = 1.2"},
                      BadCase{"sweep.param = fwd.q\nsweep.start = 0\nsweep.stop = 1\nsweep.steps = 3\n",
                              "not used by the memoryless model"},
                      BadCase{"sweep.param = out\nsweep.start = 0\nsweep.stop = 1\nsweep.steps = 3\n",
                              "cannot be swept"},
                      BadCase{"sim.enabled = maybe\n", "sim.enabled"},
                      BadCase{"sim.enabled = true\nsim.frames = 0\n", "sim.frames"},
                      BadCase{"sim.seed = -4\n", "sim.seed"},
                      BadCase{"k = 2\nk = 3\n", "duplicate key k"},
                      BadCase{"just text\n", "line 1"},
                      BadCase{"variant = printed\n", "variant"}),
    [](const ::testing::TestParamInfo<BadCase>& info) { return "case" + std::to_string(info.index); });

} // namespace
