#include <algorithm>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cfarq/report.hpp"

namespace {

using namespace cfarq;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

SweepConfig load(const std::string& name) {
    std::ifstream in(std::string(CFARQ_GOLDEN_DIR) + "/" + name);
    return parse_config(in);
}

std::string csv_of(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

TEST(Report, HeaderIsExact) {
    std::ostringstream os;
    write_csv(os, {});
    EXPECT_EQ(os.str(), "sweep_param,sweep_value,protocol,eta_analytic,delay_analytic,eta_sim,eta_sim_se,"
                        "delay_sim,delay_sim_se,status\n");
}

TEST(Report, PerfectPoint) {
    const auto rows = run_point(load("perfect_point.cfg"));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].protocol, ProtocolChoice::kCf);
    EXPECT_NEAR(rows[0].eta_analytic, 1.0, 1e-12);
    EXPECT_NEAR(rows[0].delay_analytic, 3.0, 1e-12);
    EXPECT_NEAR(rows[1].delay_analytic, 2.0, 1e-12);
    EXPECT_FALSE(rows[0].eta_sim.has_value());
    EXPECT_EQ(csv_of(rows), std::string(kCsvHeader) + "\n,,cf,1,3,,,,,ok\n,,uncoded,1,2,,,,,ok\n");
}

TEST(Report, NearTotalForwardErasure) {
    SweepConfig c = load("perfect_point.cfg");
    c.fwd.e = 0.99;
    c.rev.e = 0.1;
    const auto rows = run_point(c);
    for (const ReportRow& r : rows) {
        EXPECT_EQ(r.status, "ok");
        EXPECT_LT(r.eta_analytic, 0.05);
    }
}

TEST(Report, PerfectFeedbackOrdering) {
    SweepConfig c = load("perfect_point.cfg");
    for (double e : {0.05, 0.2, 0.4, 0.6}) {
        c.fwd.e = e;
        const auto rows = run_point(c);
        EXPECT_GE(rows[1].eta_analytic, rows[0].eta_analytic) << e;
        EXPECT_LE(rows[1].delay_analytic, rows[0].delay_analytic) << e;
    }
}

TEST(Report, PointRejectsSweep) {
    EXPECT_THROW(run_point(load("reverse_burst_sweep.cfg")), ConfigError);
    EXPECT_THROW(run_sweep(load("perfect_point.cfg")), ConfigError);
}

TEST(Report, SweepRowCountAndOrder) {
    const auto rows = run_sweep(load("reverse_burst_sweep.cfg"));
    ASSERT_EQ(rows.size(), 10u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].protocol, i % 2 == 0 ? ProtocolChoice::kCf : ProtocolChoice::kUncoded);
        EXPECT_EQ(rows[i].sweep_param, "rev.r");
        if (i >= 2) EXPECT_GE(*rows[i].sweep_value, *rows[i - 2].sweep_value);
        EXPECT_TRUE(rows[i].eta_sim.has_value());
    }
    const std::string csv = csv_of(rows);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
}

TEST(Report, SweepIsDeterministic) {
    const SweepConfig c = load("reverse_burst_sweep.cfg");
    EXPECT_EQ(csv_of(run_sweep(c)), csv_of(run_sweep(c)));
}

TEST(Report, SweepMatchesGoldenFile) {
    const std::string golden = slurp(std::string(CFARQ_GOLDEN_DIR) + "/reverse_burst_sweep.csv");
    ASSERT_FALSE(golden.empty());
    EXPECT_EQ(csv_of(run_sweep(load("reverse_burst_sweep.cfg"))), golden);
}

TEST(Report, FailuresBecomeStatusRows) {
    SweepConfig c = load("reverse_burst_sweep.cfg");
    c.variant = FormulaVariant::kLiteral; // printed formulas are not normalized
    c.sim.enabled = false;
    const auto rows = run_sweep(c);
    ASSERT_EQ(rows.size(), 10u);
    EXPECT_EQ(rows[0].status, "not_normalized");
    const std::string csv = csv_of(rows);
    EXPECT_NE(csv.find("rev.r,0.1,cf,,,,,,,not_normalized\n"), std::string::npos) << csv;
}

} // namespace
