// cfarq: evaluate CF ARQ and uncoded ARQ throughput/delay, run parameter
// sweeps to CSV, and check the analytic model against the simulator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cfarq/cfarq.hpp"

namespace {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kNumericalFailure = 2,
    kValidationFailure = 3,
};

struct Overrides {
    std::string config;
    std::string out;
    std::optional<bool> sim;
    std::optional<std::uint64_t> frames;
    std::optional<std::uint64_t> seed;
};

cfarq::SweepConfig load(const Overrides& o) {
    cfarq::SweepConfig cfg;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw cfarq::ConfigError("cannot open config file " + o.config);
        cfg = cfarq::parse_config(in);
    }
    if (!o.out.empty()) cfg.out = o.out;
    if (o.sim) cfg.sim.enabled = *o.sim;
    if (o.frames) cfg.sim.frames = *o.frames;
    if (o.seed) cfg.sim.seed = *o.seed;
    return cfg;
}

void emit_csv(const cfarq::SweepConfig& cfg, const std::vector<cfarq::ReportRow>& rows) {
    if (cfg.out.empty()) {
        cfarq::write_csv(std::cout, rows);
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw cfarq::ConfigError("cannot write " + cfg.out);
    cfarq::write_csv(f, rows);
}

void print_point(const std::vector<cfarq::ReportRow>& rows) {
    for (const auto& r : rows) {
        std::printf("%-8s eta = %.9g  delay = %.9g", to_string(r.protocol), r.eta_analytic, r.delay_analytic);
        if (r.eta_sim) {
            std::printf("  | sim eta = %.9g +- %.3g  delay = %.9g +- %.3g", *r.eta_sim, *r.eta_sim_se, *r.delay_sim,
                        *r.delay_sim_se);
        }
        std::printf("\n");
    }
}

void add_common(CLI::App* cmd, Overrides& o, bool with_config) {
    if (with_config) cmd->add_option("--config", o.config, "key=value run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "write CSV here instead of stdout");
    cmd->add_flag_function(
        "--sim,!--no-sim", [&o](std::int64_t n) { o.sim = n > 0; }, "enable/disable Monte Carlo estimates");
    cmd->add_option_function<std::uint64_t>(
        "--frames", [&o](const std::uint64_t& n) { o.frames = n; }, "simulated frames per point");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&o](const std::uint64_t& s) { o.seed = s; }, "simulation seed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CF ARQ / uncoded ARQ throughput and delay over Gilbert-Elliott channels"};
    app.require_subcommand(1);
    Overrides o;

    auto* point = app.add_subcommand("point", "evaluate one parameter point");
    add_common(point, o, true);
    auto* sweep = app.add_subcommand("sweep", "sweep one parameter and write CSV");
    add_common(sweep, o, true);
    auto* validate = app.add_subcommand("validate", "run the analytic-vs-simulation oracle grid");
    add_common(validate, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    cfarq::SweepConfig cfg;
    try {
        cfg = load(o);
        if (point->parsed()) {
            const auto rows = cfarq::run_point(cfg);
            print_point(rows);
            if (!cfg.out.empty()) emit_csv(cfg, rows);
            return kOk;
        }
        if (sweep->parsed()) {
            cfarq::validate(cfg);
            const auto rows = cfarq::run_sweep(cfg);
            emit_csv(cfg, rows);
            for (const auto& r : rows) {
                if (r.status != "ok") return kNumericalFailure;
            }
            return kOk;
        }
        // validate
        const std::uint64_t frames = o.frames.value_or(100000);
        const std::uint64_t seed = o.seed.value_or(20261016);
        auto points = cfarq::memoryless_oracle_grid();
        const auto burst = cfarq::burst_oracle_grid();
        points.insert(points.end(), burst.begin(), burst.end());
        const auto results = cfarq::run_oracle(points, frames, seed);
        cfarq::print_oracle_table(std::cout, results);
        std::size_t failed = 0;
        for (const auto& r : results) failed += r.passed() ? 0 : 1;
        std::printf("%zu/%zu checks passed\n", results.size() - failed, results.size());
        return failed == 0 ? kOk : kValidationFailure;
    } catch (const cfarq::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const cfarq::InvalidParameter& e) {
        std::fprintf(stderr, "invalid parameter: %s\n", e.what());
        return kConfigError;
    } catch (const cfarq::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\nat parameters:\n%s", e.what(), cfarq::serialize(cfg).c_str());
        return kNumericalFailure;
    }
}
