#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "cfarq/config.hpp"
#include "cfarq/sim.hpp"
#include "cfarq/uncoded.hpp"

namespace cfarq {

struct ReportRow {
    std::string sweep_param;
    std::optional<double> sweep_value;
    ProtocolChoice protocol = ProtocolChoice::kCf;
    double eta_analytic = NAN;
    double delay_analytic = NAN;
    std::optional<double> eta_sim;
    std::optional<double> eta_sim_se;
    std::optional<double> delay_sim;
    std::optional<double> delay_sim_se;
    std::string status = "ok";
};

inline constexpr const char* kCsvHeader =
    "sweep_param,sweep_value,protocol,eta_analytic,delay_analytic,eta_sim,eta_sim_se,delay_sim,delay_sim_se,status";

/// Short machine-readable status for a failed evaluation.
inline std::string status_of(const std::exception& e) {
    if (dynamic_cast<const SingularMatrix*>(&e)) return "singular";
    if (dynamic_cast<const NotNormalized*>(&e)) return "not_normalized";
    if (dynamic_cast<const Divergence*>(&e)) return "sim_divergence";
    if (dynamic_cast<const InvalidParameter*>(&e)) return "invalid_parameter";
    return "error";
}

/// Analytic eta and mean delay for one protocol at one point. Throws on
/// numerical failure.
inline std::pair<double, double> analytic_point(const CompositeChannel& c, ProtocolChoice protocol,
                                                const ProtocolParams& p, FormulaVariant variant) {
    if (protocol == ProtocolChoice::kCf) return {throughput(c, p, variant), mean_delay(c, p, variant)};
    return {uncoded_throughput(c, p, variant), uncoded_mean_delay(c, p, variant)};
}

inline SimStats simulate_point(const ChannelHmm& fwd, const ChannelHmm& rev, ProtocolChoice protocol,
                               const ProtocolParams& p, std::uint64_t frames, std::uint64_t seed) {
    return protocol == ProtocolChoice::kCf ? simulate_cf_arq(fwd, rev, p, frames, seed)
                                           : simulate_uncoded(fwd, rev, p, frames, seed);
}

namespace detail {

/// One row per protocol. When `capture` is set, failures are recorded in
/// the status column; otherwise they propagate.
inline std::vector<ReportRow> evaluate_rows(const SweepConfig& cfg, const std::string& param,
                                            std::optional<double> value, bool capture) {
    std::vector<ReportRow> rows;
    const ChannelHmm fwd = cfg.fwd.build();
    const ChannelHmm rev = cfg.rev.build();
    const CompositeChannel c = compose_channels(fwd, rev);
    for (ProtocolChoice proto : cfg.protocols()) {
        ReportRow row;
        row.sweep_param = param;
        row.sweep_value = value;
        row.protocol = proto;
        const ProtocolParams p = cfg.params_for(proto);
        try {
            std::tie(row.eta_analytic, row.delay_analytic) = analytic_point(c, proto, p, cfg.variant);
        } catch (const Error& e) {
            if (!capture) throw;
            row.status = status_of(e);
        }
        if (cfg.sim.enabled) {
            try {
                const SimStats s = simulate_point(fwd, rev, proto, p, cfg.sim.frames, cfg.sim.seed);
                row.eta_sim = s.throughput_estimate;
                row.eta_sim_se = s.std_error_throughput;
                row.delay_sim = s.mean_delay_estimate;
                row.delay_sim_se = s.std_error_delay;
            } catch (const Error& e) {
                if (!capture) throw;
                if (row.status == "ok") row.status = status_of(e);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string csv_number(double x) {
    if (!std::isfinite(x)) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

inline std::string csv_number(const std::optional<double>& x) { return x ? csv_number(*x) : std::string(); }

} // namespace detail

/// Single evaluation; the config must not carry a sweep axis.
inline std::vector<ReportRow> run_point(const SweepConfig& cfg) {
    if (cfg.sweep) throw ConfigError("point evaluation does not take a sweep axis");
    validate(cfg);
    return detail::evaluate_rows(cfg, "", std::nullopt, false);
}

/// Rows ordered by sweep value, then protocol (cf before uncoded).
inline std::vector<ReportRow> run_sweep(const SweepConfig& cfg) {
    if (!cfg.sweep) throw ConfigError("sweep needs sweep.param / start / stop / steps");
    validate(cfg);
    std::vector<ReportRow> rows;
    for (double v : cfg.sweep->values()) {
        auto point = detail::evaluate_rows(substitute(cfg, cfg.sweep->param, v), cfg.sweep->param, v, true);
        rows.insert(rows.end(), point.begin(), point.end());
    }
    return rows;
}

inline void write_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
    using detail::csv_number;
    os << kCsvHeader << '\n';
    for (const ReportRow& r : rows) {
        os << r.sweep_param << ',' << csv_number(r.sweep_value) << ',' << to_string(r.protocol) << ','
           << csv_number(r.eta_analytic) << ',' << csv_number(r.delay_analytic) << ','
           << csv_number(r.eta_sim) << ',' << csv_number(r.eta_sim_se) << ','
           << csv_number(r.delay_sim) << ',' << csv_number(r.delay_sim_se) << ',' << r.status << '\n';
    }
}

} // namespace cfarq
