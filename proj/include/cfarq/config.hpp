#pragma once

// Flat key=value run configuration with dotted keys, e.g.
//
//   protocol = both
//   fwd.model = burst
//   fwd.e = 0.3
//   fwd.r = 0.1
//   rev.model = memoryless
//   rev.e = 0.1
//   k = 2
//   timeout.offset = 2
//   sweep.param = fwd.e
//   sweep.start = 0.2
//   sweep.stop = 0.6
//   sweep.steps = 9
//   sim.enabled = true
//   sim.frames = 100000
//   sim.seed = 1
//
// '#' starts a comment. Unknown keys are rejected.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cfarq/channel.hpp"
#include "cfarq/error.hpp"
#include "cfarq/protocol.hpp"

namespace cfarq {

enum class ProtocolChoice { kCf, kUncoded, kBoth };

inline const char* to_string(ProtocolChoice p) {
    switch (p) {
    case ProtocolChoice::kCf: return "cf";
    case ProtocolChoice::kUncoded: return "uncoded";
    case ProtocolChoice::kBoth: return "both";
    }
    return "?";
}

/// How one link is described in a config.
struct ChannelSpec {
    enum class Model { kGe, kMemoryless, kBurst };

    Model model = Model::kMemoryless;
    double q = 0.0;
    double r = 1.0;
    double eps_g = 0.0;
    double eps_b = 1.0;
    double e = 0.0;

    ChannelHmm build() const {
        switch (model) {
        case Model::kGe: return build_ge_channel({q, r, eps_g, eps_b});
        case Model::kMemoryless: return memoryless_channel(e);
        case Model::kBurst: return burst_channel(e, r, eps_g, eps_b);
        }
        throw ConfigError("unknown channel model");
    }

    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

inline const char* to_string(ChannelSpec::Model m) {
    switch (m) {
    case ChannelSpec::Model::kGe: return "ge";
    case ChannelSpec::Model::kMemoryless: return "memoryless";
    case ChannelSpec::Model::kBurst: return "burst";
    }
    return "?";
}

struct SweepAxis {
    std::string param;
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;

    /// Evenly spaced values, endpoints included.
    std::vector<double> values() const {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(steps));
        for (int i = 0; i < steps; ++i) {
            v.push_back(steps == 1 ? start : start + (stop - start) * i / (steps - 1));
        }
        return v;
    }

    friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct SimSettings {
    bool enabled = false;
    std::uint64_t frames = 100000;
    std::uint64_t seed = 1;

    friend bool operator==(const SimSettings&, const SimSettings&) = default;
};

struct SweepConfig {
    ProtocolChoice protocol = ProtocolChoice::kBoth;
    ChannelSpec fwd;
    ChannelSpec rev;
    int k = 2;
    /// Exactly one of timeout / timeout_offset is set. The offset is
    /// relative to each protocol's own RTT.
    std::optional<int> timeout;
    std::optional<int> timeout_offset = 1;
    std::optional<SweepAxis> sweep;
    SimSettings sim;
    std::string out;
    FormulaVariant variant = FormulaVariant::kSlotExact;

    ProtocolParams params_for(ProtocolChoice p) const {
        ProtocolParams pp = p == ProtocolChoice::kCf ? ProtocolParams::cf(k, 0) : ProtocolParams::uncoded(k, 0);
        pp.timeout = timeout ? *timeout : pp.rtt() + *timeout_offset;
        return pp;
    }

    std::vector<ProtocolChoice> protocols() const {
        if (protocol == ProtocolChoice::kBoth) return {ProtocolChoice::kCf, ProtocolChoice::kUncoded};
        return {protocol};
    }

    friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty() || !std::isfinite(x)) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    return x;
}

inline int to_int(const std::string& key, double x) {
    if (x != std::floor(x) || std::abs(x) > 1e9) {
        std::ostringstream os;
        os << key << ": expected an integer, got " << x;
        throw ConfigError(os.str());
    }
    return static_cast<int>(x);
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long x = 0;
    try {
        if (!v.empty() && v[0] != '-') x = std::stoull(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty()) throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
    return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double* channel_field(ChannelSpec& c, const std::string& field) {
    if (field == "q") return &c.q;
    if (field == "r") return &c.r;
    if (field == "eps_g") return &c.eps_g;
    if (field == "eps_b") return &c.eps_b;
    if (field == "e") return &c.e;
    return nullptr;
}

/// Fields that a model actually reads; anything else is rejected so a
/// typo cannot silently fall back to a default.
inline bool channel_field_used(ChannelSpec::Model m, const std::string& field) {
    switch (m) {
    case ChannelSpec::Model::kGe: return field == "q" || field == "r" || field == "eps_g" || field == "eps_b";
    case ChannelSpec::Model::kMemoryless: return field == "e";
    case ChannelSpec::Model::kBurst: return field == "e" || field == "r" || field == "eps_g" || field == "eps_b";
    }
    return false;
}

inline bool is_sweepable(const std::string& key) {
    static const char* fields[] = {"q", "r", "eps_g", "eps_b", "e"};
    for (const char* side : {"fwd.", "rev."}) {
        for (const char* f : fields) {
            if (key == std::string(side) + f) return true;
        }
    }
    return key == "k" || key == "timeout" || key == "timeout.offset";
}

} // namespace detail

/// Replaces the swept parameter with `value` and drops the sweep axis.
inline SweepConfig substitute(const SweepConfig& cfg, const std::string& param, double value) {
    SweepConfig c = cfg;
    c.sweep.reset();
    if (param == "k") {
        c.k = detail::to_int(param, value);
    } else if (param == "timeout") {
        c.timeout = detail::to_int(param, value);
        c.timeout_offset.reset();
    } else if (param == "timeout.offset") {
        c.timeout_offset = detail::to_int(param, value);
        c.timeout.reset();
    } else if (param.rfind("fwd.", 0) == 0 || param.rfind("rev.", 0) == 0) {
        ChannelSpec& ch = param[0] == 'f' ? c.fwd : c.rev;
        double* f = detail::channel_field(ch, param.substr(4));
        if (f == nullptr) throw ConfigError("sweep.param: unknown parameter '" + param + "'");
        *f = value;
    } else {
        throw ConfigError("sweep.param: unknown parameter '" + param + "'");
    }
    return c;
}

/// Checks that every point the config describes is a valid model input.
inline void validate(const SweepConfig& cfg) {
    auto check_point = [](const SweepConfig& c) {
        try {
            c.fwd.build();
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string("fwd: ") + e.what());
        }
        try {
            c.rev.build();
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string("rev: ") + e.what());
        }
        if (c.timeout.has_value() == c.timeout_offset.has_value()) {
            throw ConfigError("exactly one of timeout / timeout.offset must be set");
        }
        for (ProtocolChoice p : c.protocols()) {
            try {
                c.params_for(p).validate();
            } catch (const InvalidParameter& e) {
                throw ConfigError(std::string(to_string(p)) + ": " + e.what());
            }
        }
    };
    if (cfg.sim.enabled && cfg.sim.frames == 0) throw ConfigError("sim.frames must be positive");
    if (!cfg.sweep) {
        check_point(cfg);
        return;
    }
    const SweepAxis& ax = *cfg.sweep;
    if (!detail::is_sweepable(ax.param)) throw ConfigError("sweep.param: '" + ax.param + "' cannot be swept");
    if (ax.steps < 1) throw ConfigError("sweep.steps must be >= 1");
    if (ax.param.size() > 4 && (ax.param[0] == 'f' || ax.param[0] == 'r')) {
        const ChannelSpec& ch = ax.param[0] == 'f' ? cfg.fwd : cfg.rev;
        if (!detail::channel_field_used(ch.model, ax.param.substr(4))) {
            throw ConfigError("sweep.param: '" + ax.param + "' is not used by the " + to_string(ch.model) + " model");
        }
    }
    for (double v : ax.values()) {
        try {
            check_point(substitute(cfg, ax.param, v));
        } catch (const ConfigError& e) {
            std::ostringstream os;
            os << "at " << ax.param << " = " << v << ": " << e.what();
            throw ConfigError(os.str());
        }
    }
}

inline SweepConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
    }

    SweepConfig cfg;
    bool has_timeout = false, has_offset = false;
    std::optional<std::string> sweep_param;
    SweepAxis axis;
    bool has_start = false, has_stop = false, has_steps = false;

    // Models first, so field keys can be checked against them.
    for (const char* side : {"fwd", "rev"}) {
        ChannelSpec& ch = side[0] == 'f' ? cfg.fwd : cfg.rev;
        const auto it = kv.find(std::string(side) + ".model");
        if (it == kv.end()) continue;
        if (it->second == "ge") ch.model = ChannelSpec::Model::kGe;
        else if (it->second == "memoryless") ch.model = ChannelSpec::Model::kMemoryless;
        else if (it->second == "burst") ch.model = ChannelSpec::Model::kBurst;
        else throw ConfigError(it->first + ": expected ge, memoryless or burst");
    }

    for (const auto& [key, value] : kv) {
        if (key == "protocol") {
            if (value == "cf") cfg.protocol = ProtocolChoice::kCf;
            else if (value == "uncoded") cfg.protocol = ProtocolChoice::kUncoded;
            else if (value == "both") cfg.protocol = ProtocolChoice::kBoth;
            else throw ConfigError("protocol: expected cf, uncoded or both");
        } else if (key == "fwd.model" || key == "rev.model") {
            continue;
        } else if (key.rfind("fwd.", 0) == 0 || key.rfind("rev.", 0) == 0) {
            ChannelSpec& ch = key[0] == 'f' ? cfg.fwd : cfg.rev;
            const std::string field = key.substr(4);
            double* f = detail::channel_field(ch, field);
            if (f == nullptr) throw ConfigError("unknown key " + key);
            if (!detail::channel_field_used(ch.model, field)) {
                throw ConfigError(key + " is not used by the " + to_string(ch.model) + " model");
            }
            *f = detail::parse_double(key, value);
        } else if (key == "k") {
            cfg.k = detail::to_int(key, detail::parse_double(key, value));
        } else if (key == "timeout") {
            cfg.timeout = detail::to_int(key, detail::parse_double(key, value));
            has_timeout = true;
        } else if (key == "timeout.offset") {
            cfg.timeout_offset = detail::to_int(key, detail::parse_double(key, value));
            has_offset = true;
        } else if (key == "sweep.param") {
            sweep_param = value;
        } else if (key == "sweep.start") {
            axis.start = detail::parse_double(key, value);
            has_start = true;
        } else if (key == "sweep.stop") {
            axis.stop = detail::parse_double(key, value);
            has_stop = true;
        } else if (key == "sweep.steps") {
            axis.steps = detail::to_int(key, detail::parse_double(key, value));
            has_steps = true;
        } else if (key == "sim.enabled") {
            cfg.sim.enabled = detail::parse_bool(key, value);
        } else if (key == "sim.frames") {
            cfg.sim.frames = detail::parse_u64(key, value);
        } else if (key == "sim.seed") {
            cfg.sim.seed = detail::parse_u64(key, value);
        } else if (key == "out") {
            cfg.out = value;
        } else if (key == "variant") {
            if (value == "slot-exact") cfg.variant = FormulaVariant::kSlotExact;
            else if (value == "literal") cfg.variant = FormulaVariant::kLiteral;
            else throw ConfigError("variant: expected slot-exact or literal");
        } else {
            throw ConfigError("unknown key " + key);
        }
    }

    if (has_timeout && has_offset) throw ConfigError("timeout and timeout.offset are mutually exclusive");
    if (has_timeout) cfg.timeout_offset.reset();

    if (sweep_param) {
        if (!has_start || !has_stop || !has_steps) {
            throw ConfigError("sweep.param needs sweep.start, sweep.stop and sweep.steps");
        }
        axis.param = *sweep_param;
        cfg.sweep = axis;
    } else if (has_start || has_stop || has_steps) {
        throw ConfigError("sweep.start/stop/steps given without sweep.param");
    }
    return cfg;
}

inline SweepConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

/// Canonical text form; parse_config(serialize(c)) == c.
inline std::string serialize(const SweepConfig& cfg) {
    std::ostringstream os;
    os << "protocol = " << to_string(cfg.protocol) << '\n';
    for (const char* side : {"fwd", "rev"}) {
        const ChannelSpec& ch = side[0] == 'f' ? cfg.fwd : cfg.rev;
        os << side << ".model = " << to_string(ch.model) << '\n';
        for (const char* field : {"q", "r", "eps_g", "eps_b", "e"}) {
            if (!detail::channel_field_used(ch.model, field)) continue;
            ChannelSpec copy = ch;
            os << side << '.' << field << " = " << detail::format_double(*detail::channel_field(copy, field)) << '\n';
        }
    }
    os << "k = " << cfg.k << '\n';
    if (cfg.timeout) os << "timeout = " << *cfg.timeout << '\n';
    if (cfg.timeout_offset) os << "timeout.offset = " << *cfg.timeout_offset << '\n';
    if (cfg.sweep) {
        os << "sweep.param = " << cfg.sweep->param << '\n'
           << "sweep.start = " << detail::format_double(cfg.sweep->start) << '\n'
           << "sweep.stop = " << detail::format_double(cfg.sweep->stop) << '\n'
           << "sweep.steps = " << cfg.sweep->steps << '\n';
    }
    os << "sim.enabled = " << (cfg.sim.enabled ? "true" : "false") << '\n'
       << "sim.frames = " << cfg.sim.frames << '\n'
       << "sim.seed = " << cfg.sim.seed << '\n';
    if (!cfg.out.empty()) os << "out = " << cfg.out << '\n';
    os << "variant = " << to_string(cfg.variant) << '\n';
    return os.str();
}

} // namespace cfarq
