#pragma once

// Slot-synchronous Monte Carlo simulator of CF ARQ (window 2) and the
// uncoded baseline (window 1) over sampled Gilbert-Elliott traces.
//
// Protocol as simulated:
//  * A window's packets go out in consecutive slots. In every slot each
//    link makes one Markov step and then draws its erasure from the new
//    state.
//  * The receiver reports in the slot of each packet. The report of a
//    window reaches the sender k-1 slots after the window's last slot and
//    is usable only if the reverse link was clear in every slot of the
//    window.
//  * Report says "all DoF in": done. "Some DoF in" (window 2 only): the
//    missing packet is resent at once. "Nothing": the window is resent at
//    once and the receiver starts a fresh generation.
//  * Report lost: if the receiver decoded, it repeats its ACK every slot
//    until one gets through; otherwise the sender resends the window when
//    the timer (T slots from the transmission) expires. Every timer expiry
//    with no ACK in hand is a retransmission, also while waiting for a
//    lost ACK.
//  * Frames are independent: each starts from a fresh channel state drawn
//    from the distribution after a successful forward slot.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <vector>

#include "cfarq/channel.hpp"
#include "cfarq/error.hpp"
#include "cfarq/protocol.hpp"

namespace cfarq {

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; identical on every
/// standard library (unlike std::uniform_real_distribution).
inline double uniform01(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Engine for one frame. The 64-bit seed is a SplitMix64 finalizer over
/// (seed, frame), so every frame has its own reproducible stream.
inline std::mt19937_64 frame_engine(std::uint64_t seed, std::uint64_t frame) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (frame + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return std::mt19937_64(x ^ (x >> 31));
}

/// One link's hidden state. 0 = G, 1 = B.
class LinkState {
public:
    explicit LinkState(const ChannelHmm& channel, int state = 0) : ch_(&channel), state_(state) {}

    /// One Markov step followed by an erasure draw. Returns true if erased.
    bool step(std::mt19937_64& engine) {
        const double leave = state_ == 0 ? ch_->params.q : ch_->params.r;
        if (uniform01(engine) < leave) state_ = 1 - state_;
        const double eps = state_ == 0 ? ch_->params.eps_good : ch_->params.eps_bad;
        return uniform01(engine) < eps;
    }

    int state() const { return state_; }

private:
    const ChannelHmm* ch_;
    int state_;
};

inline int draw_state(std::mt19937_64& engine, double p_bad) {
    return uniform01(engine) < p_bad ? 1 : 0;
}

} // namespace detail

/// Erasure trace of a single link; the initial state is drawn from pi.
class ChannelTraceSampler {
public:
    ChannelTraceSampler(ChannelHmm channel, std::uint64_t seed)
        : channel_(std::move(channel)), engine_(seed), link_(channel_) {
        link_ = detail::LinkState(channel_, detail::draw_state(engine_, channel_.stationary(1)));
    }

    ChannelTraceSampler(const ChannelTraceSampler&) = delete;
    ChannelTraceSampler& operator=(const ChannelTraceSampler&) = delete;

    /// Advances one slot; true if that slot is erased.
    bool next() { return link_.step(engine_); }

    int current_state() const { return link_.state(); }
    const ChannelHmm& channel() const { return channel_; }

private:
    ChannelHmm channel_;
    std::mt19937_64 engine_;
    detail::LinkState link_;
};

/// Fraction of erased slots over n_slots draws.
inline double estimate_trace_erasure(ChannelTraceSampler& sampler, std::uint64_t n_slots) {
    if (n_slots == 0) throw InvalidParameter("estimate_trace_erasure needs n_slots >= 1");
    std::uint64_t erased = 0;
    for (std::uint64_t i = 0; i < n_slots; ++i) erased += sampler.next() ? 1 : 0;
    return static_cast<double>(erased) / static_cast<double>(n_slots);
}

struct SimOptions {
    std::uint64_t slot_cap = 10'000'000; ///< per frame
};

struct SimStats {
    std::uint64_t frames_completed = 0;
    std::uint64_t total_transmissions = 0;
    std::vector<std::uint64_t> per_frame_delay_slots;
    std::vector<std::uint64_t> per_frame_transmissions;
    double throughput_estimate = 0.0;  ///< frames / transmissions = 1 / mean tau
    double mean_delay_estimate = 0.0;
    double std_error_throughput = 0.0; ///< delta method on mean tau
    double std_error_delay = 0.0;

    friend bool operator==(const SimStats&, const SimStats&) = default;
};

namespace detail {

struct FrameOutcome {
    std::uint64_t transmissions = 0;
    std::uint64_t delay = 0;
};

class FrameSimulator {
public:
    FrameSimulator(const ChannelHmm& fwd, const ChannelHmm& rev, const ProtocolParams& p,
                   const SimOptions& opt, std::mt19937_64& engine)
        : p_(p), opt_(opt), engine_(engine), fwd_(fwd), rev_(rev) {
        // Forward state after a successful slot: weights pi_i P_ij (1 - eps_j).
        const Eigen::RowVector2d w = fwd.stationary * fwd.success;
        fwd_ = LinkState(fwd, draw_state(engine_, w(1) / w.sum()));
        rev_ = LinkState(rev, draw_state(engine_, rev.stationary(1)));
    }

    FrameOutcome run() {
        FrameOutcome out;
        bool full_window = true;
        for (;;) {
            const std::uint64_t start = now_;
            const int packets = full_window ? p_.window : 1;
            ++out.transmissions;

            int received = 0;
            bool report_ok = true;
            for (int i = 0; i < packets; ++i) {
                const auto [fwd_erased, rev_erased] = slot();
                received += fwd_erased ? 0 : 1;
                report_ok = report_ok && !rev_erased;
            }
            const std::uint64_t report_arrival = now_ + static_cast<std::uint64_t>(p_.k - 1);
            const std::uint64_t expiry = start + static_cast<std::uint64_t>(p_.timeout);

            if (received == packets) {
                if (report_ok) {
                    out.delay = report_arrival;
                    return out;
                }
                wait_for_ack(start, out);
                return out;
            }
            if (report_ok) {
                // NACK or partial ACK: act as soon as the report arrives.
                full_window = full_window && received == 0;
                advance_to(report_arrival);
            } else {
                // Nothing usable came back: resend the same thing at timeout.
                advance_to(expiry);
            }
        }
    }

private:
    std::pair<bool, bool> slot() {
        if (++now_ > opt_.slot_cap) {
            std::ostringstream os;
            os << "frame exceeded the slot cap of " << opt_.slot_cap;
            throw Divergence(os.str());
        }
        const bool f = fwd_.step(engine_);
        const bool r = rev_.step(engine_);
        return {f, r};
    }

    void advance_to(std::uint64_t t) {
        while (now_ < t) slot();
    }

    // The receiver holds everything and repeats its ACK each slot. ACK sent
    // in slot s arrives at s + k - 1. Timer expiries strictly before that
    // arrival each trigger a retransmission.
    void wait_for_ack(std::uint64_t start, FrameOutcome& out) {
        const auto T = static_cast<std::uint64_t>(p_.timeout);
        for (;;) {
            const auto [fwd_erased, rev_erased] = slot();
            (void)fwd_erased;
            if (!rev_erased) {
                const std::uint64_t arrival = now_ + static_cast<std::uint64_t>(p_.k - 1);
                out.transmissions += (arrival - start - 1) / T;
                out.delay = arrival;
                return;
            }
        }
    }

    ProtocolParams p_;
    SimOptions opt_;
    std::mt19937_64& engine_;
    LinkState fwd_;
    LinkState rev_;
    std::uint64_t now_ = 0;
};

inline SimStats summarize(std::vector<std::uint64_t> delays, std::vector<std::uint64_t> transmissions) {
    SimStats s;
    const auto n = static_cast<double>(delays.size());
    s.frames_completed = delays.size();
    double sum_tx = 0, sum_tx2 = 0, sum_d = 0, sum_d2 = 0;
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const auto tx = static_cast<double>(transmissions[i]);
        const auto d = static_cast<double>(delays[i]);
        s.total_transmissions += transmissions[i];
        sum_tx += tx;
        sum_tx2 += tx * tx;
        sum_d += d;
        sum_d2 += d * d;
    }
    const double mean_tx = sum_tx / n;
    s.mean_delay_estimate = sum_d / n;
    s.throughput_estimate = 1.0 / mean_tx;
    if (delays.size() > 1) {
        const double var_tx = std::max(0.0, (sum_tx2 - n * mean_tx * mean_tx) / (n - 1));
        const double var_d = std::max(0.0, (sum_d2 - n * s.mean_delay_estimate * s.mean_delay_estimate) / (n - 1));
        s.std_error_throughput = std::sqrt(var_tx / n) / (mean_tx * mean_tx);
        s.std_error_delay = std::sqrt(var_d / n);
    }
    s.per_frame_delay_slots = std::move(delays);
    s.per_frame_transmissions = std::move(transmissions);
    return s;
}

inline SimStats simulate(const ChannelHmm& fwd, const ChannelHmm& rev, const ProtocolParams& p,
                         std::uint64_t n_frames, std::uint64_t seed, const SimOptions& opt) {
    p.validate();
    if (n_frames == 0) throw InvalidParameter("simulation needs at least one frame");
    const Eigen::RowVector2d w = fwd.stationary * fwd.success;
    if (!(w.sum() > 0.0)) throw InvalidParameter("forward link is fully erased: no frame can be delivered");

    std::vector<std::uint64_t> delays(n_frames), transmissions(n_frames);
    for (std::uint64_t f = 0; f < n_frames; ++f) {
        std::mt19937_64 engine = frame_engine(seed, f);
        const FrameOutcome o = FrameSimulator(fwd, rev, p, opt, engine).run();
        delays[f] = o.delay;
        transmissions[f] = o.transmissions;
    }
    return summarize(std::move(delays), std::move(transmissions));
}

} // namespace detail

inline SimStats simulate_cf_arq(const ChannelHmm& fwd, const ChannelHmm& rev, const ProtocolParams& p,
                                std::uint64_t n_frames, std::uint64_t seed, const SimOptions& opt = {}) {
    if (p.window != 2) throw InvalidParameter("simulate_cf_arq needs window = 2");
    return detail::simulate(fwd, rev, p, n_frames, seed, opt);
}

inline SimStats simulate_uncoded(const ChannelHmm& fwd, const ChannelHmm& rev, const ProtocolParams& p,
                                 std::uint64_t n_frames, std::uint64_t seed, const SimOptions& opt = {}) {
    if (p.window != 1) throw InvalidParameter("simulate_uncoded needs window = 1");
    return detail::simulate(fwd, rev, p, n_frames, seed, opt);
}

} // namespace cfarq
