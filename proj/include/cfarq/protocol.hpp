#pragma once

#include <sstream>

#include "cfarq/error.hpp"

namespace cfarq {

/// Timing parameters shared by the CF ARQ model (window 2) and the uncoded
/// single-packet baseline (window 1). All quantities are in slots.
struct ProtocolParams {
    int k = 2;       ///< feedback latency: a packet's feedback arrives k-1 slots after its slot
    int timeout = 4; ///< T, restarted at every (re)transmission
    int window = 2;  ///< M = N, number of coded packets per frame

    static ProtocolParams cf(int k, int timeout) { return {k, timeout, 2}; }
    static ProtocolParams uncoded(int k, int timeout) { return {k, timeout, 1}; }

    /// RTT = k + M - 1.
    int rtt() const { return k + window - 1; }
    /// d = T - RTT, slots left on the timer after the window's feedback is due.
    int residual() const { return timeout - rtt(); }
    int required_dof() const { return window; }

    void validate() const {
        std::ostringstream os;
        if (window != 1 && window != 2) {
            os << "window = " << window << ": only M = 1 (uncoded) and M = 2 (CF) are modeled";
        } else if (k < 2) {
            os << "k = " << k << ": feedback latency must be at least 2 slots";
        } else if (timeout <= rtt()) {
            os << "timeout T = " << timeout << " must exceed RTT = " << rtt();
        } else {
            return;
        }
        throw InvalidParameter(os.str());
    }

    friend bool operator==(const ProtocolParams&, const ProtocolParams&) = default;
};

/// Which transcription of the generating functions to build.
enum class FormulaVariant {
    /// Every branch derived from one slot timeline; matches the simulator.
    kSlotExact,
    /// Branch gains and transition matrices exactly as printed. Kept for
    /// comparison; they are not normalized for lossy channels.
    kLiteral,
};

inline const char* to_string(FormulaVariant v) {
    return v == FormulaVariant::kSlotExact ? "slot-exact" : "literal";
}

} // namespace cfarq
