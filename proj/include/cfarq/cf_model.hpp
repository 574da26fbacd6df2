#pragma once

// Analytic model of cumulative-feedback ARQ with a window of two coded
// packets. The flow graph has nodes I, A2 (two DoF missing), A1 (one DoF
// missing), C1/C2 (receiver done, ACK lost) and O.
//
// Slot timeline used by FormulaVariant::kSlotExact. A window occupies one
// slot per packet; the composite channel steps once per slot and the
// reverse observation of a slot decides whether the feedback sent in that
// slot survives. Feedback sent in slot s reaches the sender at the end of
// slot s + k - 1. The timer runs T slots from the start of each
// (re)transmission.
//
//   A2 round (2 slots)  : P00C(1) -> O, P01C(1) -> C1, PA(1) -> A1,
//                         P10C(1) -> resend now, P11C(1) -> resend at timeout
//   A1 round (1 slot)   : P00 -> O, P01 -> C2, P10 -> resend now,
//                         P11 -> resend at timeout
//   C1 / C2             : one reverse observation per slot until an ACK
//                         gets through; every timer expiry resends.

#include <array>
#include <cmath>

#include "cfarq/channel.hpp"
#include "cfarq/msfg.hpp"
#include "cfarq/protocol.hpp"

namespace cfarq {

/// Round outcome matrices indexed by n = 1 (both DoF missing) and n = 2
/// (one DoF missing). Storage index is n - 1.
struct CfTransitionSet {
    std::array<Eigen::Matrix4d, 2> p00c; ///< all DoF in, report delivered
    std::array<Eigen::Matrix4d, 2> p01c; ///< all DoF in, report lost
    std::array<Eigen::Matrix4d, 2> p10c; ///< nothing decodable, NACK delivered
    std::array<Eigen::Matrix4d, 2> p11c; ///< report lost while DoF are missing
    Eigen::Matrix4d pa1;                 ///< exactly one DoF in and acknowledged (A2 -> A1)

    const Eigen::Matrix4d& p00(int n) const { return p00c.at(n - 1); }
    const Eigen::Matrix4d& p01(int n) const { return p01c.at(n - 1); }
    const Eigen::Matrix4d& p10(int n) const { return p10c.at(n - 1); }
    const Eigen::Matrix4d& p11(int n) const { return p11c.at(n - 1); }
    Eigen::Matrix4d px0(int n) const { return p00(n) + p10(n); }
    Eigen::Matrix4d px1(int n) const { return p01(n) + p11(n); }
};

inline CfTransitionSet cf_transition_set(const CompositeChannel& c,
                                         FormulaVariant variant = FormulaVariant::kSlotExact) {
    const Eigen::Matrix4d& p00 = c.p(0, 0);
    const Eigen::Matrix4d& p01 = c.p(0, 1);
    const Eigen::Matrix4d& p10 = c.p(1, 0);
    const Eigen::Matrix4d& p11 = c.p(1, 1);

    CfTransitionSet s;
    s.p00c[0] = p00 * p00;
    s.p01c[0] = p01 * p01 + p01 * p00 + p00 * p01;
    s.pa1 = p00 * p10 + p10 * p00;
    if (variant == FormulaVariant::kLiteral) {
        s.p10c[0] = p10 * p10 + p10 * p01 + p01 * p10;
        s.p11c[0] = p11 * p11 + p11 * p10 + p10 * p11;
    } else {
        // The report needs both reverse slots. A round with one packet lost
        // and the report lost looks like a lost NACK to the sender.
        const Eigen::Matrix4d one_lost = c.fwd_success * c.fwd_error + c.fwd_error * c.fwd_success;
        s.p10c[0] = p10 * p10;
        s.p11c[0] = c.fwd_error * c.fwd_error - p10 * p10 + one_lost - s.pa1;
    }

    // One packet outstanding behaves like the uncoded single-packet round.
    s.p00c[1] = p00;
    s.p01c[1] = p01;
    s.p10c[1] = p10;
    s.p11c[1] = p11;
    return s;
}

namespace detail {

inline GainValue cst(const Eigen::MatrixXd& m) { return GainValue::constant(m); }

/// Gain of the wait in C_n measured in transmissions:
///   sum_{i=1}^{d_n} Px1^{i-1} Px0 + Px1^{d_n} (I - z Px1^T)^{-1} z sum_{i=0}^{T-1} Px1^i Px0.
/// Empty sums (d_n <= 0) are zero.
inline GainValue waiting_transmissions(DerivativePoint z, const Eigen::Matrix4d& px0,
                                       const Eigen::Matrix4d& px1, int residual, int timeout) {
    Eigen::Matrix4d before_expiry = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d power = Eigen::Matrix4d::Identity();
    for (int i = 1; i <= residual; ++i) {
        before_expiry += power * px0;
        power = power * px1;
    }
    Eigen::Matrix4d cycle_success = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d cycle_power = Eigen::Matrix4d::Identity();
    for (int i = 0; i < timeout; ++i) {
        cycle_success += cycle_power * px0;
        cycle_power = cycle_power * px1;
    }
    // power == Px1^{max(d_n, 0)}, cycle_power == Px1^T here.
    const GainValue cycles = loop_inverse(GainValue::monomial(cycle_power, z, 1));
    return cst(before_expiry) + cst(power) * cycles * GainValue::monomial(cycle_success, z, 1);
}

inline GainValue output_transmissions(DerivativePoint z, const Eigen::Matrix4d& done,
                                      const Eigen::Matrix4d& ack_lost, const Eigen::Matrix4d& px0,
                                      const Eigen::Matrix4d& px1, int residual, int timeout) {
    return cst(done) + cst(ack_lost) * waiting_transmissions(z, px0, px1, residual, timeout);
}

/// Delay gain of a round output: z^slots (done + ack_lost (I - z Px1)^{-1} z Px0).
inline GainValue output_delay(DerivativePoint z, unsigned slots, const Eigen::Matrix4d& done,
                              const Eigen::Matrix4d& ack_lost, const Eigen::Matrix4d& px0,
                              const Eigen::Matrix4d& px1) {
    const GainValue wait = loop_inverse(GainValue::monomial(px1, z, 1)) * GainValue::monomial(px0, z, 1);
    return GainValue::monomial(done, z, slots) + GainValue::monomial(ack_lost, z, slots) * wait;
}

inline Eigen::Matrix4d mpow(const Eigen::Matrix4d& m, int n) {
    Eigen::Matrix4d r = Eigen::Matrix4d::Identity();
    for (int i = 0; i < n; ++i) r = r * m;
    return r;
}

/// (zP)^n as a gain.
inline GainValue zp_pow(DerivativePoint z, const Eigen::Matrix4d& p, int n) {
    return GainValue::monomial(mpow(p, n), z, static_cast<unsigned>(n));
}

inline void require_cf(const ProtocolParams& p) {
    p.validate();
    if (p.window != 2) throw InvalidParameter("CF ARQ model needs window = 2");
}

} // namespace detail

/// MGF of the number of transmissions per delivered frame (z counts
/// transmission events).
inline MatrixGain mgf_transmission(const CompositeChannel& c, const ProtocolParams& p,
                                   FormulaVariant variant = FormulaVariant::kSlotExact) {
    detail::require_cf(p);
    const CfTransitionSet s = cf_transition_set(c, variant);
    const Eigen::Matrix4d P = c.transition;
    const int k = p.k;
    const int T = p.timeout;
    const int d = p.residual();

    if (variant == FormulaVariant::kLiteral) {
        return {4, [s, P, k, T, d](DerivativePoint z) {
            using namespace detail;
            const GainValue loop1 = loop_inverse(
                GainValue::monomial((s.p10(1) + s.p11(1) * mpow(P * P, d)) * mpow(P, k + 1), z, 1));
            const GainValue loop2 = loop_inverse(
                GainValue::monomial((s.p10(2) + s.p11(2) * mpow(P, d - 1)) * mpow(P, k), z, 1));
            const GainValue a1 = output_transmissions(z, s.p00(1), s.p01(1), s.px0(1), s.px1(1), d, T);
            const GainValue a2 = output_transmissions(z, s.p00(2), s.p01(2), s.px0(2), s.px1(2), d - 1, T);
            return GainValue::monomial(mpow(P, k), z, 1) *
                   (loop1 * a1 + cst(s.pa1) * loop1 * loop2 * a2);
        }};
    }

    const Eigen::Matrix4d px0 = c.rev_success;
    const Eigen::Matrix4d px1 = c.rev_error;
    return {4, [s, P, px0, px1, k, T, d](DerivativePoint z) {
        using namespace detail;
        const Eigen::Matrix4d nack_wait = mpow(P, k - 1);
        const GainValue loop_a2 = loop_inverse(
            GainValue::monomial(s.p10(1) * nack_wait + s.p11(1) * mpow(P, T - 2), z, 1));
        const GainValue loop_a1 = loop_inverse(
            GainValue::monomial(s.p10(2) * nack_wait + s.p11(2) * mpow(P, T - 1), z, 1));
        const GainValue out_a2 = output_transmissions(z, s.p00(1), s.p01(1), px0, px1, d, T);
        const GainValue out_a1 = output_transmissions(z, s.p00(2), s.p01(2), px0, px1, d + 1, T);
        const GainValue to_a1 = GainValue::monomial(s.pa1 * nack_wait, z, 1);
        return DerivativePoint(z) * (loop_a2 * (out_a2 + to_a1 * loop_a1 * out_a1));
    }};
}

/// MGF of the frame delay in slots, from the first transmission to the
/// arrival of the acknowledgment that completes the frame.
inline MatrixGain mgf_delay(const CompositeChannel& c, const ProtocolParams& p,
                            FormulaVariant variant = FormulaVariant::kSlotExact) {
    detail::require_cf(p);
    const CfTransitionSet s = cf_transition_set(c, variant);
    const Eigen::Matrix4d P = c.transition;
    const int k = p.k;
    const int T = p.timeout;
    const int d = p.residual();
    const int rtt = p.rtt();

    if (variant == FormulaVariant::kLiteral) {
        return {4, [s, P, k, d, rtt](DerivativePoint z) {
            using namespace detail;
            const GainValue loop1 = loop_inverse(
                zp_pow(z, P, rtt) * (GainValue::monomial(s.p10(1), z, 1) +
                                     GainValue::monomial(s.p11(1) * mpow(P, d), z, static_cast<unsigned>(d + 1))));
            const GainValue loop2 = loop_inverse(
                zp_pow(z, P, rtt - 1) * (GainValue::monomial(s.p10(2), z, 1) +
                                         GainValue::monomial(s.p11(2) * mpow(P, d + 1), z, static_cast<unsigned>(d + 2))));
            const GainValue b1 = output_delay(z, 1, s.p00(1), s.p01(1), s.px0(1), s.px1(1));
            const GainValue b2 = output_delay(z, 1, s.p00(2), s.p01(2), s.px0(2), s.px1(2));
            return zp_pow(z, P, k) * (loop1 * b1 + GainValue::monomial(s.pa1, z, 1) * loop1 * loop2 * b2);
        }};
    }

    const Eigen::Matrix4d px0 = c.rev_success;
    const Eigen::Matrix4d px1 = c.rev_error;
    return {4, [s, P, px0, px1, k, T](DerivativePoint z) {
        using namespace detail;
        // Window slots carry z each; propagation of the final ACK adds k-1.
        const GainValue loop_a2 = loop_inverse(
            GainValue::monomial(s.p10(1), z, 2) * zp_pow(z, P, k - 1) +
            GainValue::monomial(s.p11(1), z, 2) * zp_pow(z, P, T - 2));
        const GainValue loop_a1 = loop_inverse(
            GainValue::monomial(s.p10(2), z, 1) * zp_pow(z, P, k - 1) +
            GainValue::monomial(s.p11(2), z, 1) * zp_pow(z, P, T - 1));
        const GainValue out_a2 = output_delay(z, 2, s.p00(1), s.p01(1), px0, px1);
        const GainValue out_a1 = output_delay(z, 1, s.p00(2), s.p01(2), px0, px1);
        const GainValue to_a1 = GainValue::monomial(s.pa1, z, 2) * zp_pow(z, P, k - 1);
        return pow(DerivativePoint(z), static_cast<unsigned>(k - 1)) *
               (loop_a2 * (out_a2 + to_a1 * loop_a1 * out_a1));
    }};
}

/// eta = 1 / Phi_tau'(1).
inline double throughput(const CompositeChannel& c, const ProtocolParams& p,
                         FormulaVariant variant = FormulaVariant::kSlotExact) {
    return 1.0 / pgf_stats(mgf_transmission(c, p, variant), c).mean;
}

/// Mean delay Phi_D'(1) in slots.
inline double mean_delay(const CompositeChannel& c, const ProtocolParams& p,
                         FormulaVariant variant = FormulaVariant::kSlotExact) {
    return pgf_stats(mgf_delay(c, p, variant), c).mean;
}

/// Erasure rate seen by a CF window on a symmetric memoryless channel with
/// per-slot erasure e: sqrt(e^4 + 2 e^3 (1 - e)).
inline double cf_erasure_rate(double e) {
    detail::require_probability(e, "e");
    const double e3 = e * e * e;
    return std::sqrt(e3 * e + 2.0 * e3 * (1.0 - e));
}

} // namespace cfarq
