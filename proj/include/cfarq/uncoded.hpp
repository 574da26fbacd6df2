#pragma once

// Uncoded selective-repeat baseline: one packet per frame, per-packet
// feedback, RTT = k. Its round is the A1 branch of the CF graph with its
// own residual d = T - k.

#include "cfarq/cf_model.hpp"

namespace cfarq {

namespace detail {

inline void require_uncoded(const ProtocolParams& p) {
    p.validate();
    if (p.window != 1) throw InvalidParameter("uncoded model needs window = 1");
}

} // namespace detail

inline MatrixGain uncoded_mgf_transmission(const CompositeChannel& c, const ProtocolParams& p,
                                           FormulaVariant variant = FormulaVariant::kSlotExact) {
    detail::require_uncoded(p);
    const Eigen::Matrix4d P = c.transition;
    const Eigen::Matrix4d p00 = c.p(0, 0), p01 = c.p(0, 1), p10 = c.p(1, 0), p11 = c.p(1, 1);
    const Eigen::Matrix4d px0 = c.rev_success, px1 = c.rev_error;
    const int k = p.k;
    const int T = p.timeout;
    const int d = p.residual();

    if (variant == FormulaVariant::kLiteral) {
        // z P^{k-1} (I - z (P10 + P11 P^d) P^k)^{-1} A(z)
        return {4, [=](DerivativePoint z) {
            using namespace detail;
            const GainValue loop = loop_inverse(GainValue::monomial((p10 + p11 * mpow(P, d)) * mpow(P, k), z, 1));
            return GainValue::monomial(mpow(P, k - 1), z, 1) *
                   loop * output_transmissions(z, p00, p01, px0, px1, d, T);
        }};
    }
    return {4, [=](DerivativePoint z) {
        using namespace detail;
        const GainValue loop = loop_inverse(
            GainValue::monomial(p10 * mpow(P, k - 1) + p11 * mpow(P, T - 1), z, 1));
        return DerivativePoint(z) * (loop * output_transmissions(z, p00, p01, px0, px1, d, T));
    }};
}

inline MatrixGain uncoded_mgf_delay(const CompositeChannel& c, const ProtocolParams& p,
                                    FormulaVariant variant = FormulaVariant::kSlotExact) {
    detail::require_uncoded(p);
    const Eigen::Matrix4d P = c.transition;
    const Eigen::Matrix4d p00 = c.p(0, 0), p01 = c.p(0, 1), p10 = c.p(1, 0), p11 = c.p(1, 1);
    const Eigen::Matrix4d px0 = c.rev_success, px1 = c.rev_error;
    const int k = p.k;
    const int T = p.timeout;
    const int d = p.residual();

    if (variant == FormulaVariant::kLiteral) {
        // z^{k-1} P^{k-1} (I - (zP)^{k-1} (z P10 + z P11 z^{d+1} P^{d+1}))^{-1} B(z)
        return {4, [=](DerivativePoint z) {
            using namespace detail;
            const GainValue loop = loop_inverse(
                zp_pow(z, P, k - 1) * (GainValue::monomial(p10, z, 1) +
                                       GainValue::monomial(p11 * mpow(P, d + 1), z, static_cast<unsigned>(d + 2))));
            return zp_pow(z, P, k - 1) * loop * output_delay(z, 1, p00, p01, px0, px1);
        }};
    }
    return {4, [=](DerivativePoint z) {
        using namespace detail;
        const GainValue loop = loop_inverse(
            GainValue::monomial(p10, z, 1) * zp_pow(z, P, k - 1) +
            GainValue::monomial(p11, z, 1) * zp_pow(z, P, T - 1));
        return pow(DerivativePoint(z), static_cast<unsigned>(k - 1)) *
               (loop * output_delay(z, 1, p00, p01, px0, px1));
    }};
}

inline double uncoded_throughput(const CompositeChannel& c, const ProtocolParams& p,
                                 FormulaVariant variant = FormulaVariant::kSlotExact) {
    return 1.0 / pgf_stats(uncoded_mgf_transmission(c, p, variant), c).mean;
}

inline double uncoded_mean_delay(const CompositeChannel& c, const ProtocolParams& p,
                                 FormulaVariant variant = FormulaVariant::kSlotExact) {
    return pgf_stats(uncoded_mgf_delay(c, p, variant), c).mean;
}

} // namespace cfarq
