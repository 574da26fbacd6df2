#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "cfarq/error.hpp"

namespace cfarq {

namespace detail {

inline bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

inline void require_probability(double p, const char* name) {
    if (!is_probability(p)) {
        std::ostringstream os;
        os << name << " = " << p << " is not a probability in [0, 1]";
        throw InvalidParameter(os.str());
    }
}

} // namespace detail

/// One directional Gilbert-Elliott link. Row/state order is (G, B).
struct GilbertElliottParams {
    double q = 0.0;        ///< P(G -> B)
    double r = 1.0;        ///< P(B -> G); 1/r is the mean burst length
    double eps_good = 0.0; ///< erasure probability in G
    double eps_bad = 0.0;  ///< erasure probability in B

    void validate() const {
        detail::require_probability(q, "q");
        detail::require_probability(r, "r");
        detail::require_probability(eps_good, "eps_G");
        detail::require_probability(eps_bad, "eps_B");
        if (q + r <= 0.0) {
            throw InvalidParameter("q + r = 0: the Gilbert-Elliott chain has no unique stationary law");
        }
    }

    friend bool operator==(const GilbertElliottParams&, const GilbertElliottParams&) = default;
};

/// Hidden Markov view of a link: transition P, and the joint
/// state/observation matrices P_0 = P diag(1-eps), P_1 = P diag(eps).
struct ChannelHmm {
    GilbertElliottParams params;
    Eigen::Matrix2d transition;
    Eigen::Matrix2d success;
    Eigen::Matrix2d error;
    Eigen::RowVector2d stationary;
    double erasure_rate = 0.0;

    Eigen::Vector2d erasure_vector() const { return {params.eps_good, params.eps_bad}; }
};

inline ChannelHmm build_ge_channel(const GilbertElliottParams& params) {
    params.validate();
    ChannelHmm ch;
    ch.params = params;
    ch.transition << 1.0 - params.q, params.q,
                     params.r, 1.0 - params.r;
    const Eigen::Vector2d eps = ch.erasure_vector();
    ch.error = ch.transition * eps.asDiagonal();
    ch.success = ch.transition * (Eigen::Vector2d::Ones() - eps).asDiagonal();
    // Closed form of pi P = pi, pi 1 = 1 for the two-state chain.
    const double total = params.q + params.r;
    ch.stationary << params.r / total, params.q / total;
    ch.erasure_rate = ch.stationary.dot(eps);
    return ch;
}

/// I.i.d. Bernoulli(e) erasures. The chain is also memoryless (q = r = 1/2)
/// and both states share the same erasure probability.
inline ChannelHmm memoryless_channel(double e) {
    detail::require_probability(e, "e");
    return build_ge_channel({0.5, 0.5, e, e});
}

/// Bursty link with stationary erasure rate `e` and mean burst 1/r. q is
/// solved from pi_B = (e - eps_good) / (eps_bad - eps_good).
inline ChannelHmm burst_channel(double e, double r, double eps_good = 0.0, double eps_bad = 1.0) {
    detail::require_probability(e, "e");
    detail::require_probability(r, "r");
    detail::require_probability(eps_good, "eps_G");
    detail::require_probability(eps_bad, "eps_B");
    if (!(eps_bad > eps_good)) {
        throw InvalidParameter("burst channel needs eps_B > eps_G");
    }
    const double pi_bad = (e - eps_good) / (eps_bad - eps_good);
    if (pi_bad < 0.0 || pi_bad >= 1.0) {
        std::ostringstream os;
        os << "erasure rate " << e << " is not reachable with eps_G = " << eps_good
           << ", eps_B = " << eps_bad;
        throw InvalidParameter(os.str());
    }
    if (r == 0.0 && pi_bad > 0.0) {
        throw InvalidParameter("burst channel with r = 0 never leaves B");
    }
    const double q = r * pi_bad / (1.0 - pi_bad);
    if (q > 1.0) {
        std::ostringstream os;
        os << "erasure rate " << e << " with burst rate r = " << r << " needs q = " << q << " > 1";
        throw InvalidParameter(os.str());
    }
    return build_ge_channel({q, r, eps_good, eps_bad});
}

/// Solves pi P = pi, pi 1 = 1 for a row-stochastic P by replacing one
/// balance equation with the normalization row.
inline Eigen::RowVectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
    const Eigen::Index n = transition.rows();
    if (n == 0 || transition.cols() != n) {
        throw DimensionMismatch("stationary_distribution needs a non-empty square matrix");
    }
    Eigen::MatrixXd a = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
        throw SingularMatrix("stationary distribution is not unique");
    }
    return lu.solve(b).transpose();
}

/// Forward x reverse composite channel. Composite state index is
/// 2 * forward_state + reverse_state (Kronecker order).
struct CompositeChannel {
    ChannelHmm forward;
    ChannelHmm reverse;
    Eigen::Matrix4d transition;
    /// obs[i][j]: forward observation i, reverse observation j (0 = ok, 1 = erased).
    std::array<std::array<Eigen::Matrix4d, 2>, 2> obs;
    Eigen::Matrix4d fwd_success; ///< P_0x
    Eigen::Matrix4d fwd_error;   ///< P_1x
    Eigen::Matrix4d rev_success; ///< P_x0
    Eigen::Matrix4d rev_error;   ///< P_x1
    Eigen::RowVector4d stationary;

    const Eigen::Matrix4d& p(int fwd_obs, int rev_obs) const { return obs[fwd_obs][rev_obs]; }

    // Composite P_0 / P_1 are the forward marginals.
    const Eigen::Matrix4d& success() const { return fwd_success; }
    const Eigen::Matrix4d& error() const { return fwd_error; }

    /// pi_I = pi P_0, unnormalized.
    Eigen::RowVector4d initial_weights() const { return stationary * success(); }

    /// pi_I / (pi_I 1). Throws when the forward link never delivers.
    Eigen::RowVector4d initial_distribution() const {
        const Eigen::RowVector4d w = initial_weights();
        const double mass = w.sum();
        if (!(mass > 0.0)) {
            throw InvalidParameter("forward link is fully erased: no frame can ever be delivered");
        }
        return w / mass;
    }
};

inline CompositeChannel compose_channels(const ChannelHmm& fwd, const ChannelHmm& rev) {
    using Eigen::kroneckerProduct;
    CompositeChannel c;
    c.forward = fwd;
    c.reverse = rev;
    c.transition = kroneckerProduct(fwd.transition, rev.transition);
    const std::array<const Eigen::Matrix2d*, 2> f{&fwd.success, &fwd.error};
    const std::array<const Eigen::Matrix2d*, 2> b{&rev.success, &rev.error};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            c.obs[i][j] = kroneckerProduct(*f[i], *b[j]);
        }
    }
    c.fwd_success = c.obs[0][0] + c.obs[0][1];
    c.fwd_error = c.obs[1][0] + c.obs[1][1];
    c.rev_success = c.obs[0][0] + c.obs[1][0];
    c.rev_error = c.obs[0][1] + c.obs[1][1];
    c.stationary = kroneckerProduct(fwd.stationary, rev.stationary);
    return c;
}

} // namespace cfarq
