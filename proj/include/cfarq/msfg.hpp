#pragma once

// Matrix signal-flow graph algebra. A branch gain is a matrix-valued
// function of the formal variable z; graphs are reduced with the series,
// parallel and self-loop equivalences. Gains are evaluated numerically at a
// dual-number point so the value and d/dz come out together, which is all
// that the PGF mean needs.

#include <functional>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "cfarq/channel.hpp"
#include "cfarq/dual.hpp"
#include "cfarq/error.hpp"

namespace cfarq {

/// A square matrix of DerivativePoints stored as separate value and
/// derivative matrices.
struct GainValue {
    Eigen::MatrixXd value;
    Eigen::MatrixXd derivative;

    GainValue() = default;
    GainValue(Eigen::MatrixXd v, Eigen::MatrixXd d) : value(std::move(v)), derivative(std::move(d)) {}

    /// Constant in z.
    static GainValue constant(const Eigen::MatrixXd& m) {
        return {m, Eigen::MatrixXd::Zero(m.rows(), m.cols())};
    }
    static GainValue identity(Eigen::Index n) { return constant(Eigen::MatrixXd::Identity(n, n)); }
    static GainValue zero(Eigen::Index n) { return constant(Eigen::MatrixXd::Zero(n, n)); }

    /// z^power * m.
    static GainValue monomial(const Eigen::MatrixXd& m, DerivativePoint z, unsigned power) {
        const DerivativePoint zp = pow(z, power);
        return {zp.value() * m, zp.derivative() * m};
    }

    Eigen::Index rows() const { return value.rows(); }
    Eigen::Index cols() const { return value.cols(); }

    DerivativePoint at(Eigen::Index i, Eigen::Index j) const { return {value(i, j), derivative(i, j)}; }
};

namespace detail {

inline void require_same_shape(const GainValue& a, const GainValue& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << op << ": " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
        throw DimensionMismatch(os.str());
    }
}

inline void require_chainable(const GainValue& a, const GainValue& b) {
    if (a.cols() != b.rows()) {
        std::ostringstream os;
        os << "series: " << a.rows() << "x" << a.cols() << " then " << b.rows() << "x" << b.cols();
        throw DimensionMismatch(os.str());
    }
}

} // namespace detail

inline GainValue operator*(const GainValue& a, const GainValue& b) {
    detail::require_chainable(a, b);
    return {a.value * b.value, a.derivative * b.value + a.value * b.derivative};
}

inline GainValue operator+(const GainValue& a, const GainValue& b) {
    detail::require_same_shape(a, b, "parallel");
    return {a.value + b.value, a.derivative + b.derivative};
}

inline GainValue operator-(const GainValue& a, const GainValue& b) {
    detail::require_same_shape(a, b, "difference");
    return {a.value - b.value, a.derivative - b.derivative};
}

inline GainValue operator*(DerivativePoint s, const GainValue& g) {
    return {s.value() * g.value, s.derivative() * g.value + s.value() * g.derivative};
}

/// Matrix power g^n (n >= 0).
inline GainValue pow(GainValue base, unsigned n) {
    if (base.rows() != base.cols()) throw DimensionMismatch("pow needs a square gain");
    GainValue result = GainValue::identity(base.rows());
    while (n != 0) {
        if (n & 1u) result = result * base;
        n >>= 1;
        if (n != 0) base = base * base;
    }
    return result;
}

/// Reciprocal condition number above which I - G is treated as singular.
inline constexpr double kSingularConditionLimit = 1e12;

/// (I - g)^{-1} with derivative (I - g)^{-1} g' (I - g)^{-1}.
inline GainValue loop_inverse(const GainValue& g) {
    if (g.rows() != g.cols()) throw DimensionMismatch("self-loop needs a square gain");
    const Eigen::Index n = g.rows();
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - g.value;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond * kSingularConditionLimit > 1.0)) {
        std::ostringstream os;
        os << "self-loop: I - G is singular (reciprocal condition " << rcond << ")";
        throw SingularMatrix(os.str());
    }
    Eigen::MatrixXd inv = lu.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd d = inv * g.derivative * inv;
    return {std::move(inv), std::move(d)};
}

/// Matrix-valued branch gain z -> G(z).
class MatrixGain {
public:
    using Evaluator = std::function<GainValue(DerivativePoint)>;

    MatrixGain(Eigen::Index dim, Evaluator eval) : dim_(dim), eval_(std::move(eval)) {}

    static MatrixGain constant(const Eigen::MatrixXd& m) {
        return {m.rows(), [m](DerivativePoint) { return GainValue::constant(m); }};
    }
    static MatrixGain identity(Eigen::Index n) { return constant(Eigen::MatrixXd::Identity(n, n)); }
    static MatrixGain zero(Eigen::Index n) { return constant(Eigen::MatrixXd::Zero(n, n)); }
    static MatrixGain monomial(const Eigen::MatrixXd& m, unsigned power) {
        return {m.rows(), [m, power](DerivativePoint z) { return GainValue::monomial(m, z, power); }};
    }

    Eigen::Index dim() const { return dim_; }

    GainValue operator()(DerivativePoint z) const {
        GainValue g = eval_(z);
        if (g.rows() != dim_ || g.cols() != dim_) {
            throw DimensionMismatch("gain evaluator returned a matrix of the wrong size");
        }
        return g;
    }

    /// Value and d/dz at a real point.
    GainValue at(double z) const { return (*this)(DerivativePoint::variable(z)); }

private:
    Eigen::Index dim_;
    Evaluator eval_;
};

/// g1 followed by g2 along a path: z -> g1(z) g2(z).
inline MatrixGain series(MatrixGain g1, MatrixGain g2) {
    if (g1.dim() != g2.dim()) throw DimensionMismatch("series: gain dimensions differ");
    const Eigen::Index n = g1.dim();
    return {n, [g1 = std::move(g1), g2 = std::move(g2)](DerivativePoint z) { return g1(z) * g2(z); }};
}

/// Two branches between the same nodes: z -> g1(z) + g2(z).
inline MatrixGain parallel(MatrixGain g1, MatrixGain g2) {
    if (g1.dim() != g2.dim()) throw DimensionMismatch("parallel: gain dimensions differ");
    const Eigen::Index n = g1.dim();
    return {n, [g1 = std::move(g1), g2 = std::move(g2)](DerivativePoint z) { return g1(z) + g2(z); }};
}

/// Self-loop with gain g: z -> (I - g(z))^{-1}.
inline MatrixGain self_loop(MatrixGain g) {
    const Eigen::Index n = g.dim();
    return {n, [g = std::move(g)](DerivativePoint z) { return loop_inverse(g(z)); }};
}

/// Scalar PGF moments extracted from an MGF.
struct PgfStats {
    double mean = 0.0;          ///< Phi'(1)
    double normalization = 0.0; ///< Phi(1)
};

/// Tolerance on |Phi(1) - 1| beyond which pgf_stats reports an
/// unnormalized generating function.
inline constexpr double kNormalizationTolerance = 1e-6;

/// Phi(z) = pi_I Phi(z) 1 / (pi_I 1) at z = 1, for an explicit initial
/// weight vector. Does not check normalization.
inline PgfStats pgf_moments(const MatrixGain& mgf, const Eigen::RowVectorXd& initial_weights) {
    if (initial_weights.size() != mgf.dim()) {
        throw DimensionMismatch("initial vector does not match the MGF dimension");
    }
    const double mass = initial_weights.sum();
    if (!(mass > 0.0)) throw InvalidParameter("initial state vector has zero mass");
    const GainValue g = mgf.at(1.0);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mgf.dim());
    PgfStats s;
    s.normalization = initial_weights.dot(g.value * ones) / mass;
    s.mean = initial_weights.dot(g.derivative * ones) / mass;
    return s;
}

/// Mean and normalization of the PGF extracted with pi_I = pi P_0.
/// Throws NotNormalized when |Phi(1) - 1| > kNormalizationTolerance.
inline PgfStats pgf_stats(const MatrixGain& mgf, const CompositeChannel& composite) {
    const Eigen::RowVectorXd w = composite.initial_weights();
    if (!(w.sum() > 0.0)) {
        throw InvalidParameter("forward link is fully erased: pi_I = 0");
    }
    const PgfStats s = pgf_moments(mgf, w);
    if (!(std::abs(s.normalization - 1.0) <= kNormalizationTolerance)) {
        std::ostringstream os;
        os.precision(12);
        os << "generating function is not normalized: Phi(1) = " << s.normalization;
        throw NotNormalized(os.str(), s.normalization);
    }
    return s;
}

} // namespace cfarq
