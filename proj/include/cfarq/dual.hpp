#pragma once

#include <cmath>
#include <ostream>

namespace cfarq {

// First-order dual number: value + derivative * epsilon with epsilon^2 = 0.
// Only the arithmetic the generating-function code needs is provided.
template <typename T>
class Dual {
public:
    constexpr Dual() = default;
    constexpr Dual(T value) : value_(value) {} // NOLINT: implicit lift of constants
    constexpr Dual(T value, T derivative) : value_(value), derivative_(derivative) {}

    /// The independent variable x seeded with dx/dx = 1.
    static constexpr Dual variable(T x) { return Dual(x, T(1)); }

    constexpr T value() const { return value_; }
    constexpr T derivative() const { return derivative_; }

    constexpr Dual& operator+=(const Dual& o) {
        value_ += o.value_;
        derivative_ += o.derivative_;
        return *this;
    }
    constexpr Dual& operator-=(const Dual& o) {
        value_ -= o.value_;
        derivative_ -= o.derivative_;
        return *this;
    }
    constexpr Dual& operator*=(const Dual& o) {
        derivative_ = derivative_ * o.value_ + value_ * o.derivative_;
        value_ *= o.value_;
        return *this;
    }
    constexpr Dual& operator/=(const Dual& o) {
        derivative_ = (derivative_ * o.value_ - value_ * o.derivative_) / (o.value_ * o.value_);
        value_ /= o.value_;
        return *this;
    }

    friend constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
    friend constexpr Dual operator/(Dual a, const Dual& b) { return a /= b; }
    friend constexpr Dual operator-(const Dual& a) { return Dual(-a.value_, -a.derivative_); }

    friend constexpr bool operator==(const Dual& a, const Dual& b) {
        return a.value_ == b.value_ && a.derivative_ == b.derivative_;
    }

    friend std::ostream& operator<<(std::ostream& os, const Dual& d) {
        return os << '(' << d.value_ << ", " << d.derivative_ << ')';
    }

private:
    T value_{};
    T derivative_{};
};

/// Integer power by repeated squaring; n >= 0.
template <typename T>
constexpr Dual<T> pow(Dual<T> base, unsigned n) {
    Dual<T> result(T(1));
    while (n != 0) {
        if (n & 1u) result *= base;
        base *= base;
        n >>= 1;
    }
    return result;
}

using DerivativePoint = Dual<double>;

} // namespace cfarq
