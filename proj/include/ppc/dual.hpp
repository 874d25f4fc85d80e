#pragma once

// Forward-mode dual numbers a + b·eps with eps² = 0. Nesting Dual<Dual<T>>
// yields higher-order mixed partials, which the backstepping recursion uses
// to differentiate virtual controls that already contain first derivatives.

#include <cmath>
#include <type_traits>

namespace ppc {

template <typename T>
struct Dual {
  T val{};
  T der{};

  constexpr Dual() = default;
  constexpr Dual(T v) : val(v), der(T(0)) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(T v, T d) : val(v), der(d) {}

  template <typename S, typename = std::enable_if_t<std::is_arithmetic_v<S> && !std::is_same_v<S, T>>>
  constexpr Dual(S v) : val(T(v)), der(T(0)) {}  // NOLINT(google-explicit-constructor)

  constexpr Dual& operator+=(const Dual& o) {
    val += o.val;
    der += o.der;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    val -= o.val;
    der -= o.der;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    der = der * o.val + val * o.der;
    val *= o.val;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    der = (der * o.val - val * o.der) / (o.val * o.val);
    val /= o.val;
    return *this;
  }
};

template <typename T>
struct is_dual : std::false_type {};
template <typename T>
struct is_dual<Dual<T>> : std::true_type {};

template <typename T>
constexpr Dual<T> operator-(const Dual<T>& a) {
  return {-a.val, -a.der};
}
template <typename T>
constexpr Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
  return a += b;
}
template <typename T>
constexpr Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
  return a -= b;
}
template <typename T>
constexpr Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
  return a *= b;
}
template <typename T>
constexpr Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
  return a /= b;
}

// Mixed operations with plain arithmetic scalars.
#define PPC_DUAL_SCALAR_OPS(op)                                                     \
  template <typename T, typename S, typename = std::enable_if_t<std::is_arithmetic_v<S>>> \
  constexpr Dual<T> operator op(const Dual<T>& a, S s) {                            \
    return a op Dual<T>(s);                                                         \
  }                                                                                 \
  template <typename T, typename S, typename = std::enable_if_t<std::is_arithmetic_v<S>>> \
  constexpr Dual<T> operator op(S s, const Dual<T>& a) {                            \
    return Dual<T>(s) op a;                                                         \
  }
PPC_DUAL_SCALAR_OPS(+)
PPC_DUAL_SCALAR_OPS(-)
PPC_DUAL_SCALAR_OPS(*)
PPC_DUAL_SCALAR_OPS(/)
#undef PPC_DUAL_SCALAR_OPS

template <typename T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.val), a.der * cos(a.val)};
}
template <typename T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.val), -(a.der * sin(a.val))};
}
template <typename T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.val);
  return {e, a.der * e};
}
template <typename T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.val), a.der / a.val};
}
template <typename T>
Dual<T> log1p(const Dual<T>& a) {
  using std::log1p;
  return {log1p(a.val), a.der / (T(1) + a.val)};
}
template <typename T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T r = sqrt(a.val);
  return {r, a.der / (T(2) * r)};
}

/// Innermost double of an arbitrarily nested dual.
inline double value_of(double x) { return x; }
template <typename T>
double value_of(const Dual<T>& x) {
  return value_of(x.val);
}

/// Integer power by repeated squaring; valid for any ring-like scalar.
template <typename T>
T ipow(T base, int exponent) {
  if (exponent < 0) return T(1) / ipow(base, -exponent);
  T result(1.0);
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    base = base * base;
    exponent >>= 1;
  }
  return result;
}

}  // namespace ppc
