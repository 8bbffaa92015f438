#pragma once

#include <cmath>

namespace capillary {

// Forward-mode dual number. Nesting Dual<Dual<T>> gives higher derivatives.
template <class T>
struct Dual {
  T a{};  // value
  T b{};  // derivative

  Dual() = default;
  Dual(double v) : a(v), b(0.0) {}  // NOLINT: implicit lift of constants
  Dual(T v, T d) : a(v), b(d) {}
};

template <class T>
Dual<T> operator+(const Dual<T>& x, const Dual<T>& y) { return {x.a + y.a, x.b + y.b}; }
template <class T>
Dual<T> operator-(const Dual<T>& x, const Dual<T>& y) { return {x.a - y.a, x.b - y.b}; }
template <class T>
Dual<T> operator-(const Dual<T>& x) { return {-x.a, -x.b}; }
template <class T>
Dual<T> operator*(const Dual<T>& x, const Dual<T>& y) { return {x.a * y.a, x.a * y.b + x.b * y.a}; }
template <class T>
Dual<T> operator/(const Dual<T>& x, const Dual<T>& y) {
  T inv = T(1.0) / y.a;
  return {x.a * inv, (x.b * y.a - x.a * y.b) * inv * inv};
}
template <class T>
Dual<T> operator*(double s, const Dual<T>& x) { return {s * x.a, s * x.b}; }
template <class T>
Dual<T> operator*(const Dual<T>& x, double s) { return {s * x.a, s * x.b}; }
template <class T>
Dual<T> operator+(double s, const Dual<T>& x) { return {s + x.a, x.b}; }
template <class T>
Dual<T> operator+(const Dual<T>& x, double s) { return {s + x.a, x.b}; }
template <class T>
Dual<T> operator-(double s, const Dual<T>& x) { return {s - x.a, -x.b}; }
template <class T>
Dual<T> operator-(const Dual<T>& x, double s) { return {x.a - s, x.b}; }
template <class T>
Dual<T> operator/(const Dual<T>& x, double s) { return {x.a / s, x.b / s}; }
template <class T>
Dual<T> operator/(double s, const Dual<T>& x) { return Dual<T>(s) / x; }

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  T r = sqrt(x.a);
  return {r, x.b / (2.0 * r)};
}

inline double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

template <class T>
Dual<T> ipow(const Dual<T>& x, int k) {
  if (k == 0) return Dual<T>(1.0);
  Dual<T> r = x;
  for (int i = 1; i < k; ++i) r = r * x;
  return r;
}

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

}  // namespace capillary
