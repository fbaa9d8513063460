#pragma once

// Closed forms of W(u,v) = alpha |u|^2 |v|^2 + beta (conj(u) v + u conj(v))^2
// and of its Wirtinger derivatives N1 = dW/d conj(u), N2 = dW/d conj(v).

#include "nld/fields.hpp"

namespace nld {

struct SpinorPair {
  Complex u;
  Complex v;
};

namespace detail {
// conj(u) v + u conj(v) = 2 Re(conj(u) v), formed in real arithmetic.
inline double cross(Complex u, Complex v) noexcept {
  return 2.0 * (u.real() * v.real() + u.imag() * v.imag());
}
}  // namespace detail

inline double eval_W(SpinorPair p, const ModelParams& m) noexcept {
  const double s = detail::cross(p.u, p.v);
  return m.alpha * std::norm(p.u) * std::norm(p.v) + m.beta * s * s;
}

/// N1 = alpha u |v|^2 + 2 beta (conj(u) v + u conj(v)) v
inline Complex eval_N1(SpinorPair p, const ModelParams& m) noexcept {
  const double s = detail::cross(p.u, p.v);
  return m.alpha * std::norm(p.v) * p.u + 2.0 * m.beta * s * p.v;
}

/// N2 = alpha v |u|^2 + 2 beta (conj(u) v + u conj(v)) u
inline Complex eval_N2(SpinorPair p, const ModelParams& m) noexcept {
  const double s = detail::cross(p.u, p.v);
  return m.alpha * std::norm(p.u) * p.v + 2.0 * m.beta * s * p.u;
}

/// Re(i conj(N1) u) + Re(i conj(N2) v), the pointwise source in the charge
/// balance.  Identically zero for this W; the numerical value measures roundoff.
inline double charge_flux_defect(SpinorPair p, const ModelParams& m) noexcept {
  // Re(i z) = -Im(z)
  const Complex a = std::conj(eval_N1(p, m)) * p.u;
  const Complex b = std::conj(eval_N2(p, m)) * p.v;
  return -a.imag() - b.imag();
}

}  // namespace nld
