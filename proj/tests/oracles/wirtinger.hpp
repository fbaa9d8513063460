#pragma once

// Finite-difference oracle for N1 = dW/d conj(u), N2 = dW/d conj(v).
//
// For fixed v, W is quadratic in (Re u, Im u), so a central difference in u
// alone is exact and shows no truncation order.  Moving u and v together,
// W(u + d a, v + d b) is quartic in d and its central difference carries a
// genuine d^2 error.  With D(a, b) = dW/dd = 2 Re(conj(a) N1 + conj(b) N2):
//   D(1, 1) + D(1, -1) = 4 Re N1,   D(i, i) + D(i, -i) = 4 Im N1,
//   D(1, 1) - D(1, -1) = 4 Re N2,   D(i, i) - D(i, -i) = 4 Im N2.

#include <complex>
#include <utility>

namespace nld::oracle {

using C = std::complex<double>;

// W straight from its definition, in complex arithmetic.
inline double W_definition(C u, C v, double alpha, double beta) {
  const C s = std::conj(u) * v + u * std::conj(v);
  return alpha * std::norm(u) * std::norm(v) + beta * (s * s).real();
}

inline std::pair<C, C> wirtinger_fd(C u, C v, double alpha, double beta, double d) {
  const auto D = [&](C a, C b) {
    return (W_definition(u + d * a, v + d * b, alpha, beta) - W_definition(u - d * a, v - d * b, alpha, beta)) /
           (2.0 * d);
  };
  const C i{0.0, 1.0};
  const double rr_p = D(1.0, 1.0), rr_m = D(1.0, -1.0);
  const double ii_p = D(i, i), ii_m = D(i, -i);
  return {C{rr_p + rr_m, ii_p + ii_m} / 4.0, C{rr_p - rr_m, ii_p - ii_m} / 4.0};
}

}  // namespace nld::oracle
