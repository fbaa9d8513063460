#include <doctest.h>

#include <cmath>
#include <random>

#include "nld/nonlinearity.hpp"
#include "oracles/wirtinger.hpp"

using namespace nld;

namespace {

using oracle::W_definition;
using oracle::wirtinger_fd;

struct Sample {
  SpinorPair p;
  ModelParams m;
};

Sample draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  return {{{c(rng), c(rng)}, {c(rng), c(rng)}}, {c(rng), c(rng)}};
}

}  // namespace

TEST_CASE("W closed form matches the definition") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto s = draw(rng);
    CHECK(eval_W(s.p, s.m) == doctest::Approx(W_definition(s.p.u, s.p.v, s.m.alpha, s.m.beta)).epsilon(1e-12));
  }
}

TEST_CASE("N1 and N2 match joint central differences of W at second order") {
  std::mt19937_64 rng(7);
  int ratios = 0;
  for (int i = 0; i < 500; ++i) {
    const auto s = draw(rng);
    const auto [a1, a2] = wirtinger_fd(s.p.u, s.p.v, s.m.alpha, s.m.beta, 1e-2);
    const auto [b1, b2] = wirtinger_fd(s.p.u, s.p.v, s.m.alpha, s.m.beta, 5e-3);
    const Complex n1 = eval_N1(s.p, s.m), n2 = eval_N2(s.p, s.m);
    const double e1 = std::abs(a1 - n1) + std::abs(a2 - n2);
    const double e2 = std::abs(b1 - n1) + std::abs(b2 - n2);
    CHECK(e1 < 1e-2 * (1.0 + std::abs(n1) + std::abs(n2)));
    if (e1 > 1e-9) {
      ++ratios;
      CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
    }
  }
  CHECK(ratios > 450);
}

TEST_CASE("envelope |N1| <= c_star |u| |v|^2 and |N2| <= c_star |v| |u|^2") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20000; ++i) {
    const auto s = draw(rng);
    const double c = s.m.c_star();
    CHECK(std::abs(eval_N1(s.p, s.m)) <= c * std::abs(s.p.u) * std::norm(s.p.v) * (1 + 1e-14) + 1e-300);
    CHECK(std::abs(eval_N2(s.p, s.m)) <= c * std::abs(s.p.v) * std::norm(s.p.u) * (1 + 1e-14) + 1e-300);
  }
}

TEST_CASE("with beta = 0 conj(N1) u is real") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-3.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    const SpinorPair p{{c(rng), c(rng)}, {c(rng), c(rng)}};
    const ModelParams m{c(rng), 0.0};
    const Complex a = std::conj(eval_N1(p, m)) * p.u;
    const Complex b = std::conj(eval_N2(p, m)) * p.v;
    CHECK(std::abs(a.imag()) <= 1e-15 * std::abs(a));
    CHECK(std::abs(b.imag()) <= 1e-15 * std::abs(b));
    CHECK(a.real() == doctest::Approx(m.alpha * std::norm(p.u) * std::norm(p.v)).epsilon(1e-13));
  }
}

TEST_CASE("gauge covariance N(e^{i theta} u, e^{i theta} v) = e^{i theta} N") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int i = 0; i < 5000; ++i) {
    const auto s = draw(rng);
    const Complex g = std::polar(1.0, angle(rng));
    const SpinorPair q{g * s.p.u, g * s.p.v};
    const double scale = 1.0 + std::abs(s.p.u) * std::norm(s.p.v) + std::abs(s.p.v) * std::norm(s.p.u);
    CHECK(std::abs(eval_N1(q, s.m) - g * eval_N1(s.p, s.m)) <= 1e-13 * scale * s.m.c_star() + 1e-300);
    CHECK(std::abs(eval_N2(q, s.m) - g * eval_N2(s.p, s.m)) <= 1e-13 * scale * s.m.c_star() + 1e-300);
  }
}

TEST_CASE("charge flux defect vanishes to roundoff") {
  std::mt19937_64 rng(13);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto s = draw(rng);
    const double scale = 1.0 + std::norm(s.p.u) * std::norm(s.p.v);
    worst = std::max(worst, std::abs(charge_flux_defect(s.p, s.m)) / scale);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("named models") {
  const SpinorPair p{{1.0, 2.0}, {0.5, -1.0}};
  // Thirring: N1 = u |v|^2
  const Complex n1 = eval_N1(p, ModelParams::thirring());
  CHECK(std::abs(n1 - p.u * std::norm(p.v)) < 1e-15);
  // Gross-Neveu: N1 = (1/2)(conj(u) v + u conj(v)) v
  const Complex s = std::conj(p.u) * p.v + p.u * std::conj(p.v);
  CHECK(std::abs(eval_N1(p, ModelParams::gross_neveu()) - 0.5 * s * p.v) < 1e-15);
  CHECK(eval_N1({{0.0, 0.0}, {1.0, 1.0}}, ModelParams::thirring()) == Complex{});
}
