#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nld/solver.hpp"

using namespace nld;
using nld::test::simpson;

TEST_CASE("grid for_run sizes and padding") {
  const Grid g = Grid::for_run(-2.0, 2.0, 0.25, 1.0);
  CHECK(g.n_cells() == 17);
  CHECK(g.n_steps() == 4);
  CHECK(g.pad() == 12);
  CHECK(g.size() == 17 + 24);
  CHECK(g.x(g.pad()) == doctest::Approx(-2.0));
  CHECK(g.x(g.pad() + 16) == doctest::Approx(2.0));
  CHECK(g.index_of(0.5) == g.pad() + 10);
  CHECK_FALSE(g.index_of(0.3).has_value());
  CHECK(g.step_of(0.75) == 3u);
  CHECK_FALSE(g.step_of(1.25).has_value());
  CHECK_FALSE(g.step_of(0.1).has_value());
}

TEST_CASE("grid rejects off-lattice windows and horizons") {
  CHECK_THROWS_AS(Grid::for_run(-1.0, 1.05, 0.1, 1.0), Error);
  try {
    Grid::for_run(-1.0, 1.0, 0.1, 10.05);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::off_lattice);
  }
  CHECK_THROWS_AS(Grid::for_run(1.0, -1.0, 0.1, 1.0), Error);
  CHECK_THROWS_AS(Grid::for_run(-1.0, 1.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(Grid(0.0, 0.1, 10, 5, 2), Error);
}

TEST_CASE("refined grid keeps the window and horizon") {
  const Grid g = Grid::for_run(-3.0, 5.0, 0.5, 2.0);
  const Grid f = g.refined(4);
  CHECK(f.h() == doctest::Approx(0.125));
  CHECK(f.x_min() == g.x_min());
  CHECK(f.x_max() == doctest::Approx(g.x_max()));
  CHECK(f.horizon() == doctest::Approx(g.horizon()));
  CHECK(f.pad() >= f.n_steps());
}

TEST_CASE("lattice_multiple tolerates roundoff only") {
  CHECK(lattice_multiple(0.3, 0.1) == 3);
  CHECK(lattice_multiple(10.0, 1.0 / 128.0) == 1280);
  CHECK_FALSE(lattice_multiple(3.14159, 0.01).has_value());
  CHECK_FALSE(lattice_multiple(1.0, 0.0).has_value());
  CHECK_FALSE(lattice_multiple(NAN, 0.1).has_value());
}

TEST_CASE("couplings and envelope constant") {
  CHECK(ModelParams::thirring().c_star() == 1.0);
  CHECK(ModelParams::gross_neveu().c_star() == 1.0);
  CHECK(ModelParams{-2.0, 0.5}.c_star() == 4.0);
}

TEST_CASE("gaussian charge matches the closed form") {
  // int |A e^{-((x-c)/w)^2}|^2 dx = A^2 w sqrt(pi/2)
  const DataSpec spec{DataFamily::gaussian, {1.5, 0.3, 0.8, 0.4}, {0.7, -1.0, 1.3, -2.0}};
  const Grid g = Grid::for_run(-40.0, 40.0, 1.0 / 64.0, 1.0);
  const auto d = make_initial_data(spec, g);
  const double exact = std::sqrt(M_PI / 2.0) * (1.5 * 1.5 * 0.8 + 0.7 * 0.7 * 1.3);
  CHECK(d.c0() == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("bump samples and charge agree with independent quadrature") {
  const DataSpec spec{DataFamily::bump, {2.0, 1.0, 2.0, 0.0}, {1.0, -1.0, 0.5, 1.0}};
  const Grid g = Grid::for_run(-5.0, 5.0, 1.0 / 256.0, 1.0);
  const auto d = make_initial_data(spec, g);
  const auto bump2 = [](double a, double c, double w) {
    return [=](double x) {
      const double s = (x - c) / w;
      return std::abs(s) < 1.0 ? a * a * std::exp(2.0 - 2.0 / (1.0 - s * s)) : 0.0;
    };
  };
  const double exact = simpson(bump2(2.0, 1.0, 2.0), -1.0, 3.0, 20000) + simpson(bump2(1.0, -1.0, 0.5), -1.5, -0.5, 20000);
  CHECK(d.c0() == doctest::Approx(exact).epsilon(1e-10));
  // peak value and phase
  const auto j = *g.index_of(1.0);
  CHECK(std::abs(d.u0()[j]) == doctest::Approx(2.0));
  const auto k = *g.index_of(-1.0);
  CHECK(std::arg(d.v0()[k]) == doctest::Approx(1.0));
}

TEST_CASE("support of each family") {
  const auto g = pulse_support(DataFamily::gaussian, {1.0, 0.0, 1.0, 0.0});
  REQUIRE(g);
  CHECK(g->hi == doctest::Approx(std::sqrt(std::log(1e300))));
  const auto b = pulse_support(DataFamily::bump, {1.0, 2.0, 0.5, 0.0});
  REQUIRE(b);
  CHECK(b->lo == 1.5);
  CHECK(b->hi == 2.5);
  CHECK_FALSE(pulse_support(DataFamily::zero, {}).has_value());
  CHECK_FALSE(pulse_support(DataFamily::gaussian, {0.0, 0.0, 1.0, 0.0}).has_value());
}

TEST_CASE("data outside the grid is a sizing error") {
  const Grid g = Grid::for_run(-5.0, 5.0, 0.1, 1.0);
  try {
    make_initial_data(test::gaussian_pair(), g);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::support_overflow);
    CHECK(std::string(e.what()).find("enlarge") != std::string::npos);
  }
}

TEST_CASE("separated family requires disjoint ordered supports") {
  DataSpec spec = test::separated_pair();
  CHECK(validate(spec, -10.0, 10.0).empty());
  std::swap(spec.u.center, spec.v.center);
  const auto errors = validate(spec, -10.0, 10.0);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("strictly right") != std::string::npos);
}

TEST_CASE("validate reports every malformed shape") {
  DataSpec spec{DataFamily::gaussian, {1.0, 0.0, -1.0, 0.0}, {NAN, 0.0, 1.0, INFINITY}};
  const auto errors = validate(spec, -40.0, 40.0);
  CHECK(errors.size() == 3);
}

TEST_CASE("init_state: zero, gaussian and separated data") {
  const Grid g = Grid::for_run(-30.0, 30.0, 1.0 / 16.0, 1.0);
  SUBCASE("zero data gives the zero field") {
    const auto d = make_initial_data({DataFamily::zero, {}, {}}, g);
    const auto f = init_state(d, g);
    for (std::size_t j = 0; j < f.u.size(); ++j) {
      CHECK(f.u[j] == Complex{});
      CHECK(f.v[j] == Complex{});
    }
    CHECK(charge(f) == 0.0);
  }
  SUBCASE("charge equals c0") {
    const auto d = make_initial_data(test::gaussian_pair(), g);
    CHECK(charge(init_state(d, g)) == doctest::Approx(d.c0()).epsilon(1e-10));
  }
  SUBCASE("separated data has u v = 0 pointwise") {
    const auto d = make_initial_data(test::separated_pair(), g);
    const auto f = init_state(d, g);
    for (std::size_t j = 0; j < f.u.size(); ++j) CHECK(f.u[j] * f.v[j] == Complex{});
  }
  SUBCASE("padding is zero") {
    const auto d = make_initial_data(test::gaussian_pair(), g);
    const auto f = init_state(d, g);
    for (std::size_t j = 0; j < g.pad(); ++j) CHECK(f.u[j] == Complex{});
  }
}

TEST_CASE("init_state rejects data from another grid") {
  const Grid a = Grid::for_run(-30.0, 30.0, 0.1, 1.0);
  const Grid b = Grid::for_run(-30.0, 30.0, 0.05, 1.0);
  const auto d = make_initial_data(test::gaussian_pair(), a);
  try {
    init_state(d, b);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::grid_mismatch);
  }
}

TEST_CASE("charge flags non-finite samples") {
  SpinorField f;
  f.h = 0.1;
  f.u = {1.0, NAN};
  f.v = {0.0, 0.0};
  CHECK_THROWS_AS(charge(f), Error);
}

TEST_CASE("family names round-trip") {
  for (auto f : {DataFamily::gaussian, DataFamily::bump, DataFamily::separated, DataFamily::zero})
    CHECK(parse_family(to_string(f)) == f);
  CHECK_FALSE(parse_family("triangle").has_value());
}
