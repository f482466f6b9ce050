#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "tensionlab/grid.hpp"

using namespace tensionlab;

TEST_CASE("make_grid basics") {
  auto g = make_grid(-1.0, 1.0, 8);
  CHECK(g.h() == 0.25);
  CHECK(g.center(0) == Catch::Approx(-0.875));
  auto g2 = make_grid(0.0, 1.0, 8);
  CHECK(g2.h() == 0.125);
  CHECK_THROWS_AS(make_grid(1.0, 0.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("cell centers match the documented layout") {
  ProfileGrid g{-1.0, 1.0, 4};  // below the N >= 8 floor, layout check only
  CHECK(g.center(0) == Catch::Approx(-0.75));
  CHECK(g.center(1) == Catch::Approx(-0.25));
  CHECK(g.center(2) == Catch::Approx(0.25));
  CHECK(g.center(3) == Catch::Approx(0.75));
}

static GridFunction sample(const ProfileGrid& g, double (*f)(double), TailSpec tails) {
  GridFunction v{g, std::vector<double>(g.n), tails};
  for (int i = 0; i < g.n; ++i) v.values[i] = f(g.center(i));
  return v;
}

TEST_CASE("derivative of affine field is exact including boundary") {
  auto g = make_grid(-2.0, 2.0, 32);
  auto v = sample(g, [](double x) { return x; }, TailSpec::none());
  auto w = derivative(v, 1);
  for (int i = 0; i < g.n; ++i) CHECK(w.values[i] == Catch::Approx(1.0).margin(1e-13));
}

TEST_CASE("second derivative of quadratic is exact on interior cells") {
  auto g = make_grid(-2.0, 2.0, 32);
  auto v = sample(g, [](double x) { return x * x; }, TailSpec::none());
  auto w = derivative(v, 2);
  for (int i = 2; i < g.n - 2; ++i) CHECK(w.values[i] == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("derivative of matching constant with tails is zero with zero tails") {
  auto g = make_grid(0.0, 1.0, 16);
  GridFunction v{g, std::vector<double>(16, 5.0), TailSpec::constant(5.0, 5.0)};
  for (int k : {1, 2, 3}) {
    auto w = derivative(v, k);
    for (double x : w.values) CHECK(x == 0.0);
    CHECK(w.tails == TailSpec::constant(0.0, 0.0));
  }
}

TEST_CASE("derivative k=0 is the identity") {
  auto g = make_grid(0.0, 1.0, 8);
  GridFunction v{g, {1, 2, 3, 4, 5, 6, 7, 8}, TailSpec::none()};
  auto w = derivative(v, 0);
  CHECK(w.values == v.values);
}

TEST_CASE("derivative errors") {
  auto g = make_grid(0.0, 1.0, 8);
  GridFunction v{g, std::vector<double>(8, 0.0), TailSpec::none()};
  CHECK_THROWS_AS(derivative(v, -1), std::invalid_argument);
  CHECK_THROWS_AS(derivative(v, 4), std::invalid_argument);  // N <= 2k
}

TEST_CASE("derivative is linear") {
  auto g = make_grid(-1.0, 1.0, 16);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  GridFunction u{g, std::vector<double>(16), TailSpec::constant(0.3, -0.7)};
  GridFunction v = u;
  for (int i = 0; i < 16; ++i) {
    u.values[i] = d(rng);
    v.values[i] = d(rng);
  }
  v.tails = u.tails;
  const double a = 2.5, b = -1.25;
  GridFunction lin = u;
  for (int i = 0; i < 16; ++i) lin.values[i] = a * u.values[i] + b * v.values[i];
  lin.tails = TailSpec::constant(a * u.tails.c_left + b * v.tails.c_left,
                                a * u.tails.c_right + b * v.tails.c_right);
  auto dl = derivative(lin, 2);
  auto du = derivative(u, 2);
  auto dv = derivative(v, 2);
  for (int i = 0; i < 16; ++i)
    CHECK(dl.values[i] == Catch::Approx(a * du.values[i] + b * dv.values[i]).margin(1e-10));
}

TEST_CASE("derivative_transpose is the adjoint of the linear part") {
  auto g = make_grid(-1.0, 1.0, 24);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (auto tails : {TailSpec::none(), TailSpec::constant(-1.0, 1.0)}) {
    for (int k : {1, 2, 3}) {
      GridFunction x{g, std::vector<double>(24), tails};
      GridFunction zero{g, std::vector<double>(24, 0.0), tails};
      std::vector<double> y(24);
      for (int i = 0; i < 24; ++i) {
        x.values[i] = d(rng);
        y[i] = d(rng);
      }
      // L x = derivative(x) - derivative(0) isolates the linear part.
      auto dx = derivative(x, k);
      auto d0 = derivative(zero, k);
      double lhs = 0.0;
      for (int i = 0; i < 24; ++i) lhs += (dx.values[i] - d0.values[i]) * y[i];
      auto yt = derivative_transpose(y, x, k);
      double rhs = 0.0;
      for (int i = 0; i < 24; ++i) rhs += x.values[i] * yt[i];
      CHECK(lhs == Catch::Approx(rhs).margin(1e-9));
    }
  }
}

TEST_CASE("blowup is a pure coordinate change") {
  auto g = make_grid(0.0, 1.0, 8);
  GridFunction u{g, {1, 2, 3, 4, 5, 6, 7, 8}, TailSpec::constant(-1.0, 1.0)};
  auto v = blowup(u, 0.5);
  CHECK(v.grid.a == 0.0);
  CHECK(v.grid.b == 2.0);
  CHECK(v.values == u.values);
  CHECK(v.tails == u.tails);

  auto id = blowup(u, 1.0);
  CHECK(id.grid == u.grid);
  CHECK(id.values == u.values);

  auto rt = blowup(blowup(u, 0.25), 4.0);
  CHECK(rt.grid.a == u.grid.a);
  CHECK(rt.grid.b == u.grid.b);
  CHECK(rt.values == u.values);

  CHECK_THROWS_AS(blowup(u, 0.0), std::domain_error);
}

TEST_CASE("GridFunction and PinMask validation") {
  auto g = make_grid(0.0, 1.0, 8);
  GridFunction v{g, std::vector<double>(7, 0.0), TailSpec::none()};
  CHECK_THROWS_AS(v.check(), std::invalid_argument);
  v.values.assign(8, 0.0);
  v.values[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(v.check(), std::invalid_argument);

  PinMask pins;
  pins.indices = {0, 9};
  pins.pinned_values = {-1.0, 1.0};
  CHECK_THROWS_AS(pins.check(8), std::invalid_argument);
  pins.indices = {0, 7};
  CHECK_NOTHROW(pins.check(8));
  std::vector<double> vals(8, 0.0);
  pins.apply(vals);
  CHECK(vals[0] == -1.0);
  CHECK(vals[7] == 1.0);
}
