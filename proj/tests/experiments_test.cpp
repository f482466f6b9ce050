#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tensionlab/experiments.hpp"

using namespace tensionlab;

namespace {

GridFunction from_values(std::vector<double> vals, double a = 0.0, double b = 1.0) {
  ProfileGrid g{a, b, static_cast<int>(vals.size())};
  return GridFunction{g, std::move(vals), TailSpec::none()};
}

}  // namespace

TEST_CASE("count_transitions on hand-built profiles") {
  // Single clean transition.
  auto one = from_values({-1, -1, -0.9, 0.0, 0.9, 1, 1, 1});
  auto c1 = count_transitions(one);
  CHECK(c1.inner == 1);
  CHECK(c1.outer_upper == 0);
  CHECK(c1.outer_lower == 0);

  // Down-up-down wiggle: three crossings.
  auto three = from_values({1, 1, -1, -1, 1, 1, -1, -1});
  CHECK(count_transitions(three).inner == 3);

  // Shallow dip that never reaches the lower threshold: no crossing back.
  auto shallow = from_values({-1, -1, 1, 1, 0.0, 1, 1, 1});
  CHECK(count_transitions(shallow).inner == 1);

  // Overshoot excursion through the upper outer band counts both the up and
  // the down crossing.
  auto over = from_values({-1, -1, 0, 1, 2.2, 1, 1, 1});
  auto co = count_transitions(over);
  CHECK(co.inner == 1);
  CHECK(co.outer_upper == 2);
  CHECK(co.outer_lower == 0);

  // Constant profile has no crossings.
  auto flat = from_values({0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
  CHECK(count_transitions(flat).inner == 0);

  TransitionConfig bad;
  bad.eta = 0.6;
  CHECK_THROWS_AS(count_transitions(flat, bad), std::invalid_argument);
}

TEST_CASE("eps_sweep: classical family converges to the quartic cost") {
  EpsSweepOptions opts;
  opts.n = 1024;
  auto rec = eps_sweep(Family::PhaseInteger, {1, 0.0}, Potential::quartic(),
                       {0.05, 0.02, 0.01}, opts);
  REQUIRE(rec.rows.size() == 3);
  CHECK(rec.sweep == "eps");
  CHECK(rec.label == "phase-integer");
  for (const auto& row : rec.rows) {
    CHECK(row.converged);
    CHECK(row.inner_transitions == 1);
    CHECK(row.outer_upper == 0);
    CHECK(row.outer_lower == 0);
    CHECK(row.gap == row.param);
    CHECK(row.profile_checksum != 0);
  }
  CHECK(rec.rows.back().energy == Catch::Approx(8.0 / 3.0).epsilon(0.02));
}

TEST_CASE("eps_sweep rejects bad lists") {
  CHECK_THROWS_AS(eps_sweep(Family::PhaseInteger, {1, 0.0}, Potential::quartic(), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      eps_sweep(Family::PhaseInteger, {1, 0.0}, Potential::quartic(), {0.01, 0.05}),
      std::invalid_argument);
}

TEST_CASE("extrapolate recovers an exact affine law") {
  SweepRecord rec;
  rec.sweep = "s";
  for (double gap : {0.4, 0.3, 0.2, 0.1}) {
    SweepRow row;
    row.gap = gap;
    row.energy = 2.5 + 1.75 * gap;
    row.converged = true;
    rec.rows.push_back(row);
  }
  auto ex = extrapolate(rec);
  CHECK(ex.limit == Catch::Approx(2.5).margin(1e-12));
  CHECK(ex.slope == Catch::Approx(1.75).margin(1e-12));
  CHECK(ex.residual == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("extrapolate of constant data has zero slope") {
  SweepRecord rec;
  for (double gap : {0.3, 0.2, 0.1}) {
    SweepRow row;
    row.gap = gap;
    row.energy = 4.0;
    row.converged = true;
    rec.rows.push_back(row);
  }
  auto ex = extrapolate(rec);
  CHECK(ex.limit == Catch::Approx(4.0).margin(1e-12));
  CHECK(ex.slope == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("extrapolate requires at least three converged rows") {
  SweepRecord rec;
  for (double gap : {0.3, 0.2, 0.1}) {
    SweepRow row;
    row.gap = gap;
    row.energy = 1.0;
    row.converged = gap > 0.15;  // only two converged
    rec.rows.push_back(row);
  }
  CHECK_THROWS_AS(extrapolate(rec), std::invalid_argument);
}

TEST_CASE("pointwise derivative-limit check on tanh(x/2)") {
  // int |d/dx tanh(x/2)|^2 = 2/3.
  const int n = 2048;
  auto g = make_grid(-25.0, 25.0, n);
  GridFunction v{g, std::vector<double>(n), TailSpec::constant(-1.0, 1.0)};
  for (int i = 0; i < n; ++i) v.values[i] = std::tanh(0.5 * g.center(i));
  auto rows = pointwise_bbm_check(v, {0.9, 0.95, 0.99});
  CHECK(rows[0].target == Catch::Approx(2.0 / 3.0).epsilon(1e-3));
  for (const auto& r : rows) CHECK(r.scaled_seminorm > 0.0);
  // Closer to s = 1 means closer to the target.
  CHECK(std::abs(rows[2].scaled_seminorm - rows[2].target) <
        std::abs(rows[0].scaled_seminorm - rows[0].target));
  CHECK(rows[2].scaled_seminorm == Catch::Approx(rows[2].target).epsilon(0.05));
}

TEST_CASE("pointwise mass-limit check on a compactly supported bump") {
  const int n = 2048;
  auto g = make_grid(-20.0, 20.0, n);
  GridFunction v{g, std::vector<double>(n), TailSpec::constant(0.0, 0.0)};
  for (int i = 0; i < n; ++i) v.values[i] = std::exp(-g.center(i) * g.center(i));
  auto rows = pointwise_ms_check(v, {0.1, 0.05, 0.02});
  // Target is 2 int v^2 = 2 sqrt(pi/2).
  CHECK(rows[0].target == Catch::Approx(2.0 * std::sqrt(M_PI / 2.0)).epsilon(1e-6));
  CHECK(std::abs(rows[2].scaled_seminorm - rows[2].target) <
        std::abs(rows[0].scaled_seminorm - rows[0].target));
  CHECK(rows[2].scaled_seminorm == Catch::Approx(rows[2].target).epsilon(0.05));

  GridFunction bad = v;
  bad.tails = TailSpec::constant(-1.0, 1.0);
  CHECK_THROWS_AS(pointwise_ms_check(bad, {0.1}), std::invalid_argument);
}

TEST_CASE("transition cost is additive over well-separated interfaces") {
  // Profile with two transitions far apart: energy within 1% of twice the
  // one-interface cost, using the bounded classical functional.
  const int n = 4096;
  const double eps = 0.05;
  auto g = make_grid(0.0, 100.0, n);
  FunctionalSpec spec;
  spec.family = Family::PhaseInteger;
  spec.order = {1, 0.0};
  spec.eps = eps;
  spec.grid = g;
  GridFunction two{g, std::vector<double>(n), TailSpec::none()};
  for (int i = 0; i < n; ++i) {
    const double x = g.center(i);
    two.values[i] = std::tanh((x - 25.0) / eps) * std::tanh(-(x - 75.0) / eps);
  }
  // One-interface reference of the same shape on the same grid.
  GridFunction one{g, std::vector<double>(n), TailSpec::none()};
  for (int i = 0; i < n; ++i) one.values[i] = std::tanh((g.center(i) - 50.0) / eps);
  const double e2 = energy(spec, two);
  const double e1 = energy(spec, one);
  CHECK(e2 == Catch::Approx(2.0 * e1).epsilon(0.01));
  CHECK(count_transitions(two).inner == 2);
  CHECK(count_transitions(one).inner == 1);
}

TEST_CASE("s_sweep default lists and labels") {
  CHECK(s_sweep_default_list(SSweepKind::ToHalf).front() == 0.75);
  CHECK(s_sweep_default_list(SSweepKind::BbmLeft).back() == 0.99);
  CHECK(s_sweep_default_list(SSweepKind::MsRight).back() == 0.02);
  CHECK(s_sweep_kind_name(SSweepKind::ToHalf) == "to_half");
}

TEST_CASE("s_sweep produces converged rows with the advertised gap map") {
  TensionProblem base;
  base.T0 = 5.0;
  base.T_max = 20.0;
  base.N0 = 128;
  base.N_max = 512;
  auto rec = s_sweep(SSweepKind::ToHalf, 0, {0.75, 0.7, 0.65}, Potential::quartic(), base);
  REQUIRE(rec.rows.size() == 3);
  for (const auto& row : rec.rows) {
    CHECK(row.gap == Catch::Approx(2.0 * row.param - 1.0));
    CHECK(row.energy > 0.0);
    CHECK(row.inner_transitions == 1);
  }
}
