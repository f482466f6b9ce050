#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "tensionlab/energy.hpp"

using namespace tensionlab;

namespace {

FunctionalSpec phase_frac_spec(int k, double s, double eps, ProfileGrid grid,
                               DomainMode mode = DomainMode::Bounded) {
  FunctionalSpec spec;
  spec.family = Family::PhaseFractional;
  spec.order = {k, s};
  spec.eps = eps;
  spec.grid = grid;
  spec.domain_mode = mode;
  return spec;
}

GridFunction random_field(const ProfileGrid& g, TailSpec tails, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.2, 1.2);
  GridFunction v{g, std::vector<double>(g.n), tails};
  for (auto& x : v.values) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("well-sitting constant has zero energy") {
  auto g = make_grid(-1.0, 1.0, 32);
  GridFunction v{g, std::vector<double>(32, 1.0), TailSpec::constant(1.0, 1.0)};
  for (auto spec : {phase_frac_spec(0, 0.75, 0.5, g, DomainMode::FullLine),
                    phase_frac_spec(1, 0.25, 0.5, g)}) {
    CHECK(energy(spec, v) == 0.0);
  }
  FunctionalSpec pi;
  pi.family = Family::PhaseInteger;
  pi.order = {2, 0.0};
  pi.eps = 0.25;
  pi.grid = g;
  CHECK(energy(pi, v) == 0.0);
}

TEST_CASE("optimal tanh profile approaches the quartic transition cost") {
  // For W = (1-z^2)^2 the exact one-dimensional cost is 8/3 and tanh(x) is
  // the optimal profile, so the eps = 1 blown-up energy on a long interval
  // evaluates close to 8/3 (equipartition oracle).
  const int n = 2048;
  auto g = make_grid(-20.0, 20.0, n);
  GridFunction v{g, std::vector<double>(n), TailSpec::constant(-1.0, 1.0)};
  for (int i = 0; i < n; ++i) v.values[i] = std::tanh(g.center(i));
  FunctionalSpec spec;
  spec.family = Family::PhaseInteger;
  spec.order = {1, 0.0};
  spec.eps = 1.0;
  spec.grid = g;
  CHECK(energy(spec, v) == Catch::Approx(8.0 / 3.0).epsilon(0.02));
}

TEST_CASE("fd-integer bulk on an affine field is exact") {
  // u(x) = c x with |c| small keeps the truncated quadratic in its parabola:
  // bulk integrates to c^2 (b-a); the second derivative vanishes on interior
  // cells so the singular term contributes only boundary stencil noise.
  auto g = make_grid(0.0, 1.0, 256);
  const double c = 0.5, eps = 0.01;
  GridFunction u{g, std::vector<double>(256), TailSpec::none()};
  for (int i = 0; i < 256; ++i) u.values[i] = c * g.center(i);
  FunctionalSpec spec;
  spec.family = Family::FdInteger;
  spec.potential = Potential::truncated_quadratic();
  spec.order = {2, 0.0};
  spec.eps = eps;
  spec.grid = g;
  CHECK(energy(spec, u) == Catch::Approx(c * c).epsilon(1e-3));
}

TEST_CASE("fd bulk saturates at 1/eps per unit length") {
  // Steep ramp: |u'| = 100 >> 1/sqrt(eps) = ~3.16, so the bulk term clips.
  auto g = make_grid(0.0, 1.0, 128);
  const double eps = 0.1;
  GridFunction u{g, std::vector<double>(128), TailSpec::none()};
  for (int i = 0; i < 128; ++i) u.values[i] = 100.0 * g.center(i);
  FunctionalSpec spec;
  spec.family = Family::FdInteger;
  spec.potential = Potential::truncated_quadratic();
  spec.order = {2, 0.0};
  spec.eps = eps;
  spec.grid = g;
  CHECK(energy(spec, u) == Catch::Approx(1.0 / eps).epsilon(1e-2));
}

TEST_CASE("gradient matches finite differences for every family") {
  auto g = make_grid(-1.0, 1.0, 40);
  std::vector<FunctionalSpec> specs;
  specs.push_back(phase_frac_spec(0, 0.75, 0.5, g, DomainMode::FullLine));
  specs.back().scaling = ScalingVariant::Ms;
  specs.push_back(phase_frac_spec(2, 0.3, 0.7, g));
  {
    FunctionalSpec s;
    s.family = Family::PhaseInteger;
    s.order = {2, 0.0};
    s.eps = 0.4;
    s.grid = g;
    specs.push_back(s);
  }
  {
    FunctionalSpec s;
    s.family = Family::PhaseHalf;
    s.order = {0, 0.5};
    s.eps = 0.05;
    s.grid = g;
    s.scaling = ScalingVariant::Log;
    specs.push_back(s);
  }
  {
    FunctionalSpec s;
    s.family = Family::FdInteger;
    s.potential = Potential::truncated_quadratic();
    s.order = {2, 0.0};
    s.eps = 0.3;
    s.grid = g;
    specs.push_back(s);
  }
  {
    FunctionalSpec s;
    s.family = Family::FdFractional;
    s.potential = Potential::truncated_quadratic();
    s.order = {1, 0.6};
    s.eps = 0.3;
    s.grid = g;
    specs.push_back(s);
  }
  for (const auto& spec : specs) {
    INFO(family_name(spec.family) << " k=" << spec.order.k << " s=" << spec.order.s);
    const bool full_line = spec.domain_mode == DomainMode::FullLine;
    auto v = random_field(g, full_line ? TailSpec::constant(-1.0, 1.0) : TailSpec::none(),
                          17 + spec.order.k);
    EnergyModel model(spec);
    std::vector<double> grad;
    const double base = model.energy_and_gradient(v, grad);
    CHECK(base == Catch::Approx(model.energy(v)).epsilon(1e-14));
    for (int i = 0; i < 40; i += 2) {
      const double h = 1e-6;
      GridFunction vp = v, vm = v;
      vp.values[i] += h;
      vm.values[i] -= h;
      const double fd = (model.energy(vp) - model.energy(vm)) / (2.0 * h);
      const double scale = std::max({1.0, std::abs(fd), std::abs(grad[i])});
      CHECK(std::abs(grad[i] - fd) / scale < 2e-6);
    }
  }
}

TEST_CASE("gradient vanishes at a well-sitting constant") {
  auto g = make_grid(-1.0, 1.0, 16);
  auto spec = phase_frac_spec(0, 0.75, 0.5, g, DomainMode::FullLine);
  GridFunction v{g, std::vector<double>(16, -1.0), TailSpec::constant(-1.0, -1.0)};
  auto grad = gradient(spec, v);
  for (double x : grad.values) CHECK(x == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("pinned coordinates report zero gradient") {
  auto g = make_grid(-1.0, 1.0, 16);
  auto spec = phase_frac_spec(0, 0.75, 0.5, g, DomainMode::FullLine);
  spec.pins.indices = {0, 15};
  spec.pins.pinned_values = {-1.0, 1.0};
  auto v = random_field(g, TailSpec::constant(-1.0, 1.0), 3);
  v.values[0] = -1.0;
  v.values[15] = 1.0;
  auto grad = gradient(spec, v);
  CHECK(grad.values[0] == 0.0);
  CHECK(grad.values[15] == 0.0);
  bool any_nonzero = false;
  for (int i = 1; i < 15; ++i) any_nonzero = any_nonzero || grad.values[i] != 0.0;
  CHECK(any_nonzero);
}

TEST_CASE("scaling identity is exact at eps = 1 and round-off tight below") {
  for (auto [k, s] : {std::pair{0, 0.75}, std::pair{1, 0.6}}) {
    auto g = make_grid(-1.0, 1.0, 64);
    auto spec = phase_frac_spec(k, s, 1.0, g);
    auto u = random_field(g, TailSpec::none(), 11);
    auto [lhs1, rhs1] = scaling_identity_check(spec, u);
    CHECK(lhs1 == rhs1);  // blowup at eps = 1 is the identity
    spec.eps = 0.25;
    auto [lhs, rhs] = scaling_identity_check(spec, u);
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("energy is even under the sign flip of a symmetric potential") {
  auto g = make_grid(-1.0, 1.0, 32);
  auto spec = phase_frac_spec(0, 0.75, 0.5, g, DomainMode::FullLine);
  auto v = random_field(g, TailSpec::constant(-1.0, 1.0), 23);
  GridFunction w = v;
  for (auto& x : w.values) x = -x;
  w.tails = TailSpec::constant(-v.tails.c_left, -v.tails.c_right);
  CHECK(energy(spec, v) == Catch::Approx(energy(spec, w)).epsilon(1e-13));
}

TEST_CASE("energies are nonnegative") {
  auto g = make_grid(-1.0, 1.0, 32);
  for (unsigned seed : {1u, 2u, 3u}) {
    auto v = random_field(g, TailSpec::constant(-1.0, 1.0), seed);
    CHECK(energy(phase_frac_spec(0, 0.75, 0.5, g, DomainMode::FullLine), v) >= 0.0);
    CHECK(energy(phase_frac_spec(2, 0.3, 0.5, g), v) >= 0.0);
  }
}

TEST_CASE("spec validation rejects inconsistent parameters") {
  auto g = make_grid(-1.0, 1.0, 16);
  FunctionalSpec s;
  s.grid = g;

  s.family = Family::PhaseFractional;
  s.order = {0, 1.5};
  CHECK_THROWS_AS(s.check(), std::invalid_argument);

  s.family = Family::PhaseInteger;
  s.order = {0, 0.0};
  CHECK_THROWS_AS(s.check(), std::invalid_argument);

  s.family = Family::PhaseHalf;
  s.order = {0, 0.5};
  s.scaling = ScalingVariant::Log;
  s.eps = 2.0;
  CHECK_THROWS_AS(s.check(), std::invalid_argument);
  s.eps = 0.1;
  CHECK_NOTHROW(s.check());

  s.family = Family::FdInteger;
  s.order = {2, 0.0};
  s.scaling = ScalingVariant::None;
  s.potential = Potential::quartic();
  CHECK_THROWS_AS(s.check(), std::invalid_argument);
  s.potential = Potential::truncated_quadratic();
  CHECK_NOTHROW(s.check());

  s.family = Family::FdFractional;
  s.order = {2, 0.5};
  CHECK_THROWS_AS(s.check(), std::invalid_argument);

  s.family = Family::PhaseFractional;
  s.order = {0, 0.75};
  s.potential = Potential::quartic();
  s.eps = -1.0;
  CHECK_THROWS_AS(s.check(), std::invalid_argument);
}

TEST_CASE("candidate on a mismatched grid is rejected") {
  auto g = make_grid(-1.0, 1.0, 16);
  auto g2 = make_grid(-1.0, 1.0, 32);
  auto spec = phase_frac_spec(0, 0.75, 0.5, g);
  GridFunction v{g2, std::vector<double>(32, 0.0), TailSpec::none()};
  CHECK_THROWS_AS(energy(spec, v), std::invalid_argument);
  auto spec_fl = phase_frac_spec(0, 0.75, 0.5, g, DomainMode::FullLine);
  GridFunction no_tails{g, std::vector<double>(16, 0.0), TailSpec::none()};
  CHECK_THROWS_AS(energy(spec_fl, no_tails), std::invalid_argument);
}

TEST_CASE("full-line energy dominates the bounded energy") {
  // The full-line seminorm adds nonnegative tail interactions.
  auto g = make_grid(-1.0, 1.0, 32);
  auto v = random_field(g, TailSpec::constant(-1.0, 1.0), 31);
  auto full = phase_frac_spec(0, 0.75, 0.5, g, DomainMode::FullLine);
  auto bounded = phase_frac_spec(0, 0.75, 0.5, g);
  GridFunction vb = v;
  CHECK(energy(full, v) >= energy(bounded, vb) - 1e-14);
}
