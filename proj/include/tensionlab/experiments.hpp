#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tensionlab/energy.hpp"
#include "tensionlab/hash.hpp"
#include "tensionlab/solver.hpp"
#include "tensionlab/tension.hpp"

namespace tensionlab {

struct TransitionConfig {
  double eta = 0.25;  // inner threshold: crossings between -1+eta and 1-eta
  double r = 0.5;     // outer bands (1+r, 1+2r) and (-1-2r, -1-r)

  void check() const {
    if (!(eta > 0.0 && eta < 0.5)) throw std::invalid_argument("transitions: eta must be in (0,1/2)");
    if (!(r > 0.0)) throw std::invalid_argument("transitions: r must be > 0");
  }
};

struct TransitionCount {
  int inner = 0;
  int outer_upper = 0;
  int outer_lower = 0;
};

namespace detail {

// Completed crossings between levels lo < hi (either direction).
inline int crossings(const std::vector<double>& v, double lo, double hi) {
  int state = 0;  // 0 unset, -1 below lo, +1 above hi
  int count = 0;
  for (double x : v) {
    if (x <= lo) {
      if (state == 1) ++count;
      state = -1;
    } else if (x >= hi) {
      if (state == -1) ++count;
      state = 1;
    }
  }
  return count;
}

}  // namespace detail

inline TransitionCount count_transitions(const GridFunction& v, const TransitionConfig& cfg = {}) {
  cfg.check();
  TransitionCount c;
  c.inner = detail::crossings(v.values, -1.0 + cfg.eta, 1.0 - cfg.eta);
  c.outer_upper = detail::crossings(v.values, 1.0 + cfg.r, 1.0 + 2.0 * cfg.r);
  c.outer_lower = detail::crossings(v.values, -1.0 - 2.0 * cfg.r, -1.0 - cfg.r);
  return c;
}

struct SweepRow {
  double param = 0.0;  // eps or s
  double gap = 0.0;    // distance to the limit exponent (extrapolation abscissa)
  double energy = 0.0;
  int inner_transitions = 0;
  int outer_upper = 0;
  int outer_lower = 0;
  bool converged = false;
  std::uint64_t profile_checksum = 0;
};

struct SweepRecord {
  std::string sweep;   // "eps" | "s"
  std::string label;   // family or sweep kind name
  FractionalOrder order;
  std::vector<SweepRow> rows;
};

struct EpsSweepOptions {
  int n = 4096;
  double a = 0.0;
  double b = 1.0;
  double layer_fraction = 0.1;  // pinned boundary layers, -1 left / +1 right
  TransitionConfig transitions;
  SolverOptions solver;
  ScalingVariant scaling = ScalingVariant::None;
  unsigned seed = 0;
};

// Gamma-limit harness: minimize the bounded-domain energy on (a,b) with
// pinned boundary layers forcing exactly one transition, for each eps.
inline SweepRecord eps_sweep(Family family, const FractionalOrder& order,
                             const Potential& potential, const std::vector<double>& eps_list,
                             const EpsSweepOptions& opts = {}) {
  if (eps_list.empty()) throw std::invalid_argument("eps_sweep: empty eps list");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("eps_sweep: eps list must be strictly decreasing");

  SweepRecord rec;
  rec.sweep = "eps";
  rec.label = family_name(family);
  rec.order = order;

  const ProfileGrid grid = make_grid(opts.a, opts.b, opts.n);
  const int layer = std::max(1, static_cast<int>(opts.layer_fraction * opts.n));
  PinMask pins;
  for (int i = 0; i < layer; ++i) {
    pins.indices.push_back(i);
    pins.pinned_values.push_back(-1.0);
    pins.indices.push_back(opts.n - 1 - i);
    pins.pinned_values.push_back(1.0);
  }

  const double mid = 0.5 * (opts.a + opts.b);
  for (double eps : eps_list) {
    FunctionalSpec spec;
    spec.family = family;
    spec.potential = potential;
    spec.order = order;
    spec.eps = eps;
    spec.grid = grid;
    spec.domain_mode = DomainMode::Bounded;
    spec.scaling = family == Family::PhaseHalf ? ScalingVariant::Log : opts.scaling;
    spec.pins = pins;
    EnergyModel model(spec);

    std::vector<GridFunction> starts;
    InitParams ip;
    ip.center = mid;
    ip.lambda = eps;
    starts.push_back(init_profile(ProfileInit::Tanh, grid, TailSpec::none(), ip));
    ip.lambda = 4.0 * eps;
    starts.push_back(init_profile(ProfileInit::Tanh, grid, TailSpec::none(), ip));
    ip.lambda = eps;
    ip.amplitude = 0.05;
    ip.seed = opts.seed;
    starts.push_back(init_profile(ProfileInit::RandomPerturbed, grid, TailSpec::none(), ip));
    for (auto& s : starts) pins.apply(s.values);

    MultiStartResult ms = multi_start(model, starts, opts.solver);
    TransitionCount tc = count_transitions(ms.best.v, opts.transitions);
    SweepRow row;
    row.param = eps;
    row.gap = family == Family::PhaseHalf ? 1.0 / std::abs(std::log(eps)) : eps;
    row.energy = ms.best.energy;
    row.inner_transitions = tc.inner;
    row.outer_upper = tc.outer_upper;
    row.outer_lower = tc.outer_lower;
    row.converged = ms.best.converged;
    row.profile_checksum = fnv1a(ms.best.v.values);
    rec.rows.push_back(row);
  }
  return rec;
}

enum class SSweepKind { ToHalf, BbmLeft, MsRight };

inline std::string s_sweep_kind_name(SSweepKind k) {
  switch (k) {
    case SSweepKind::ToHalf: return "to_half";
    case SSweepKind::BbmLeft: return "bbm_left";
    case SSweepKind::MsRight: return "ms_right";
  }
  return "?";
}

inline std::vector<double> s_sweep_default_list(SSweepKind kind) {
  switch (kind) {
    case SSweepKind::ToHalf: return {0.75, 0.7, 0.65, 0.6, 0.55};
    case SSweepKind::BbmLeft: return {0.8, 0.9, 0.95, 0.99};
    case SSweepKind::MsRight: return {0.2, 0.1, 0.05, 0.02};
  }
  return {};
}

// Critical-exponent study: per s solve the matching tension; rows feed
// extrapolate. to_half records (2s-1) m_s with gap 2s-1; bbm_left records
// m^{BBM}_{k-1+s} with gap 1-s; ms_right records m^{MS}_{k+s} with gap s.
inline SweepRecord s_sweep(SSweepKind kind, int k, std::vector<double> s_list = {},
                           const Potential& potential = Potential::quartic(),
                           const TensionProblem& base = {}) {
  if (s_list.empty()) s_list = s_sweep_default_list(kind);
  SweepRecord rec;
  rec.sweep = "s";
  rec.label = s_sweep_kind_name(kind);
  rec.order = {k, 0.0};

  for (double s : s_list) {
    TensionProblem p = base;
    p.potential = potential;
    double gap = 0.0;
    double factor = 1.0;
    switch (kind) {
      case SSweepKind::ToHalf:
        p.kind = TensionKind::MKs;
        p.order = {0, s};
        gap = 2.0 * s - 1.0;
        factor = gap;
        break;
      case SSweepKind::BbmLeft:
        p.kind = TensionKind::MBbm;
        p.order = {k - 1, s};
        gap = 1.0 - s;
        break;
      case SSweepKind::MsRight:
        p.kind = TensionKind::MMs;
        p.order = {k, s};
        gap = s;
        break;
    }
    TensionResult r = solve_profile(p);
    TransitionCount tc = count_transitions(r.profile);
    SweepRow row;
    row.param = s;
    row.gap = gap;
    row.energy = factor * r.value;
    row.inner_transitions = tc.inner;
    row.outer_upper = tc.outer_upper;
    row.outer_lower = tc.outer_lower;
    row.converged = r.converged;
    row.profile_checksum = fnv1a(r.profile.values);
    rec.rows.push_back(row);
  }
  return rec;
}

struct Extrapolation {
  double limit = 0.0;
  double slope = 0.0;
  double residual = 0.0;  // max relative deviation of the fit
};

// Least-squares affine fit energy = limit + slope * gap over converged rows.
inline Extrapolation extrapolate(const SweepRecord& rec) {
  std::vector<double> gaps, vals;
  for (const auto& row : rec.rows)
    if (row.converged) {
      gaps.push_back(row.gap);
      vals.push_back(row.energy);
    }
  if (gaps.size() < 3)
    throw std::invalid_argument("extrapolate: needs >= 3 converged rows");
  Extrapolation out;
  detail::affine_fit(gaps, vals, out.limit, out.slope, out.residual);
  return out;
}

struct PointwiseRow {
  double s = 0.0;
  double scaled_seminorm = 0.0;
  double target = 0.0;
};

// (1-s) [v]_s^2 -> int |v'|^2 as s -> 1^-, at the level of a fixed smooth v.
inline std::vector<PointwiseRow> pointwise_bbm_check(const GridFunction& v,
                                                     const std::vector<double>& s_list) {
  v.check();
  GridFunction dv = derivative(v, 1);
  double target = 0.0;
  for (double x : dv.values) target += x * x;
  target *= v.grid.h();
  std::vector<PointwiseRow> rows;
  for (double s : s_list) {
    KernelMatrix K(v.grid, s);
    rows.push_back({s, (1.0 - s) * seminorm(v, K), target});
  }
  return rows;
}

// s [v]_s^2 -> 2 int |v|^2 as s -> 0^+ for compactly supported v (zero
// tails; the analytic core-tail terms carry the divergent mass).
inline std::vector<PointwiseRow> pointwise_ms_check(const GridFunction& v,
                                                    const std::vector<double>& s_list) {
  v.check();
  if (v.tails.is_constant() && (v.tails.c_left != 0.0 || v.tails.c_right != 0.0))
    throw std::invalid_argument("pointwise_ms_check: requires zero tails");
  GridFunction w = v;
  w.tails = TailSpec::constant(0.0, 0.0);
  double target = 0.0;
  for (double x : w.values) target += x * x;
  target *= 2.0 * v.grid.h();
  std::vector<PointwiseRow> rows;
  for (double s : s_list) {
    KernelMatrix K(v.grid, s);
    rows.push_back({s, s * seminorm(w, K), target});
  }
  return rows;
}

}  // namespace tensionlab
