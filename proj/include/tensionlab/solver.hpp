#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tensionlab/energy.hpp"
#include "tensionlab/grid.hpp"

namespace tensionlab {

struct SolverOptions {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-8;  // sup norm, scaled by h
  int memory = 10;
  double armijo_constant = 1e-4;
  double backtrack_factor = 0.5;
  unsigned seed = 0;

  void check() const {
    if (max_iterations <= 0) throw std::invalid_argument("solver: max_iterations must be > 0");
    if (!(gradient_tolerance > 0.0 && gradient_tolerance < 1.0))
      throw std::invalid_argument("solver: gradient_tolerance must be in (0,1)");
    if (memory <= 0) throw std::invalid_argument("solver: memory must be > 0");
    if (!(armijo_constant > 0.0)) throw std::invalid_argument("solver: armijo constant must be > 0");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
      throw std::invalid_argument("solver: backtrack factor must be in (0,1)");
  }
};

struct TraceEntry {
  int iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0;  // sup norm
};

struct MinimizeResult {
  GridFunction v;
  double energy = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<TraceEntry> trace;
};

struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg, std::vector<TraceEntry> t = {})
      : std::runtime_error(msg), trace(std::move(t)) {}
  std::vector<TraceEntry> trace;
};

namespace detail {

inline double sup_norm(const std::vector<double>& g) {
  double m = 0.0;
  for (double x : g) m = std::max(m, std::abs(x));
  return m;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
  return r;
}

}  // namespace detail

// Limited-memory quasi-Newton descent with Armijo backtracking. Pins are
// enforced by projection: the model zeroes pinned gradient entries, so every
// search direction leaves pinned values untouched.
inline MinimizeResult minimize(const EnergyModel& model, const GridFunction& v0,
                               const SolverOptions& opts = {}) {
  opts.check();
  const auto& spec = model.spec();
  const int n = spec.grid.n;
  // Convergence on the h-weighted sup norm: h |g|_inf <= tol.
  const double tol = opts.gradient_tolerance / spec.grid.h();

  MinimizeResult res;
  res.v = v0;
  spec.pins.apply(res.v.values);

  std::vector<double> g;
  double f = model.energy_and_gradient(res.v, g);
  if (!std::isfinite(f)) throw DivergenceError("minimize: non-finite energy at start");
  res.trace.push_back({0, f, detail::sup_norm(g)});

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;
  std::vector<double> d(n), x_new(n), g_new;
  std::vector<double> alpha_buf;
  int stall_count = 0;

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    if (detail::sup_norm(g) <= tol) {
      res.converged = true;
      break;
    }

    // Two-loop recursion.
    for (int i = 0; i < n; ++i) d[i] = -g[i];
    alpha_buf.assign(history.size(), 0.0);
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
      const auto& p = history[i];
      alpha_buf[i] = p.rho * detail::dot(p.s, d);
      for (int j = 0; j < n; ++j) d[j] -= alpha_buf[i] * p.y[j];
    }
    if (!history.empty()) {
      const auto& last = history.back();
      const double yy = detail::dot(last.y, last.y);
      if (yy > 0.0) {
        const double gamma = 1.0 / (last.rho * yy);
        for (int j = 0; j < n; ++j) d[j] *= gamma;
      }
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
      const auto& p = history[i];
      const double beta = p.rho * detail::dot(p.y, d);
      for (int j = 0; j < n; ++j) d[j] += (alpha_buf[i] - beta) * p.s[j];
    }
    double slope = detail::dot(g, d);
    if (!(slope < 0.0)) {
      for (int i = 0; i < n; ++i) d[i] = -g[i];
      slope = -detail::dot(g, g);
      history.clear();
    }

    // Armijo backtracking.
    double t = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      for (int i = 0; i < n; ++i) x_new[i] = res.v.values[i] + t * d[i];
      GridFunction trial = res.v;
      trial.values = x_new;
      f_new = model.energy_and_gradient(trial, g_new);
      if (!std::isfinite(f_new))
        throw DivergenceError("minimize: non-finite energy during line search", res.trace);
      if (f_new <= f + opts.armijo_constant * t * slope) {
        accepted = true;
        break;
      }
      t *= opts.backtrack_factor;
    }
    res.iterations = iter;
    if (!accepted) {
      // Step collapsed to round-off: the iterate is numerically stationary.
      res.converged = detail::sup_norm(g) <= tol;
      res.trace.push_back({iter, f, detail::sup_norm(g)});
      break;
    }

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    double sy = 0.0;
    for (int i = 0; i < n; ++i) {
      p.s[i] = t * d[i];
      p.y[i] = g_new[i] - g[i];
      sy += p.s[i] * p.y[i];
    }
    if (sy > 1e-14 * detail::dot(p.y, p.y)) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
    }

    for (int i = 0; i < n; ++i) res.v.values[i] += t * d[i];
    const double progress = f - f_new;
    f = f_new;
    g = g_new;
    res.trace.push_back({iter, f, detail::sup_norm(g)});
    if (iter == opts.max_iterations && detail::sup_norm(g) <= tol) res.converged = true;
    // Round-off-level progress for many consecutive iterations: stationary
    // to working precision, stop rather than burn the iteration cap.
    if (progress <= 1e-14 * std::max(1.0, std::abs(f))) {
      if (++stall_count >= 30) {
        res.converged = detail::sup_norm(g) <= tol;
        break;
      }
    } else {
      stall_count = 0;
    }
  }
  res.energy = f;
  return res;
}

inline MinimizeResult minimize(const FunctionalSpec& spec, const GridFunction& v0,
                               const SolverOptions& opts = {}) {
  return minimize(EnergyModel(spec), v0, opts);
}

struct MultiStartResult {
  MinimizeResult best;
  std::vector<MinimizeResult> runs;
};

inline MultiStartResult multi_start(const EnergyModel& model,
                                    const std::vector<GridFunction>& starts,
                                    const SolverOptions& opts = {}) {
  if (starts.empty()) throw std::invalid_argument("multi_start: empty start list");
  MultiStartResult out;
  int n_diverged = 0;
  for (const auto& s : starts) {
    try {
      out.runs.push_back(minimize(model, s, opts));
    } catch (const DivergenceError&) {
      ++n_diverged;
      continue;
    }
  }
  if (out.runs.empty())
    throw DivergenceError("multi_start: all " + std::to_string(n_diverged) + " starts diverged");
  // Prefer converged runs; among those, lowest energy.
  const MinimizeResult* best = nullptr;
  for (const auto& r : out.runs) {
    if (!best) { best = &r; continue; }
    if (r.converged != best->converged) {
      if (r.converged) best = &r;
      continue;
    }
    if (r.energy < best->energy) best = &r;
  }
  out.best = *best;
  return out;
}

inline MultiStartResult multi_start(const FunctionalSpec& spec,
                                    const std::vector<GridFunction>& starts,
                                    const SolverOptions& opts = {}) {
  return multi_start(EnergyModel(spec), starts, opts);
}

enum class ProfileInit { Tanh, LinearRamp, Step, Hermite, RandomPerturbed };

struct InitParams {
  double lambda = 1.0;   // tanh width
  double center = 0.0;   // tanh / step location
  double v_left = -1.0;  // ramp / step endpoint values
  double v_right = 1.0;
  int k = 1;             // hermite order
  double delta = 1.0;    // hermite right boundary value
  double amplitude = 0.1;
  unsigned seed = 0;
};

// Named starting profiles sampled at cell centers.
inline GridFunction init_profile(ProfileInit kind, const ProfileGrid& grid,
                                 const TailSpec& tails, const InitParams& params = {}) {
  GridFunction v{grid, std::vector<double>(grid.n), tails};
  switch (kind) {
    case ProfileInit::Tanh: {
      if (!(params.lambda > 0.0)) throw std::invalid_argument("init_profile: lambda must be > 0");
      for (int i = 0; i < grid.n; ++i)
        v.values[i] = std::tanh((grid.center(i) - params.center) / params.lambda);
      break;
    }
    case ProfileInit::LinearRamp: {
      for (int i = 0; i < grid.n; ++i) {
        const double t = (grid.center(i) - grid.a) / (grid.b - grid.a);
        v.values[i] = params.v_left + (params.v_right - params.v_left) * t;
      }
      break;
    }
    case ProfileInit::Step: {
      for (int i = 0; i < grid.n; ++i)
        v.values[i] = grid.center(i) < params.center ? params.v_left : params.v_right;
      break;
    }
    case ProfileInit::Hermite: {
      // Degree-(2k-1) interpolant with v(a)=0, v(b)=delta and zero
      // derivatives through order k-1 at both ends (generalized smoothstep).
      if (params.k < 1) throw std::invalid_argument("init_profile: hermite requires k >= 1");
      const int m = params.k - 1;
      auto binom = [](int a, int b) {
        double r = 1.0;
        for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
        return r;
      };
      for (int i = 0; i < grid.n; ++i) {
        const double t = (grid.center(i) - grid.a) / (grid.b - grid.a);
        double acc = 0.0;
        for (int j = 0; j <= m; ++j)
          acc += binom(m + j, j) * binom(2 * m + 1, m - j) * std::pow(-t, j);
        v.values[i] = params.delta * std::pow(t, m + 1) * acc;
      }
      break;
    }
    case ProfileInit::RandomPerturbed: {
      std::mt19937 rng(params.seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int i = 0; i < grid.n; ++i)
        v.values[i] = std::tanh((grid.center(i) - params.center) / params.lambda) +
                      params.amplitude * u(rng);
      break;
    }
  }
  return v;
}

}  // namespace tensionlab
