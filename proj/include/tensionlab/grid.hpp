#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tensionlab {

// Uniform cell-centered grid on (a, b): h = (b - a)/N, centers a + (i + 1/2) h.
struct ProfileGrid {
  double a = 0.0;
  double b = 1.0;
  int n = 8;

  double h() const { return (b - a) / n; }
  double center(int i) const { return a + (i + 0.5) * h(); }
  double left_edge(int i) const { return a + i * h(); }

  bool operator==(const ProfileGrid&) const = default;
};

inline ProfileGrid make_grid(double a, double b, int n) {
  if (!(b > a)) throw std::invalid_argument("make_grid: requires b > a");
  if (n < 8) throw std::invalid_argument("make_grid: requires N >= 8");
  return ProfileGrid{a, b, n};
}

// Behavior outside (a, b): either nothing (bounded-domain energies) or
// constant left/right values (the safe-zone representation of functions
// defined on the whole line).
struct TailSpec {
  enum class Mode { None, Constant };
  Mode mode = Mode::None;
  double c_left = 0.0;
  double c_right = 0.0;

  static TailSpec none() { return {}; }
  static TailSpec constant(double c_left, double c_right) {
    return {Mode::Constant, c_left, c_right};
  }
  bool is_constant() const { return mode == Mode::Constant; }
  bool operator==(const TailSpec&) const = default;
};

struct GridFunction {
  ProfileGrid grid;
  std::vector<double> values;
  TailSpec tails;

  void check() const {
    if (static_cast<int>(values.size()) != grid.n)
      throw std::invalid_argument("GridFunction: values length must equal N");
    for (double v : values)
      if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite value");
  }
};

// Fixed degrees of freedom with prescribed values (boundary layers).
struct PinMask {
  std::vector<int> indices;
  std::vector<double> pinned_values;

  bool empty() const { return indices.empty(); }

  void check(int n) const {
    if (indices.size() != pinned_values.size())
      throw std::invalid_argument("PinMask: index/value length mismatch");
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (indices[i] < 0 || indices[i] >= n)
        throw std::invalid_argument("PinMask: index out of range");
      if (!std::isfinite(pinned_values[i]))
        throw std::invalid_argument("PinMask: non-finite pinned value");
    }
  }

  void apply(std::vector<double>& v) const {
    for (std::size_t i = 0; i < indices.size(); ++i) v[indices[i]] = pinned_values[i];
  }
  void zero_at_pins(std::vector<double>& g) const {
    for (int idx : indices) g[idx] = 0.0;
  }
};

namespace detail {

// One central-difference pass: w_i = (v_{i+1} - v_{i-1}) / (2h). Constant
// tails supply ghost values; without tails the boundary rows use one-sided
// second-order stencils.
inline std::vector<double> central_diff(const std::vector<double>& v, double h,
                                        const TailSpec& tails) {
  const int n = static_cast<int>(v.size());
  std::vector<double> w(n);
  const double inv2h = 1.0 / (2.0 * h);
  for (int i = 1; i + 1 < n; ++i) w[i] = (v[i + 1] - v[i - 1]) * inv2h;
  if (tails.is_constant()) {
    w[0] = (v[1] - tails.c_left) * inv2h;
    w[n - 1] = (tails.c_right - v[n - 2]) * inv2h;
  } else {
    w[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv2h;
    w[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) * inv2h;
  }
  return w;
}

// Transpose of central_diff as a linear map in v (ghost values are constants
// and do not contribute).
inline std::vector<double> central_diff_transpose(const std::vector<double>& g, double h,
                                                  const TailSpec& tails) {
  const int n = static_cast<int>(g.size());
  std::vector<double> out(n, 0.0);
  const double inv2h = 1.0 / (2.0 * h);
  for (int i = 1; i + 1 < n; ++i) {
    out[i + 1] += g[i] * inv2h;
    out[i - 1] -= g[i] * inv2h;
  }
  if (tails.is_constant()) {
    out[1] += g[0] * inv2h;
    out[n - 2] -= g[n - 1] * inv2h;
  } else {
    out[0] += -3.0 * g[0] * inv2h;
    out[1] += 4.0 * g[0] * inv2h;
    out[2] += -g[0] * inv2h;
    out[n - 1] += 3.0 * g[n - 1] * inv2h;
    out[n - 2] += -4.0 * g[n - 1] * inv2h;
    out[n - 3] += g[n - 1] * inv2h;
  }
  return out;
}

}  // namespace detail

// k-fold repeated central difference. After the first pass a constant-tailed
// input has zero tails; tails.mode=none stays none.
inline GridFunction derivative(const GridFunction& v, int k) {
  if (k < 0) throw std::invalid_argument("derivative: k must be >= 0");
  if (k == 0) return v;
  if (v.grid.n <= 2 * k) throw std::invalid_argument("derivative: grid too coarse (N <= 2k)");
  GridFunction w = v;
  for (int pass = 0; pass < k; ++pass) {
    w.values = detail::central_diff(w.values, v.grid.h(), w.tails);
    if (w.tails.is_constant()) w.tails = TailSpec::constant(0.0, 0.0);
  }
  return w;
}

// Adjoint of `derivative` restricted to the value vector; used by gradient
// assembly (chain rule through the k difference passes).
inline std::vector<double> derivative_transpose(const std::vector<double>& g,
                                                const GridFunction& v, int k) {
  std::vector<double> out = g;
  // Pass p of the forward map sees tails: input tails for p=0, zero-constant
  // (or none) afterwards; the transpose only needs the mode, not the values.
  for (int pass = k - 1; pass >= 0; --pass) {
    TailSpec t = v.tails;
    if (pass > 0 && t.is_constant()) t = TailSpec::constant(0.0, 0.0);
    out = detail::central_diff_transpose(out, v.grid.h(), t);
  }
  return out;
}

// Blow-up change of variables v(t) = u(eps t): same values, grid scaled by 1/eps.
inline GridFunction blowup(const GridFunction& u, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("blowup: eps must be > 0");
  GridFunction v = u;
  v.grid.a = u.grid.a / eps;
  v.grid.b = u.grid.b / eps;
  return v;
}

}  // namespace tensionlab
