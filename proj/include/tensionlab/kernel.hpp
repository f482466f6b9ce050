#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tensionlab/grid.hpp"

namespace tensionlab {

// Order (k, s) of a perturbation: k integer derivatives plus a Gagliardo
// seminorm of order s; s = 0 encodes a purely local energy of order k.
struct FractionalOrder {
  int k = 0;
  double s = 0.0;

  void check_phase_transition() const {
    if (k < 0) throw std::invalid_argument("order: k must be >= 0");
    if (s < 0.0 || s >= 1.0) throw std::invalid_argument("order: s must lie in [0,1)");
    if (s == 0.0 && k < 1) throw std::invalid_argument("order: k >= 1 required when s = 0");
    if (s > 0.0 && !(k + s > 0.5))
      throw std::invalid_argument("order: k + s > 1/2 required");
  }
  bool is_local() const { return s == 0.0; }
};

enum class ScalingVariant { None, Bbm, Ms, Alpha, Log };

// Multiplicative prefactor of the seminorm term per variant:
//   bbm   (1 - s)            vanishing factor of the s -> 1^- limit
//   ms    s / 2              vanishing factor of the s -> 0^+ limit
//   alpha s (1 - s) 2^{s-1}  uniform interpolation between the two
//   log   1 / |log eps|      logarithmic normalization at s = 1/2
inline double scale_factor(ScalingVariant variant, double s, double eps) {
  switch (variant) {
    case ScalingVariant::None:
      return 1.0;
    case ScalingVariant::Bbm:
      if (!(s > 0.0 && s < 1.0)) throw std::domain_error("scale_factor(bbm): s must be in (0,1)");
      return 1.0 - s;
    case ScalingVariant::Ms:
      if (!(s > 0.0 && s < 1.0)) throw std::domain_error("scale_factor(ms): s must be in (0,1)");
      return 0.5 * s;
    case ScalingVariant::Alpha:
      if (!(s > 0.0 && s < 1.0)) throw std::domain_error("scale_factor(alpha): s must be in (0,1)");
      return s * (1.0 - s) * std::pow(2.0, s - 1.0);
    case ScalingVariant::Log:
      if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("scale_factor(log): eps must be in (0,1)");
      return 1.0 / std::abs(std::log(eps));
  }
  throw std::logic_error("scale_factor: unknown variant");
}

// Exact double integral of (y-x)^{-1-2s} over [a1,b1] x [a2,b2] with b1 <= a2
// (piecewise-constant cell pair). Diverges for touching cells when s >= 1/2;
// the divergent boundary term is reported as +infinity.
inline double cell_kernel(double a1, double b1, double a2, double b2, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("cell_kernel: s must be in (0,1)");
  if (!(a1 < b1 && a2 < b2)) throw std::domain_error("cell_kernel: empty interval");
  if (b1 > a2) throw std::domain_error("cell_kernel: intervals overlap");
  const bool log_branch = std::abs(2.0 * s - 1.0) < 1e-9;
  auto phi = [&](double t) -> double {
    if (t == 0.0) {
      if (s < 0.5) return 0.0;  // t^{1-2s} -> 0 only below the critical order
      return std::numeric_limits<double>::infinity();
    }
    if (log_branch) return -std::log(t);
    return std::pow(t, 1.0 - 2.0 * s) / (2.0 * s * (2.0 * s - 1.0));
  };
  const double inner = phi(a2 - b1);
  if (std::isinf(inner)) return std::numeric_limits<double>::infinity();
  return inner - phi(a2 - a1) - phi(b2 - b1) + phi(b2 - a1);
}

struct InfiniteEnergyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tail-tail constant G(s, l) = l^{1-2s}/(2s(2s-1)), the single-ordering
// interaction of the two constant tails across a domain of length l;
// infinite for s <= 1/2.
inline double tail_tail_G(double s, double ell) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("tail_tail_G: s must be in (0,1)");
  if (!(ell > 0.0)) throw std::domain_error("tail_tail_G: length must be > 0");
  if (s <= 0.5) return std::numeric_limits<double>::infinity();
  return std::pow(ell, 1.0 - 2.0 * s) / (2.0 * s * (2.0 * s - 1.0));
}

// Quadrature weights for the Gagliardo double integral on a uniform grid.
//
// The form evaluated is the full (both orderings) integral
//   iint |w(x) - w(y)|^2 / |x - y|^{1+2s} dx dy
// for the cell-sampled field w, with constant tails handled analytically.
// Coefficients are gradient-matched: offset m carries
//   rho_m = J_m / (m h)^2,  J_m = iint_{C_0 x C_m} (y - x)^{1-2s},
// which reproduces the integral exactly for locally affine fields (the
// self-cell band is folded into rho_1). This stays finite and consistent
// through s = 1/2, where the raw piecewise-constant pair integrals of
// touching cells diverge.
class KernelMatrix {
public:
  KernelMatrix(const ProfileGrid& grid, double s) : grid_(grid), s_(s) {
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("kernel_matrix: s must be in (0,1)");
    const int n = grid.n;
    const double h = grid.h();
    const double p = 3.0 - 2.0 * s;
    const double denom = (2.0 - 2.0 * s) * p;
    auto P2 = [&](double t) { return std::pow(t, p) / denom; };

    rho_.assign(n + 1, 0.0);
    rho_[1] = (P2(2.0 * h) - P2(h)) / (h * h);
    for (int m = 2; m <= n; ++m) {
      const double d = m * h;
      rho_[m] = (P2(d - h) - 2.0 * P2(d) + P2(d + h)) / (d * d);
    }

    // Core-tail coefficients (both orderings folded in): ghost cell of width h
    // adjacent to the boundary plus the exact remainder integral beyond it.
    const bool log_branch = std::abs(2.0 * s - 1.0) < 1e-9;
    auto F = [&](double u) {
      if (log_branch) return std::log(u);
      return std::pow(u, 1.0 - 2.0 * s) / (2.0 * s * (1.0 - 2.0 * s));
    };
    tail_left_.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double beyond = F((i + 2.0) * h) - F((i + 1.0) * h);
      tail_left_[i] = 2.0 * (rho_[i + 1] + beyond);
    }
    tail_right_.assign(tail_left_.rbegin(), tail_left_.rend());

    // Tail-tail interaction across the whole domain (both orderings);
    // divergent at or below the critical order s = 1/2.
    if (s > 0.5) {
      const double ell = grid.b - grid.a;
      tail_tail_ = 2.0 * std::pow(ell, 1.0 - 2.0 * s) / (2.0 * s * (2.0 * s - 1.0));
    } else {
      tail_tail_ = std::numeric_limits<double>::infinity();
    }
  }

  const ProfileGrid& grid() const { return grid_; }
  double s() const { return s_; }
  // Symmetric pair coefficient; zero on the diagonal.
  double at(int i, int j) const { return i == j ? 0.0 : rho_[std::abs(i - j)]; }
  double rho(int m) const { return rho_[m]; }
  double tail_left(int i) const { return tail_left_[i]; }
  double tail_right(int i) const { return tail_right_[i]; }
  double tail_tail() const { return tail_tail_; }

private:
  ProfileGrid grid_;
  double s_;
  std::vector<double> rho_;
  std::vector<double> tail_left_;
  std::vector<double> tail_right_;
  double tail_tail_;
};

inline KernelMatrix kernel_matrix(const ProfileGrid& grid, double s) {
  return KernelMatrix(grid, s);
}

namespace detail {

inline void check_compatible(const GridFunction& w, const KernelMatrix& kernel) {
  if (!(w.grid == kernel.grid()))
    throw std::invalid_argument("seminorm: grid function and kernel matrix grids differ");
}

}  // namespace detail

// Squared Gagliardo seminorm of w (both orderings), including the analytic
// constant-tail corrections when w carries tails. Throws InfiniteEnergyError
// when mismatched constant tails meet s <= 1/2.
inline double seminorm(const GridFunction& w, const KernelMatrix& kernel) {
  detail::check_compatible(w, kernel);
  const int n = w.grid.n;
  const auto& v = w.values;
  double energy = 0.0;
  for (int m = 1; m < n; ++m) {
    double acc = 0.0;
    for (int i = 0; i + m < n; ++i) {
      const double d = v[i + m] - v[i];
      acc += d * d;
    }
    energy += 2.0 * kernel.rho(m) * acc;
  }
  if (w.tails.is_constant()) {
    const double cl = w.tails.c_left;
    const double cr = w.tails.c_right;
    for (int i = 0; i < n; ++i) {
      const double dl = v[i] - cl;
      const double dr = v[i] - cr;
      energy += dl * dl * kernel.tail_left(i) + dr * dr * kernel.tail_right(i);
    }
    if (cl != cr) {
      if (std::isinf(kernel.tail_tail()))
        throw InfiniteEnergyError(
            "seminorm: mismatched constant tails have infinite energy for s <= 1/2");
      energy += (cr - cl) * (cr - cl) * kernel.tail_tail();
    }
  }
  return energy;
}

// Seminorm and its gradient with respect to the values of w in one pass.
inline double seminorm_with_gradient(const GridFunction& w, const KernelMatrix& kernel,
                                     std::vector<double>& grad) {
  detail::check_compatible(w, kernel);
  const int n = w.grid.n;
  const auto& v = w.values;
  grad.assign(n, 0.0);
  double energy = 0.0;
  for (int m = 1; m < n; ++m) {
    const double rho = kernel.rho(m);
    double acc = 0.0;
    for (int i = 0; i + m < n; ++i) {
      const double d = v[i + m] - v[i];
      acc += d * d;
      grad[i + m] += 4.0 * rho * d;
      grad[i] -= 4.0 * rho * d;
    }
    energy += 2.0 * rho * acc;
  }
  if (w.tails.is_constant()) {
    const double cl = w.tails.c_left;
    const double cr = w.tails.c_right;
    for (int i = 0; i < n; ++i) {
      const double dl = v[i] - cl;
      const double dr = v[i] - cr;
      energy += dl * dl * kernel.tail_left(i) + dr * dr * kernel.tail_right(i);
      grad[i] += 2.0 * dl * kernel.tail_left(i) + 2.0 * dr * kernel.tail_right(i);
    }
    if (cl != cr) {
      if (std::isinf(kernel.tail_tail()))
        throw InfiniteEnergyError(
            "seminorm: mismatched constant tails have infinite energy for s <= 1/2");
      energy += (cr - cl) * (cr - cl) * kernel.tail_tail();
    }
  }
  return energy;
}

}  // namespace tensionlab
