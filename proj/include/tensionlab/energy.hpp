#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tensionlab/grid.hpp"
#include "tensionlab/kernel.hpp"
#include "tensionlab/potential.hpp"

namespace tensionlab {

enum class Family {
  PhaseFractional,  // (1/e) int W(v) + e^{2(k+s)-1} [v^(k)]_s^2
  PhaseInteger,     // (1/e) int W(v) + e^{2k-1} int |v^(k)|^2
  PhaseHalf,        // logarithmic normalization at (k,s) = (0,1/2)
  FdInteger,        // int min{|u'|^2, 1/e} + e^{2k-1} int |u^(k)|^2
  FdFractional      // int min{|u'|^2, 1/e} + e^{2s+1} [u']_s^2
};

enum class DomainMode { Bounded, FullLine };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::PhaseFractional: return "phase-fractional";
    case Family::PhaseInteger: return "phase-integer";
    case Family::PhaseHalf: return "phase-half";
    case Family::FdInteger: return "fd-integer";
    case Family::FdFractional: return "fd-fractional";
  }
  return "?";
}

// Complete description of one energy instance.
struct FunctionalSpec {
  Family family = Family::PhaseInteger;
  Potential potential = Potential::quartic();
  FractionalOrder order;
  double eps = 1.0;
  ProfileGrid grid;
  DomainMode domain_mode = DomainMode::Bounded;
  ScalingVariant scaling = ScalingVariant::None;
  PinMask pins;

  void check() const {
    if (!(eps > 0.0)) throw std::invalid_argument("spec: eps must be > 0");
    pins.check(grid.n);
    switch (family) {
      case Family::PhaseFractional:
        if (!(order.s > 0.0 && order.s < 1.0))
          throw std::invalid_argument("spec: phase-fractional requires s in (0,1)");
        order.check_phase_transition();
        break;
      case Family::PhaseInteger:
        if (order.s != 0.0 || order.k < 1)
          throw std::invalid_argument("spec: phase-integer requires s = 0, k >= 1");
        break;
      case Family::PhaseHalf:
        if (order.k != 0 || order.s != 0.5)
          throw std::invalid_argument("spec: phase-half requires order (k=0, s=1/2)");
        if (scaling != ScalingVariant::Log)
          throw std::invalid_argument("spec: phase-half requires log scaling");
        if (!(eps < 1.0)) throw std::invalid_argument("spec: phase-half requires eps in (0,1)");
        break;
      case Family::FdInteger:
        if (order.k < 2 || order.s != 0.0)
          throw std::invalid_argument("spec: fd-integer requires k >= 2, s = 0");
        if (potential.kind() != Potential::Kind::TruncatedQuadratic)
          throw std::invalid_argument("spec: fd-integer requires the truncated-quadratic potential");
        break;
      case Family::FdFractional:
        if (order.k != 1 || !(order.s > 0.0 && order.s < 1.0))
          throw std::invalid_argument("spec: fd-fractional requires k = 1, s in (0,1)");
        if (potential.kind() != Potential::Kind::TruncatedQuadratic)
          throw std::invalid_argument("spec: fd-fractional requires the truncated-quadratic potential");
        break;
    }
  }

  bool uses_kernel() const {
    return family == Family::PhaseFractional || family == Family::PhaseHalf ||
           family == Family::FdFractional;
  }
  double kernel_s() const { return family == Family::PhaseHalf ? 0.5 : order.s; }
};

// Precomputes the kernel row once and evaluates energy/gradient repeatedly.
class EnergyModel {
public:
  explicit EnergyModel(FunctionalSpec spec) : spec_(std::move(spec)) {
    spec_.check();
    if (spec_.uses_kernel())
      kernel_.emplace(spec_.grid, spec_.kernel_s());
  }

  const FunctionalSpec& spec() const { return spec_; }

  double energy(const GridFunction& v) const {
    std::vector<double>* no_grad = nullptr;
    return evaluate(v, no_grad);
  }

  // Exact gradient of the discrete energy over unpinned values; pinned
  // coordinates report 0.
  GridFunction gradient(const GridFunction& v) const {
    std::vector<double> g;
    std::vector<double>* gp = &g;
    evaluate(v, gp);
    GridFunction out = v;
    out.values = std::move(g);
    out.tails = TailSpec::none();
    spec_.pins.zero_at_pins(out.values);
    return out;
  }

  double energy_and_gradient(const GridFunction& v, std::vector<double>& grad) const {
    std::vector<double>* gp = &grad;
    const double e = evaluate(v, gp);
    spec_.pins.zero_at_pins(grad);
    return e;
  }

private:
  void check_candidate(const GridFunction& v) const {
    v.check();
    if (!(v.grid == spec_.grid))
      throw std::invalid_argument("energy: candidate grid does not match spec grid");
    if (spec_.domain_mode == DomainMode::FullLine && !v.tails.is_constant())
      throw std::invalid_argument("energy: full-line mode requires constant tails");
  }

  // Seminorm field: bounded mode integrates over I x I only (tails stripped).
  GridFunction seminorm_field(const GridFunction& v, int k) const {
    GridFunction w = derivative(v, k);
    if (spec_.domain_mode == DomainMode::Bounded) w.tails = TailSpec::none();
    return w;
  }

  double evaluate(const GridFunction& v, std::vector<double>*& grad) const {
    check_candidate(v);
    const int n = spec_.grid.n;
    const double h = spec_.grid.h();
    const double eps = spec_.eps;
    const auto& W = spec_.potential;
    if (grad) grad->assign(n, 0.0);

    double energy = 0.0;
    switch (spec_.family) {
      case Family::PhaseFractional:
      case Family::PhaseInteger:
      case Family::PhaseHalf: {
        double bulk_factor = 1.0 / eps;
        if (spec_.family == Family::PhaseHalf)
          bulk_factor = 1.0 / (eps * std::abs(std::log(eps)));
        double bulk = 0.0;
        for (int i = 0; i < n; ++i) bulk += W.eval(v.values[i]);
        energy += bulk_factor * h * bulk;
        if (grad)
          for (int i = 0; i < n; ++i)
            (*grad)[i] += bulk_factor * h * W.eval_derivative(v.values[i]);

        if (spec_.family == Family::PhaseInteger) {
          const double factor = std::pow(eps, 2.0 * spec_.order.k - 1.0);
          GridFunction w = derivative(v, spec_.order.k);
          double d2 = 0.0;
          for (double x : w.values) d2 += x * x;
          energy += factor * h * d2;
          if (grad) {
            std::vector<double> gw(n);
            for (int i = 0; i < n; ++i) gw[i] = 2.0 * factor * h * w.values[i];
            std::vector<double> back = derivative_transpose(gw, v, spec_.order.k);
            for (int i = 0; i < n; ++i) (*grad)[i] += back[i];
          }
        } else {
          double factor;
          if (spec_.family == Family::PhaseHalf) {
            factor = scale_factor(ScalingVariant::Log, 0.5, eps);
          } else {
            factor = std::pow(eps, 2.0 * (spec_.order.k + spec_.order.s) - 1.0) *
                     scale_factor(spec_.scaling, spec_.order.s, eps);
          }
          const int k = spec_.family == Family::PhaseHalf ? 0 : spec_.order.k;
          GridFunction w = seminorm_field(v, k);
          if (grad) {
            std::vector<double> gw;
            energy += factor * seminorm_with_gradient(w, *kernel_, gw);
            for (double& x : gw) x *= factor;
            if (k == 0) {
              for (int i = 0; i < n; ++i) (*grad)[i] += gw[i];
            } else {
              std::vector<double> back = derivative_transpose(gw, v, k);
              for (int i = 0; i < n; ++i) (*grad)[i] += back[i];
            }
          } else {
            energy += factor * seminorm(w, *kernel_);
          }
        }
        break;
      }
      case Family::FdInteger:
      case Family::FdFractional: {
        // Bulk term: int min{|u'|^2, 1/eps} written as (1/eps) W(sqrt(eps) u').
        const double sq = std::sqrt(eps);
        GridFunction du = derivative(v, 1);
        double bulk = 0.0;
        for (double x : du.values) bulk += W.eval(sq * x);
        energy += (h / eps) * bulk;
        if (grad) {
          std::vector<double> gw(n);
          for (int i = 0; i < n; ++i)
            gw[i] = (h / eps) * W.eval_derivative(sq * du.values[i]) * sq;
          std::vector<double> back = derivative_transpose(gw, v, 1);
          for (int i = 0; i < n; ++i) (*grad)[i] += back[i];
        }

        if (spec_.family == Family::FdInteger) {
          const double factor = std::pow(eps, 2.0 * spec_.order.k - 1.0);
          GridFunction w = derivative(v, spec_.order.k);
          double d2 = 0.0;
          for (double x : w.values) d2 += x * x;
          energy += factor * h * d2;
          if (grad) {
            std::vector<double> gw(n);
            for (int i = 0; i < n; ++i) gw[i] = 2.0 * factor * h * w.values[i];
            std::vector<double> back = derivative_transpose(gw, v, spec_.order.k);
            for (int i = 0; i < n; ++i) (*grad)[i] += back[i];
          }
        } else {
          const double factor = std::pow(eps, 2.0 * spec_.order.s + 1.0) *
                                scale_factor(spec_.scaling, spec_.order.s, eps);
          GridFunction w = seminorm_field(v, 1);
          if (grad) {
            std::vector<double> gw;
            energy += factor * seminorm_with_gradient(w, *kernel_, gw);
            for (double& x : gw) x *= factor;
            std::vector<double> back = derivative_transpose(gw, v, 1);
            for (int i = 0; i < n; ++i) (*grad)[i] += back[i];
          } else {
            energy += factor * seminorm(w, *kernel_);
          }
        }
        break;
      }
    }
    return energy;
  }

  FunctionalSpec spec_;
  std::optional<KernelMatrix> kernel_;
};

inline double energy(const FunctionalSpec& spec, const GridFunction& v) {
  return EnergyModel(spec).energy(v);
}

inline GridFunction gradient(const FunctionalSpec& spec, const GridFunction& v) {
  return EnergyModel(spec).gradient(v);
}

// Discrete scaling identity: F_eps(u) on I equals F_1(u(eps .)) on I/eps.
// Returns both sides; they agree to round-off by the kernel's grid-scaling
// covariance.
inline std::pair<double, double> scaling_identity_check(const FunctionalSpec& spec,
                                                        const GridFunction& u) {
  if (spec.family != Family::PhaseFractional || spec.domain_mode != DomainMode::Bounded)
    throw std::invalid_argument("scaling_identity_check: requires bounded phase-fractional spec");
  if (!(spec.eps > 0.0 && spec.eps <= 1.0))
    throw std::invalid_argument("scaling_identity_check: requires eps in (0,1]");
  const double lhs = energy(spec, u);
  FunctionalSpec blown = spec;
  blown.eps = 1.0;
  GridFunction v = blowup(u, spec.eps);
  blown.grid = v.grid;
  const double rhs = energy(blown, v);
  return {lhs, rhs};
}

}  // namespace tensionlab
