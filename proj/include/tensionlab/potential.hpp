#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tensionlab {

// Nonlinear potentials W driving the bulk term of every energy family.
//
// Shipped kinds:
//   quartic              W(z) = scale * (1 - z^2)^2, wells at z = -1, 1
//   truncated_quadratic  W(z) = min{z^2, 1}, single well at z = 0
// plus a hook for user-supplied smooth expressions (W and W' callables).
class Potential {
public:
  enum class Kind { Quartic, TruncatedQuadratic, Custom };

  static Potential quartic(double scale = 1.0) {
    if (!(scale > 0.0)) throw std::invalid_argument("quartic scale must be > 0");
    Potential p;
    p.kind_ = Kind::Quartic;
    p.scale_ = scale;
    p.name_ = scale == 1.0 ? "quartic" : "quartic(scale=" + std::to_string(scale) + ")";
    return p;
  }

  static Potential truncated_quadratic() {
    Potential p;
    p.kind_ = Kind::TruncatedQuadratic;
    p.name_ = "truncated_quadratic";
    return p;
  }

  static Potential custom(std::string name, std::function<double(double)> w,
                          std::function<double(double)> dw, bool double_well) {
    Potential p;
    p.kind_ = Kind::Custom;
    p.name_ = std::move(name);
    p.w_ = std::move(w);
    p.dw_ = std::move(dw);
    p.custom_double_well_ = double_well;
    return p;
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  bool is_double_well() const {
    switch (kind_) {
      case Kind::Quartic: return true;
      case Kind::TruncatedQuadratic: return false;
      case Kind::Custom: return custom_double_well_;
    }
    return false;
  }

  double eval(double z) const {
    if (!std::isfinite(z)) throw std::domain_error("Potential::eval: non-finite argument");
    switch (kind_) {
      case Kind::Quartic: {
        const double q = 1.0 - z * z;
        return scale_ * q * q;
      }
      case Kind::TruncatedQuadratic:
        return std::min(z * z, 1.0);
      case Kind::Custom:
        return w_(z);
    }
    return 0.0;
  }

  // W'. For the truncated kind the kink at |z| = 1 is tie-broken to the
  // flat-side value 0 so descent directions never overshoot the plateau.
  double eval_derivative(double z) const {
    if (!std::isfinite(z)) throw std::domain_error("Potential::eval_derivative: non-finite argument");
    switch (kind_) {
      case Kind::Quartic:
        return scale_ * (-4.0 * z * (1.0 - z * z));
      case Kind::TruncatedQuadratic:
        return std::abs(z) < 1.0 ? 2.0 * z : 0.0;
      case Kind::Custom:
        return dw_(z);
    }
    return 0.0;
  }

  // (W''(-1), W''(1)), both required strictly positive for double wells.
  std::pair<double, double> well_curvature() const {
    if (!is_double_well())
      throw std::logic_error("well_curvature: potential has no wells at -1, 1");
    const double h = 1e-5;
    auto curv = [&](double z) {
      return (eval(z + h) - 2.0 * eval(z) + eval(z - h)) / (h * h);
    };
    if (kind_ == Kind::Quartic) return {8.0 * scale_, 8.0 * scale_};
    return {curv(-1.0), curv(1.0)};
  }

  struct Check {
    std::string hypothesis;
    bool pass = false;
    std::string witness;
  };
  struct ValidationReport {
    std::vector<Check> checks;
    bool all_pass() const {
      for (const auto& c : checks)
        if (!c.pass) return false;
      return true;
    }
  };

  // Scans z in [-z_max, z_max] with the given step and reports each
  // hypothesis with its witnessing values. Failures are reported, not thrown.
  ValidationReport validate(double z_max = 10.0, double step = 1e-3) const {
    ValidationReport rep;

    double min_w = std::numeric_limits<double>::infinity();
    double argmin = 0.0;
    double worst_offwell = std::numeric_limits<double>::infinity();
    double argmin_offwell = 0.0;
    double min_far = std::numeric_limits<double>::infinity();
    const long n = static_cast<long>(std::llround(2.0 * z_max / step));
    for (long i = 0; i <= n; ++i) {
      const double z = -z_max + static_cast<double>(i) * step;
      const double w = eval(z);
      if (w < min_w) { min_w = w; argmin = z; }
      if (std::min(std::abs(z - 1.0), std::abs(z + 1.0)) > step) {
        if (w < worst_offwell) { worst_offwell = w; argmin_offwell = z; }
      }
      if (std::abs(z) >= 2.0) min_far = std::min(min_far, w);
    }

    rep.checks.push_back({"(i) nonnegativity: W >= 0 on scan",
                          min_w >= 0.0,
                          "min W = " + std::to_string(min_w) + " at z = " + std::to_string(argmin)});
    rep.checks.push_back({"(i) wells: W(-1) = W(1) = 0",
                          std::abs(eval(-1.0)) < 1e-12 && std::abs(eval(1.0)) < 1e-12,
                          "W(-1) = " + std::to_string(eval(-1.0)) + ", W(1) = " + std::to_string(eval(1.0))});
    rep.checks.push_back({"(i) positivity away from the wells",
                          worst_offwell > 0.0,
                          "min off-well W = " + std::to_string(worst_offwell) +
                              " at z = " + std::to_string(argmin_offwell)});
    bool curv_ok = false;
    std::string curv_witness = "wells not at -1, 1";
    if (is_double_well() && std::abs(eval(-1.0)) < 1e-12 && std::abs(eval(1.0)) < 1e-12) {
      auto [cl, cr] = well_curvature();
      curv_ok = cl > 0.0 && cr > 0.0;
      curv_witness = "W''(-1) = " + std::to_string(cl) + ", W''(1) = " + std::to_string(cr);
    }
    rep.checks.push_back({"(ii) positive curvature at the wells", curv_ok, curv_witness});
    rep.checks.push_back({"(iii) liminf W > 0 for |z| in [2, z_max] (finite scan, not a proof)",
                          min_far > 0.0,
                          "min W on |z| >= 2: " + std::to_string(min_far)});
    return rep;
  }

private:
  Potential() = default;

  Kind kind_ = Kind::Quartic;
  double scale_ = 1.0;
  std::string name_ = "quartic";
  std::function<double(double)> w_;
  std::function<double(double)> dw_;
  bool custom_double_well_ = false;
};

}  // namespace tensionlab
