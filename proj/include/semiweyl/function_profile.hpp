#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "semiweyl/numerics.hpp"

namespace semiweyl {

// Real function of one variable with derivatives from a Taylor-jet oracle.
class FunctionProfile {
 public:
  using JetFn = std::function<Jet(const Jet&)>;

  FunctionProfile(std::string name, JetFn fn, int max_order, std::optional<std::pair<double, double>> support)
      : name_(std::move(name)), fn_(std::move(fn)), max_order_(max_order), support_(support) {}

  double eval(double t) const { return fn_(Jet(0, t)).value(); }
  // Throws DomainError past max_order().
  double deriv(int r, double t) const;
  // f^{(0..r)}(t).
  std::vector<double> derivs(int r, double t) const;
  Jet jet(const Jet& u) const { return fn_(u); }

  int max_order() const { return max_order_; }
  // Closed interval outside of which the function vanishes identically.
  const std::optional<std::pair<double, double>>& support() const { return support_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  JetFn fn_;
  int max_order_;
  std::optional<std::pair<double, double>> support_;
};

using ProfilePtr = std::shared_ptr<const FunctionProfile>;

// Even bump: 1 on |t - center| <= plateau, 0 for |t - center| >= cutoff.
ProfilePtr bump_profile(double plateau, double cutoff, double center = 0.0);
// t times a bump that is 1 on [lo, hi] and vanishes outside [lo - pad, hi + pad].
ProfilePtr windowed_identity(double lo, double hi, double pad);
ProfilePtr gaussian_profile(double width);
ProfilePtr polynomial_profile(std::vector<double> coeffs);

}  // namespace semiweyl
