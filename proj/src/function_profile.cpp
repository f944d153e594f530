#include "semiweyl/function_profile.hpp"

#include <limits>

#include "semiweyl/errors.hpp"

namespace semiweyl {

double FunctionProfile::deriv(int r, double t) const {
  if (r < 0 || r > max_order_)
    throw DomainError("profile " + name_ + ": derivative of order " + std::to_string(r) + " not available");
  return fn_(Jet::variable(r, t)).derivative(r);
}

std::vector<double> FunctionProfile::derivs(int r, double t) const {
  if (r < 0 || r > max_order_)
    throw DomainError("profile " + name_ + ": derivative of order " + std::to_string(r) + " not available");
  const Jet j = fn_(Jet::variable(r, t));
  std::vector<double> out(r + 1);
  for (int k = 0; k <= r; ++k) out[k] = j.derivative(k);
  return out;
}

namespace {
constexpr int kSmooth = 64;
}

ProfilePtr bump_profile(double plateau, double cutoff, double center) {
  if (!(plateau >= 0.0 && cutoff > plateau)) throw DomainError("bump_profile: need 0 <= plateau < cutoff");
  return std::make_shared<FunctionProfile>(
      "bump", [=](const Jet& u) { return plateau_bump(u - center, plateau, cutoff); }, kSmooth,
      std::make_pair(center - cutoff, center + cutoff));
}

ProfilePtr windowed_identity(double lo, double hi, double pad) {
  if (!(hi > lo && pad > 0.0)) throw DomainError("windowed_identity: empty window");
  const double c = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  return std::make_shared<FunctionProfile>(
      "identity", [=](const Jet& u) { return u * plateau_bump(u - c, half, half + pad); }, kSmooth,
      std::make_pair(lo - pad, hi + pad));
}

ProfilePtr gaussian_profile(double width) {
  if (!(width > 0.0)) throw DomainError("gaussian_profile: width must be positive");
  return std::make_shared<FunctionProfile>(
      "gaussian", [=](const Jet& u) { return exp(u * u * (-0.5 / (width * width))); }, kSmooth, std::nullopt);
}

ProfilePtr polynomial_profile(std::vector<double> coeffs) {
  return std::make_shared<FunctionProfile>(
      "polynomial",
      [coeffs](const Jet& u) {
        Jet acc(u.order(), 0.0);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
        return acc;
      },
      kSmooth, std::nullopt);
}

}  // namespace semiweyl
