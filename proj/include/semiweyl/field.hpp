#pragma once

#include <cstdint>
#include <limits>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "semiweyl/multi_index.hpp"
#include "semiweyl/numerics.hpp"

namespace semiweyl {

using Point = std::span<const double>;

// Derivative order reported by fields that are smooth to all orders.
inline constexpr int kUnlimitedOrder = std::numeric_limits<int>::max() / 4;

// Constants of the tempered-weight bound
//   f(x) + zeta1 <= c0 * (f(y) + zeta1) * (1 + |x - y|)^n0.
struct GrowthBound {
  double c0 = 1.0;
  double n0 = 0.0;
  double zeta1 = 0.0;
};

// Real coefficient function on R^d with a derivative oracle.
class CoefficientField {
 public:
  explicit CoefficientField(int dim);
  virtual ~CoefficientField() = default;
  CoefficientField(const CoefficientField&) = delete;
  CoefficientField& operator=(const CoefficientField&) = delete;

  int dim() const { return dim_; }
  // Unique per instance; used to intern symbolic atoms.
  std::uint64_t id() const { return id_; }

  virtual double deriv(const MultiIndex& eta, Point x) const = 0;
  double eval(Point x) const { return deriv(MultiIndex::zero(dim_), x); }
  // One-dimensional shorthands.
  double eval(double x) const;
  double deriv1(int r, double x) const;

  // Highest derivative order the oracle supports.
  virtual int max_order() const = 0;
  // Declared Hoelder class C^{k, mu}.
  virtual int k() const = 0;
  virtual double mu() const = 0;
  double tau() const { return k() + mu(); }
  // Mollification parameter (1 for fields that are not mollified).
  virtual double eps() const { return 1.0; }
  // Natural period (in every coordinate), if any.
  virtual std::optional<double> period() const { return std::nullopt; }
  virtual bool periodic_with(double p) const;
  virtual bool is_constant() const { return false; }
  virtual std::string describe() const = 0;

 private:
  int dim_;
  std::uint64_t id_;
};

using FieldPtr = std::shared_ptr<const CoefficientField>;

// Oracle-backed field with a declared Hoelder class.
class HoelderField : public CoefficientField {
 public:
  using Oracle = std::function<double(const MultiIndex&, Point)>;

  struct Spec {
    int dim = 1;
    int k = 0;
    double mu = 0.0;
    int max_order = -1;  // defaults to k
    double hoelder_const = 0.0;
    GrowthBound growth;
    std::optional<double> period;
    std::string description;
    Oracle oracle;
  };

  explicit HoelderField(Spec spec);

  double deriv(const MultiIndex& eta, Point x) const override;
  int max_order() const override { return spec_.max_order; }
  int k() const override { return spec_.k; }
  double mu() const override { return spec_.mu; }
  std::optional<double> period() const override { return spec_.period; }
  std::string describe() const override { return spec_.description; }

  double hoelder_const() const { return spec_.hoelder_const; }
  const GrowthBound& growth_bound() const { return spec_.growth; }

 private:
  Spec spec_;
};

using HoelderPtr = std::shared_ptr<const HoelderField>;

class ConstantField : public CoefficientField {
 public:
  ConstantField(int dim, double value);
  double deriv(const MultiIndex& eta, Point x) const override;
  int max_order() const override { return kUnlimitedOrder; }
  int k() const override { return 64; }
  double mu() const override { return 1.0; }
  bool periodic_with(double) const override { return true; }
  bool is_constant() const override { return true; }
  std::string describe() const override;
  double value() const { return value_; }

 private:
  double value_;
};

FieldPtr constant_field(double value, int dim = 1);

// f(x) + c.
FieldPtr offset_field(FieldPtr f, double c);
// f(s x); used for dilation checks.
FieldPtr dilated_field(FieldPtr f, double s);

}  // namespace semiweyl
