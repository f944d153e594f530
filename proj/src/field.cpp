#include "semiweyl/field.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "semiweyl/errors.hpp"

namespace semiweyl {

namespace {
std::uint64_t next_field_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}
}  // namespace

CoefficientField::CoefficientField(int dim) : dim_(dim), id_(next_field_id()) {
  if (dim < 1 || dim > 2) throw DomainError("coefficient fields support d = 1 or 2");
}

double CoefficientField::eval(double x) const {
  const double xs[1] = {x};
  return eval(Point(xs, 1));
}

double CoefficientField::deriv1(int r, double x) const {
  const double xs[1] = {x};
  MultiIndex m(1);
  m[0] = r;
  return deriv(m, Point(xs, 1));
}

bool CoefficientField::periodic_with(double p) const {
  auto q = period();
  if (!q) return false;
  const double ratio = p / *q;
  return ratio > 0.5 && std::abs(ratio - std::round(ratio)) < 1e-9;
}

HoelderField::HoelderField(Spec spec) : CoefficientField(spec.dim), spec_(std::move(spec)) {
  if (spec_.k < 0) throw DomainError("HoelderField: k must be >= 0");
  if (!(spec_.mu >= 0.0 && spec_.mu <= 1.0)) throw DomainError("HoelderField: mu must lie in [0, 1]");
  if (!spec_.oracle) throw DomainError("HoelderField: missing oracle");
  if (spec_.max_order < 0) spec_.max_order = spec_.k;
}

double HoelderField::deriv(const MultiIndex& eta, Point x) const {
  if (eta.order() > spec_.max_order)
    throw DomainError("derivative of order " + std::to_string(eta.order()) + " requested from " +
                      spec_.description + " which has only " + std::to_string(spec_.max_order));
  return spec_.oracle(eta, x);
}

ConstantField::ConstantField(int dim, double value) : CoefficientField(dim), value_(value) {}

double ConstantField::deriv(const MultiIndex& eta, Point) const { return eta.is_zero() ? value_ : 0.0; }

std::string ConstantField::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "const(" << value_ << ")";
  return os.str();
}

FieldPtr constant_field(double value, int dim) { return std::make_shared<ConstantField>(dim, value); }

namespace {

class OffsetField : public CoefficientField {
 public:
  OffsetField(FieldPtr f, double c) : CoefficientField(f->dim()), f_(std::move(f)), c_(c) {}
  double deriv(const MultiIndex& eta, Point x) const override {
    return f_->deriv(eta, x) + (eta.is_zero() ? c_ : 0.0);
  }
  int max_order() const override { return f_->max_order(); }
  int k() const override { return f_->k(); }
  double mu() const override { return f_->mu(); }
  double eps() const override { return f_->eps(); }
  std::optional<double> period() const override { return f_->period(); }
  bool periodic_with(double p) const override { return f_->periodic_with(p); }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << f_->describe() << (c_ < 0 ? " - " : " + ") << std::abs(c_);
    return os.str();
  }

 private:
  FieldPtr f_;
  double c_;
};

class DilatedField : public CoefficientField {
 public:
  DilatedField(FieldPtr f, double s) : CoefficientField(f->dim()), f_(std::move(f)), s_(s) {
    if (!(s > 0.0)) throw DomainError("dilated_field: scale must be positive");
  }
  double deriv(const MultiIndex& eta, Point x) const override {
    double xs[MultiIndex::kMaxDim];
    for (int i = 0; i < dim(); ++i) xs[i] = s_ * x[i];
    return std::pow(s_, eta.order()) * f_->deriv(eta, Point(xs, dim()));
  }
  int max_order() const override { return f_->max_order(); }
  int k() const override { return f_->k(); }
  double mu() const override { return f_->mu(); }
  double eps() const override { return f_->eps(); }
  std::optional<double> period() const override {
    auto p = f_->period();
    if (!p) return std::nullopt;
    return *p / s_;
  }
  bool periodic_with(double p) const override { return f_->periodic_with(p * s_); }
  bool is_constant() const override { return f_->is_constant(); }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << f_->describe() << " at " << s_ << "*x";
    return os.str();
  }

 private:
  FieldPtr f_;
  double s_;
};

}  // namespace

FieldPtr offset_field(FieldPtr f, double c) { return std::make_shared<OffsetField>(std::move(f), c); }
FieldPtr dilated_field(FieldPtr f, double s) { return std::make_shared<DilatedField>(std::move(f), s); }

}  // namespace semiweyl
