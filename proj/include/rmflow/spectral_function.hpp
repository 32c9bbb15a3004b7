#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmflow/polynomial.hpp"

namespace rmflow {

// Scalar function applied spectrally to a Hermitian matrix.  Every kind
// carries a multiplier so that e.g. c*sqrt|x| stays in closed form and
// squared() can be computed exactly.
class SpectralFunction {
 public:
  enum class Kind { polynomial, sqrt_abs, sqrt_abs_one_minus, abs, abs_one_minus };

  SpectralFunction() : SpectralFunction(zero()) {}

  static SpectralFunction polynomial(Polynomial p, std::string label = {});
  static SpectralFunction constant(double c);
  static SpectralFunction affine(double slope, double intercept);
  static SpectralFunction identity() { return affine(1.0, 0.0); }
  static SpectralFunction zero() { return constant(0.0); }
  static SpectralFunction sqrt_abs(double scale = 1.0);
  static SpectralFunction sqrt_abs_one_minus(double scale = 1.0);
  static SpectralFunction abs(double scale = 1.0);
  static SpectralFunction abs_one_minus(double scale = 1.0);

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  double scale() const { return scale_; }

  // Polynomial of degree <= 1 (constant included).
  bool is_affine() const;
  bool is_constant() const;
  double slope() const;
  double intercept() const;

  std::optional<Polynomial> as_polynomial() const;
  SpectralFunction squared() const;
  SpectralFunction scaled(double s) const;

 private:
  SpectralFunction(Kind k, double scale, Polynomial p, std::string label)
      : kind_(k), scale_(scale), poly_(std::move(p)), label_(std::move(label)) {}

  Kind kind_;
  double scale_ = 1.0;
  Polynomial poly_;  // used only for Kind::polynomial (scale folded in)
  std::string label_;
};

}  // namespace rmflow
