#include "rmflow/spectral_function.hpp"

#include <cmath>
#include <sstream>

namespace rmflow {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::string scaled_label(double s, const std::string& base) {
  return s == 1.0 ? base : num(s) + "*" + base;
}

}  // namespace

SpectralFunction SpectralFunction::polynomial(Polynomial p, std::string label) {
  if (label.empty()) label = p.to_string();
  return SpectralFunction(Kind::polynomial, 1.0, std::move(p), std::move(label));
}

SpectralFunction SpectralFunction::constant(double c) {
  return SpectralFunction(Kind::polynomial, 1.0, Polynomial{c}, num(c));
}

SpectralFunction SpectralFunction::affine(double slope, double intercept) {
  return SpectralFunction(Kind::polynomial, 1.0, Polynomial{intercept, slope},
                          num(slope) + "*x + " + num(intercept));
}

SpectralFunction SpectralFunction::sqrt_abs(double scale) {
  return SpectralFunction(Kind::sqrt_abs, scale, {}, scaled_label(scale, "sqrt|x|"));
}

SpectralFunction SpectralFunction::sqrt_abs_one_minus(double scale) {
  return SpectralFunction(Kind::sqrt_abs_one_minus, scale, {}, scaled_label(scale, "sqrt|1-x|"));
}

SpectralFunction SpectralFunction::abs(double scale) {
  return SpectralFunction(Kind::abs, scale, {}, scaled_label(scale, "|x|"));
}

SpectralFunction SpectralFunction::abs_one_minus(double scale) {
  return SpectralFunction(Kind::abs_one_minus, scale, {}, scaled_label(scale, "|1-x|"));
}

double SpectralFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::polynomial:
      return poly_(x);
    case Kind::sqrt_abs:
      return scale_ * std::sqrt(std::fabs(x));
    case Kind::sqrt_abs_one_minus:
      return scale_ * std::sqrt(std::fabs(1.0 - x));
    case Kind::abs:
      return scale_ * std::fabs(x);
    case Kind::abs_one_minus:
      return scale_ * std::fabs(1.0 - x);
  }
  return 0.0;
}

bool SpectralFunction::is_affine() const {
  return kind_ == Kind::polynomial && poly_.degree() <= 1;
}

bool SpectralFunction::is_constant() const {
  return kind_ == Kind::polynomial && poly_.degree() <= 0;
}

double SpectralFunction::slope() const { return poly_.coefficient(1); }
double SpectralFunction::intercept() const { return poly_.coefficient(0); }

std::optional<Polynomial> SpectralFunction::as_polynomial() const {
  if (kind_ == Kind::polynomial) return poly_;
  return std::nullopt;
}

SpectralFunction SpectralFunction::squared() const {
  const double s2 = scale_ * scale_;
  switch (kind_) {
    case Kind::polynomial:
      return polynomial(poly_ * poly_, "(" + label_ + ")^2");
    case Kind::sqrt_abs:
      return abs(s2);
    case Kind::sqrt_abs_one_minus:
      return abs_one_minus(s2);
    case Kind::abs:
      return polynomial(Polynomial{0.0, 0.0, s2}, "(" + label_ + ")^2");
    case Kind::abs_one_minus:
      return polynomial(Polynomial{s2, -2.0 * s2, s2}, "(" + label_ + ")^2");
  }
  return zero();
}

SpectralFunction SpectralFunction::scaled(double s) const {
  if (kind_ == Kind::polynomial) return polynomial(s * poly_, num(s) + "*(" + label_ + ")");
  SpectralFunction r = *this;
  r.scale_ *= s;
  r.label_ = num(s) + "*(" + label_ + ")";
  return r;
}

}  // namespace rmflow
