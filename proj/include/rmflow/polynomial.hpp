#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace rmflow {

// Real polynomial with ascending coefficients: c[0] + c[1] x + ...
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> c) : c_(c) { trim(); }
  explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }

  static Polynomial monomial(int k, double scale = 1.0);

  // -1 for the zero polynomial
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coefficients() const { return c_; }
  double coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

  double operator()(double x) const;
  Polynomial derivative() const;

  // (p(x) - p(y)) / (x - y), with p'(x) on the diagonal.  Evaluated by a
  // Horner-type recurrence so that x close to y loses nothing.
  double divided_difference(double x, double y) const;

  Polynomial compose(const Polynomial& inner) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);

  std::string to_string() const;

 private:
  void trim();
  std::vector<double> c_;
};

using Rational = boost::multiprecision::cpp_rational;

// Exact conversion of a finite double to a rational.
Rational to_rational(double x);

// Polynomial with exact rational coefficients, used for the moment tables.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> c) : c_(std::move(c)) { trim(); }
  static RationalPolynomial constant(const Rational& c);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Rational>& coefficients() const { return c_; }
  Rational coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }

  Rational evaluate(const Rational& x) const;
  // Exact evaluation at the rational value of x, rounded once at the end.
  double operator()(double x) const;

  // Antiderivative vanishing at 0.
  RationalPolynomial integral() const;

  friend RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b);
  friend RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b);
  friend RationalPolynomial operator*(const Rational& s, const RationalPolynomial& a);
  friend bool operator==(const RationalPolynomial& a, const RationalPolynomial& b) {
    return a.c_ == b.c_;
  }

  Polynomial to_double() const;
  std::string to_string() const;

 private:
  void trim();
  std::vector<Rational> c_;
};

}  // namespace rmflow
