#include "rmflow/polynomial.hpp"

#include <cmath>
#include <sstream>

#include "rmflow/errors.hpp"

namespace rmflow {

Polynomial Polynomial::monomial(int k, double scale) {
  std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
  c.back() = scale;
  return Polynomial(std::move(c));
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double x) const {
  double r = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

double Polynomial::divided_difference(double x, double y) const {
  if (c_.size() <= 1) return 0.0;
  // Q_m = x Q_{m+1} + P_{m+1}(y), where P_m are the Horner partial sums.
  double q = 0.0;
  double py = c_.back();
  for (std::size_t m = c_.size() - 1; m-- > 0;) {
    q = x * q + py;
    py = c_[m] + y * py;
  }
  return q;
}

Polynomial Polynomial::compose(const Polynomial& inner) const {
  Polynomial r;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * inner + Polynomial{*it};
  return r;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return {};
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& a) {
  std::vector<double> c = a.c_;
  for (auto& x : c) x *= s;
  return Polynomial(std::move(c));
}

std::string Polynomial::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (k) os << " + ";
    os << c_[k];
    if (k) os << "*x^" << k;
  }
  return os.str();
}

Rational to_rational(double x) {
  if (!std::isfinite(x)) throw ValidationError("to_rational: non-finite value");
  if (x == 0.0) return Rational(0);
  int e = 0;
  const double m = std::frexp(x, &e);
  // m * 2^53 is an exact integer
  const auto mant = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  Rational r(mant);
  boost::multiprecision::cpp_int p2 = 1;
  p2 <<= std::abs(e);
  if (e >= 0)
    r *= Rational(p2);
  else
    r /= Rational(p2);
  return r;
}

RationalPolynomial RationalPolynomial::constant(const Rational& c) {
  return RationalPolynomial(std::vector<Rational>{c});
}

void RationalPolynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational RationalPolynomial::evaluate(const Rational& x) const {
  Rational r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

double RationalPolynomial::operator()(double x) const {
  return static_cast<double>(evaluate(to_rational(x)));
}

RationalPolynomial RationalPolynomial::integral() const {
  if (c_.empty()) return {};
  std::vector<Rational> c(c_.size() + 1);
  c[0] = 0;
  for (std::size_t k = 0; k < c_.size(); ++k) c[k + 1] = c_[k] / Rational(static_cast<long long>(k + 1));
  return RationalPolynomial(std::move(c));
}

RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b) {
  std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coefficient(k) + b.coefficient(k);
  return RationalPolynomial(std::move(c));
}

RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return {};
  std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return RationalPolynomial(std::move(c));
}

RationalPolynomial operator*(const Rational& s, const RationalPolynomial& a) {
  std::vector<Rational> c = a.c_;
  for (auto& x : c) x *= s;
  return RationalPolynomial(std::move(c));
}

Polynomial RationalPolynomial::to_double() const {
  std::vector<double> c;
  c.reserve(c_.size());
  for (const auto& x : c_) c.push_back(static_cast<double>(x));
  return Polynomial(std::move(c));
}

std::string RationalPolynomial::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (k) os << " + ";
    os << c_[k];
    if (k) os << "*x^" << k;
  }
  return os.str();
}

}  // namespace rmflow
