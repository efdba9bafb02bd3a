#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ctrees/words.hpp"

namespace ctrees {

// Dense complex polynomial, coefficients in ascending degree order.
// The zero polynomial has an empty coefficient vector and degree -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> coeffs);
  Polynomial(double re) : Polynomial(cplx{re, 0.0}) {}
  Polynomial(cplx constant);

  static Polynomial variable();  // z

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx coeff(std::size_t k) const { return k < c_.size() ? c_[k] : cplx{}; }
  cplx leading() const { return c_.empty() ? cplx{} : c_.back(); }
  double max_abs_coeff() const;

  cplx eval(cplx z) const;          // Horner
  double abs_eval(double t) const;  // sum |c_k| t^k, a backward-error scale

  // Drop leading coefficients of magnitude <= eps * max |coeff|.
  void trim(double eps = 1e-14);
  void scale(cplx factor);

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

 private:
  std::vector<cplx> c_;
};

// Euclidean division: a = q * b + r with deg r < deg b.
std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b);

// Monic gcd by the Euclidean algorithm; remainders are rescaled to unit max
// coefficient and coefficients below eps (relative) are flushed to zero so
// that near-common factors are detected despite rounding.
Polynomial poly_gcd(Polynomial a, Polynomial b, double eps = 1e-12);

// Quotient of polynomials, kept normalized: common factors divided out when
// the division is numerically exact, denominator monic.
class RationalFunction {
 public:
  RationalFunction() : num_(0.0), den_(1.0) {}
  RationalFunction(Polynomial num, Polynomial den);
  RationalFunction(double re) : RationalFunction(Polynomial(re), Polynomial(1.0)) {}
  RationalFunction(cplx constant) : RationalFunction(Polynomial(constant), Polynomial(1.0)) {}

  static RationalFunction variable();

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  cplx eval(cplx z) const;
  // Empty when z is (numerically) a pole.
  std::optional<cplx> eval_checked(cplx z) const;

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);

 private:
  void normalize();

  Polynomial num_;
  Polynomial den_;
};

}  // namespace ctrees
