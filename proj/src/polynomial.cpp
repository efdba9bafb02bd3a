#include "ctrees/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace ctrees {

namespace {
constexpr double kTrimEps = 1e-14;
constexpr int kMaxDegree = 1 << 14;
}  // namespace

Polynomial::Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
  if (c_.size() > kMaxDegree) throw InputError("polynomial degree too large");
  trim(0.0);
}

Polynomial::Polynomial(cplx constant) {
  if (constant != cplx{}) c_.push_back(constant);
}

Polynomial Polynomial::variable() { return Polynomial({cplx{}, cplx{1.0, 0.0}}); }

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const cplx& x : c_) m = std::max(m, std::abs(x));
  return m;
}

cplx Polynomial::eval(cplx z) const {
  cplx acc{};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double Polynomial::abs_eval(double t) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + std::abs(*it);
  return acc;
}

void Polynomial::trim(double eps) {
  const double cut = eps * max_abs_coeff();
  while (!c_.empty() && std::abs(c_.back()) <= cut) c_.pop_back();
}

void Polynomial::scale(cplx factor) {
  for (cplx& x : c_) x *= factor;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  trim(0.0);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
  trim(0.0);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial{};
  if (a.degree() + b.degree() > kMaxDegree)
    throw InputError("polynomial product degree too large");
  std::vector<cplx> out(a.c_.size() + b.c_.size() - 1, cplx{});
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(out));
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw InputError("polynomial division by zero");
  if (a.degree() < b.degree()) return {Polynomial{}, a};
  std::vector<cplx> rem = a.coeffs();
  std::vector<cplx> quot(static_cast<std::size_t>(a.degree() - b.degree()) + 1, cplx{});
  const cplx lead = b.leading();
  for (int k = a.degree() - b.degree(); k >= 0; --k) {
    const cplx q = rem[static_cast<std::size_t>(k + b.degree())] / lead;
    quot[static_cast<std::size_t>(k)] = q;
    for (int j = 0; j <= b.degree(); ++j)
      rem[static_cast<std::size_t>(k + j)] -= q * b.coeff(static_cast<std::size_t>(j));
  }
  rem.resize(static_cast<std::size_t>(std::max(b.degree(), 0)));
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

Polynomial poly_gcd(Polynomial a, Polynomial b, double eps) {
  auto scrub = [eps](Polynomial& p) {
    const double m = p.max_abs_coeff();
    if (m > 0.0) p.scale(cplx{1.0 / m, 0.0});
    p.trim(eps);
  };
  scrub(a);
  scrub(b);
  if (a.degree() < b.degree()) std::swap(a, b);
  while (!b.is_zero()) {
    Polynomial r = divmod(a, b).second;
    scrub(r);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero()) a.scale(1.0 / a.leading());
  return a;
}

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw InputError("rational function needs nonzero denominator");
  normalize();
}

RationalFunction RationalFunction::variable() {
  return RationalFunction(Polynomial::variable(), Polynomial(1.0));
}

void RationalFunction::normalize() {
  num_.trim(kTrimEps);
  if (num_.is_zero()) {
    den_ = Polynomial(1.0);
    return;
  }
  if (den_.degree() > 0) {
    const Polynomial g = poly_gcd(num_, den_);
    if (g.degree() > 0) {
      auto [qn, rn] = divmod(num_, g);
      auto [qd, rd] = divmod(den_, g);
      // Only deflate when the divisions are numerically exact; otherwise the
      // "gcd" was an artifact of rounding and the fraction is left alone.
      if (rn.max_abs_coeff() <= 1e-10 * std::max(1.0, num_.max_abs_coeff()) &&
          rd.max_abs_coeff() <= 1e-10 * std::max(1.0, den_.max_abs_coeff())) {
        num_ = std::move(qn);
        den_ = std::move(qd);
      }
    }
  }
  const cplx lead = den_.leading();
  num_.scale(1.0 / lead);
  den_.scale(1.0 / lead);
  num_.trim(kTrimEps);
  den_.trim(0.0);
}

cplx RationalFunction::eval(cplx z) const { return num_.eval(z) / den_.eval(z); }

std::optional<cplx> RationalFunction::eval_checked(cplx z) const {
  const cplx d = den_.eval(z);
  if (std::abs(d) <= 1e-14 * std::max(1.0, den_.abs_eval(std::abs(z)))) return std::nullopt;
  const cplx v = num_.eval(z) / d;
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return std::nullopt;
  return v;
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw InputError("rational division by zero");
  return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

}  // namespace ctrees
