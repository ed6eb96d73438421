#pragma once

#include "tordiss/integer.hpp"

#include <complex>
#include <string>
#include <vector>

namespace tordiss {

// Integer polynomial, coefficients from the constant term upward.
class IntPoly {
public:
  IntPoly() = default;
  explicit IntPoly(std::vector<BigInt> coeffs);
  static IntPoly monomial(int degree);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<BigInt>& coeffs() const { return c_; }
  const BigInt& operator[](int i) const { return c_[static_cast<size_t>(i)]; }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  bool is_zero() const { return c_.empty(); }
  std::string str() const;

  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b);
  bool operator==(const IntPoly& o) const { return c_ == o.c_; }

private:
  void trim();
  std::vector<BigInt> c_;
};

struct PolyDivision {
  IntPoly quotient;
  IntPoly remainder;
};

// Division by a monic polynomial; exact over the integers.
PolyDivision divide_monic(const IntPoly& a, const IntPoly& b);
bool divides(const IntPoly& divisor, const IntPoly& p);

IntPoly characteristic_polynomial(const IntMatrix& m);
IntPoly cyclotomic(int m);
int euler_phi(int m);

std::vector<std::complex<long double>> roots(const IntPoly& p);

// Irreducible factors over the rationals (monic, with multiplicity); degree <= 6 only.
std::vector<IntPoly> factor_monic(const IntPoly& p);
// True when the product of the factors equals p and every factor is monic.
bool verify_factorization(const IntPoly& p, const std::vector<IntPoly>& factors);

IntPoly parse_poly(const std::string& text);  // "1,-3,1" constant term first

}  // namespace tordiss
