#include "tordiss/polynomial.hpp"

#include "tordiss/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <sstream>

namespace tordiss {

IntPoly::IntPoly(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }

IntPoly IntPoly::monomial(int degree) {
  std::vector<BigInt> c(static_cast<size_t>(degree + 1), 0);
  c.back() = 1;
  return IntPoly(std::move(c));
}

void IntPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

std::string IntPoly::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const BigInt& a = c_[static_cast<size_t>(i)];
    if (a == 0) continue;
    if (!first) os << (a < 0 ? " - " : " + ");
    else if (a < 0) os << '-';
    BigInt m = a < 0 ? BigInt(-a) : a;
    if (m != 1 || i == 0) os << m;
    if (i >= 1) os << 'x';
    if (i >= 2) os << '^' << i;
    first = false;
  }
  return os.str();
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return IntPoly();
  std::vector<BigInt> c(a.c_.size() + b.c_.size() - 1, 0);
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return IntPoly(std::move(c));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) {
  std::vector<BigInt> c(std::max(a.c_.size(), b.c_.size()), 0);
  for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
  return IntPoly(std::move(c));
}

PolyDivision divide_monic(const IntPoly& a, const IntPoly& b) {
  if (!b.is_monic()) throw std::invalid_argument("divisor must be monic");
  std::vector<BigInt> r = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {IntPoly(), a};
  std::vector<BigInt> q(static_cast<size_t>(a.degree() - db + 1), 0);
  for (int i = a.degree(); i >= db; --i) {
    BigInt lead = r[static_cast<size_t>(i)];
    if (lead == 0) continue;
    q[static_cast<size_t>(i - db)] = lead;
    for (int j = 0; j <= db; ++j) r[static_cast<size_t>(i - db + j)] -= lead * b[j];
  }
  return {IntPoly(std::move(q)), IntPoly(std::move(r))};
}

bool divides(const IntPoly& divisor, const IntPoly& p) {
  return divide_monic(p, divisor).remainder.is_zero();
}

IntPoly characteristic_polynomial(const IntMatrix& m) {
  // Faddeev-LeVerrier in exact arithmetic; det(xI - A)
  const int n = m.dim();
  using Mat = std::vector<BigInt>;
  auto idx = [n](int i, int j) { return static_cast<size_t>(i * n + j); };
  Mat a(m.entries().begin(), m.entries().end());
  std::vector<BigInt> c(static_cast<size_t>(n + 1), 0);
  c[static_cast<size_t>(n)] = 1;
  Mat mk(static_cast<size_t>(n * n), 0);
  for (int k = 1; k <= n; ++k) {
    Mat next(static_cast<size_t>(n * n), 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        BigInt s = 0;
        for (int l = 0; l < n; ++l) s += a[idx(i, l)] * mk[idx(l, j)];
        next[idx(i, j)] = s;
      }
    for (int i = 0; i < n; ++i) next[idx(i, i)] += c[static_cast<size_t>(n - k + 1)];
    BigInt tr = 0;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) tr += a[idx(i, l)] * next[idx(l, i)];
    c[static_cast<size_t>(n - k)] = -tr / k;
    mk = std::move(next);
  }
  return IntPoly(std::move(c));
}

int euler_phi(int m) {
  int result = m;
  for (int p = 2; p * p <= m; ++p)
    if (m % p == 0) {
      while (m % p == 0) m /= p;
      result -= result / p;
    }
  if (m > 1) result -= result / m;
  return result;
}

IntPoly cyclotomic(int m) {
  if (m < 1) throw std::invalid_argument("cyclotomic index must be positive");
  std::vector<BigInt> c(static_cast<size_t>(m + 1), 0);
  c[0] = -1;
  c[static_cast<size_t>(m)] = 1;
  IntPoly p(std::move(c));
  for (int d = 1; d < m; ++d)
    if (m % d == 0) p = divide_monic(p, cyclotomic(d)).quotient;
  return p;
}

std::vector<std::complex<long double>> roots(const IntPoly& p) {
  using C = std::complex<long double>;
  const int n = p.degree();
  if (n < 1) return {};
  if (!p.is_monic()) throw std::invalid_argument("roots: polynomial must be monic");
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> comp =
      Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -to_long_double(p[i]);
  Eigen::EigenSolver<decltype(comp)> es(comp, false);
  std::vector<C> r;
  for (int i = 0; i < n; ++i) r.push_back(es.eigenvalues()(i));
  // Newton polish on the original polynomial
  for (auto& z : r) {
    for (int it = 0; it < 8; ++it) {
      C f = 0, df = 0;
      for (int i = n; i >= 0; --i) {
        df = df * z + f;
        f = f * z + C(to_long_double(p[i]));
      }
      if (std::abs(df) < 1e-30L) break;
      C step = f / df;
      if (!std::isfinite(std::abs(step))) break;
      z -= step;
      if (std::abs(step) <= 1e-18L * std::max<long double>(1, std::abs(z))) break;
    }
  }
  return r;
}

namespace {

std::optional<IntPoly> rounded_product(const std::vector<std::complex<long double>>& rs) {
  std::vector<std::complex<long double>> c{1};
  for (auto& z : rs) {
    std::vector<std::complex<long double>> next(c.size() + 1, 0);
    for (size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= z * c[i];
    }
    c = std::move(next);
  }
  std::vector<BigInt> out;
  for (auto& z : c) {
    long double re = std::round(z.real());
    if (std::abs(z.imag()) > 0.5L || !std::isfinite(re) || std::abs(re) > 9e18L) return std::nullopt;
    out.emplace_back(static_cast<int64_t>(re));
  }
  return IntPoly(std::move(out));
}

}  // namespace

std::vector<IntPoly> factor_monic(const IntPoly& p) {
  if (!p.is_monic()) throw std::invalid_argument("factor_monic: polynomial must be monic");
  if (p.degree() > 6) throw UnsupportedError("exact factorization is only built in for degree <= 6");
  std::vector<IntPoly> factors;
  IntPoly rest = p;
  auto rts = roots(p);
  while (rest.degree() > 0) {
    const int n = static_cast<int>(rts.size());
    bool found = false;
    for (int s = 1; s <= n && !found; ++s) {
      std::vector<int> pick;
      std::function<bool(int)> rec = [&](int start) -> bool {
        if (static_cast<int>(pick.size()) == s) {
          std::vector<std::complex<long double>> sub;
          for (int i : pick) sub.push_back(rts[static_cast<size_t>(i)]);
          auto q = rounded_product(sub);
          if (q && q->degree() == s && divides(*q, rest)) {
            factors.push_back(*q);
            rest = divide_monic(rest, *q).quotient;
            std::vector<std::complex<long double>> left;
            for (int i = 0; i < n; ++i)
              if (std::find(pick.begin(), pick.end(), i) == pick.end()) left.push_back(rts[static_cast<size_t>(i)]);
            rts = std::move(left);
            return true;
          }
          return false;
        }
        for (int i = start; i < n; ++i) {
          pick.push_back(i);
          if (rec(i + 1)) return true;
          pick.pop_back();
        }
        return false;
      };
      found = rec(0);
    }
    if (!found) throw NumericalFailure("factorization: no integer divisor matched the numerical roots");
  }
  return factors;
}

bool verify_factorization(const IntPoly& p, const std::vector<IntPoly>& factors) {
  IntPoly prod(std::vector<BigInt>{1});
  for (auto& f : factors) {
    if (!f.is_monic() || f.degree() < 1) return false;
    prod = prod * f;
  }
  return prod == p;
}

IntPoly parse_poly(const std::string& text) {
  std::vector<BigInt> c;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) c.emplace_back(std::stoll(cell));
  return IntPoly(std::move(c));
}

}  // namespace tordiss
