#include "tordiss/integer.hpp"

#include "tordiss/error.hpp"

#include <sstream>

namespace tordiss {

IntMatrix::IntMatrix(int d, std::vector<int64_t> entries) : d_(d), a_(std::move(entries)) {
  if (d < 1 || a_.size() != static_cast<size_t>(d) * static_cast<size_t>(d))
    throw DimensionError("integer matrix entries do not form a square matrix");
}

IntMatrix IntMatrix::identity(int d) {
  std::vector<int64_t> e(static_cast<size_t>(d * d), 0);
  for (int i = 0; i < d; ++i) e[static_cast<size_t>(i * d + i)] = 1;
  return IntMatrix(d, std::move(e));
}

IntMatrix IntMatrix::parse(const std::string& text) {
  std::vector<std::vector<int64_t>> rows;
  std::stringstream all(text);
  std::string row;
  while (std::getline(all, row, ';')) {
    std::vector<int64_t> r;
    std::stringstream rs(row);
    std::string cell;
    while (std::getline(rs, cell, ',')) {
      size_t pos = 0;
      long long v = std::stoll(cell, &pos);
      for (size_t i = pos; i < cell.size(); ++i)
        if (!std::isspace(static_cast<unsigned char>(cell[i])))
          throw std::invalid_argument("bad integer '" + cell + "'");
      r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  int d = static_cast<int>(rows.size());
  std::vector<int64_t> e;
  for (auto& r : rows) {
    if (static_cast<int>(r.size()) != d) throw DimensionError("matrix '" + text + "' is not square");
    e.insert(e.end(), r.begin(), r.end());
  }
  return IntMatrix(d, std::move(e));
}

IntMatrix IntMatrix::transpose() const {
  std::vector<int64_t> e(a_.size());
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) e[static_cast<size_t>(j * d_ + i)] = (*this)(i, j);
  return IntMatrix(d_, std::move(e));
}

bool IntMatrix::is_identity() const { return *this == identity(d_); }

std::string IntMatrix::str() const {
  std::ostringstream os;
  for (int i = 0; i < d_; ++i) {
    if (i) os << ';';
    for (int j = 0; j < d_; ++j) os << (j ? "," : "") << (*this)(i, j);
  }
  return os.str();
}

std::optional<int64_t> checked_add(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
  return r;
}

std::optional<int64_t> checked_mul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
  return r;
}

BigInt determinant(const IntMatrix& m) {
  // Bareiss fraction-free elimination
  const int d = m.dim();
  std::vector<BigInt> a(m.entries().begin(), m.entries().end());
  auto at = [&](int i, int j) -> BigInt& { return a[static_cast<size_t>(i * d + j)]; };
  BigInt prev = 1;
  int sign = 1;
  for (int k = 0; k < d - 1; ++k) {
    if (at(k, k) == 0) {
      int p = k + 1;
      while (p < d && at(p, k) == 0) ++p;
      if (p == d) return 0;
      for (int j = 0; j < d; ++j) std::swap(at(k, j), at(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < d; ++i)
      for (int j = k + 1; j < d; ++j) at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
    prev = at(k, k);
  }
  return sign * at(d - 1, d - 1);
}

std::optional<IntMatrix> unimodular_inverse(const IntMatrix& m) {
  const int d = m.dim();
  BigInt det = determinant(m);
  if (det != 1 && det != -1) return std::nullopt;
  // adjugate via cofactors
  std::vector<int64_t> inv(static_cast<size_t>(d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      BigInt cof;
      if (d == 1) {
        cof = 1;
      } else {
        std::vector<int64_t> minor;
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c)
            if (r != j && c != i) minor.push_back(m(r, c));
        cof = determinant(IntMatrix(d - 1, std::move(minor)));
      }
      if ((i + j) % 2) cof = -cof;
      BigInt v = cof * det;  // det = ±1 so 1/det = det
      if (v > std::numeric_limits<int64_t>::max() || v < std::numeric_limits<int64_t>::min())
        return std::nullopt;
      inv[static_cast<size_t>(i * d + j)] = static_cast<int64_t>(v);
    }
  return IntMatrix(d, std::move(inv));
}

std::optional<IntMatrix> checked_product(const IntMatrix& a, const IntMatrix& b) {
  const int d = a.dim();
  if (b.dim() != d) throw DimensionError("matrix product dimension mismatch");
  std::vector<int64_t> e(static_cast<size_t>(d * d), 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      int64_t s = 0;
      for (int k = 0; k < d; ++k) {
        auto p = checked_mul(a(i, k), b(k, j));
        if (!p) return std::nullopt;
        auto q = checked_add(s, *p);
        if (!q) return std::nullopt;
        s = *q;
      }
      e[static_cast<size_t>(i * d + j)] = s;
    }
  return IntMatrix(d, std::move(e));
}

std::optional<IntVec> checked_apply(const IntMatrix& m, const IntVec& v) {
  const int d = m.dim();
  IntVec out(static_cast<size_t>(d), 0);
  for (int i = 0; i < d; ++i) {
    int64_t s = 0;
    for (int k = 0; k < d; ++k) {
      auto p = checked_mul(m(i, k), v[static_cast<size_t>(k)]);
      if (!p) return std::nullopt;
      auto q = checked_add(s, *p);
      if (!q) return std::nullopt;
      s = *q;
    }
    out[static_cast<size_t>(i)] = s;
  }
  return out;
}

BigVec big_apply(const IntMatrix& m, const BigVec& v) {
  const int d = m.dim();
  BigVec out(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    BigInt s = 0;
    for (int k = 0; k < d; ++k) s += BigInt(m(i, k)) * v[static_cast<size_t>(k)];
    out[static_cast<size_t>(i)] = std::move(s);
  }
  return out;
}

BigVec to_big(const IntVec& v) { return BigVec(v.begin(), v.end()); }

long double to_long_double(const BigInt& x) { return x.convert_to<long double>(); }

bool LatticeVector::is_zero() const {
  if (big_) {
    for (auto& x : large_)
      if (x != 0) return false;
    return true;
  }
  for (auto x : small_)
    if (x != 0) return false;
  return true;
}

void LatticeVector::apply(const IntMatrix& m) {
  if (m.dim() != dim()) throw DimensionError("lattice vector dimension mismatch");
  if (!big_) {
    if (auto r = checked_apply(m, small_)) {
      small_ = std::move(*r);
      return;
    }
    large_ = to_big(small_);
    small_.clear();
    big_ = true;
  }
  large_ = big_apply(m, large_);
}

long double LatticeVector::norm2() const {
  long double s = 0;
  for (long double x : to_long_double()) s += x * x;
  return s;
}

std::vector<long double> LatticeVector::to_long_double() const {
  std::vector<long double> out;
  if (big_)
    for (auto& x : large_) out.push_back(tordiss::to_long_double(x));
  else
    for (auto x : small_) out.push_back(static_cast<long double>(x));
  return out;
}

std::string LatticeVector::str() const {
  std::ostringstream os;
  os << '(';
  if (big_)
    for (size_t i = 0; i < large_.size(); ++i) os << (i ? "," : "") << large_[i];
  else
    for (size_t i = 0; i < small_.size(); ++i) os << (i ? "," : "") << small_[i];
  os << ')';
  return os.str();
}

}  // namespace tordiss
