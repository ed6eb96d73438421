#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tordiss {

using BigInt = boost::multiprecision::cpp_int;
using IntVec = std::vector<int64_t>;
using BigVec = std::vector<BigInt>;

// Square integer matrix, row-major.
class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(int d, std::vector<int64_t> entries);
  static IntMatrix identity(int d);
  static IntMatrix parse(const std::string& text);  // "2,1;1,1"

  int dim() const { return d_; }
  int64_t operator()(int i, int j) const { return a_[static_cast<size_t>(i * d_ + j)]; }
  const std::vector<int64_t>& entries() const { return a_; }
  IntMatrix transpose() const;
  bool is_identity() const;
  std::string str() const;
  bool operator==(const IntMatrix&) const = default;

private:
  int d_ = 0;
  std::vector<int64_t> a_;
};

std::optional<int64_t> checked_add(int64_t a, int64_t b);
std::optional<int64_t> checked_mul(int64_t a, int64_t b);

BigInt determinant(const IntMatrix& m);
// Integer inverse when |det| = 1.
std::optional<IntMatrix> unimodular_inverse(const IntMatrix& m);
std::optional<IntMatrix> checked_product(const IntMatrix& a, const IntMatrix& b);
std::optional<IntVec> checked_apply(const IntMatrix& m, const IntVec& v);
BigVec big_apply(const IntMatrix& m, const BigVec& v);

BigVec to_big(const IntVec& v);
long double to_long_double(const BigInt& x);

// Lattice vector that silently promotes to big integers when 64-bit arithmetic would overflow.
class LatticeVector {
public:
  LatticeVector() = default;
  explicit LatticeVector(IntVec v) : small_(std::move(v)) {}
  explicit LatticeVector(BigVec v) : big_(true), large_(std::move(v)) {}

  int dim() const { return big_ ? static_cast<int>(large_.size()) : static_cast<int>(small_.size()); }
  bool is_big() const { return big_; }
  const IntVec& small() const { return small_; }
  BigVec big() const { return big_ ? large_ : to_big(small_); }
  bool is_zero() const;
  void apply(const IntMatrix& m);
  // Squared Euclidean norm and entries as long double.
  long double norm2() const;
  std::vector<long double> to_long_double() const;
  std::string str() const;
  bool operator==(const LatticeVector& o) const { return big() == o.big(); }

private:
  bool big_ = false;
  IntVec small_;
  BigVec large_;
};

}  // namespace tordiss
