#include "tordiss/serialization.hpp"

#include "tordiss/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tordiss {

static_assert(std::endian::native == std::endian::little, "binary format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'T', 'O', 'R', 'D', 'I', 'S', 'S', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated binary stream");
  return v;
}

void header(std::ostream& os, uint32_t kind, const TruncatedGrid& g) {
  os.write(kMagic, 8);
  put<uint32_t>(os, kind);
  put<uint32_t>(os, static_cast<uint32_t>(g.dim()));
  put<int64_t>(os, g.cutoff());
  put<uint64_t>(os, static_cast<uint64_t>(g.size()));
}

GridPtr read_header(std::istream& is, uint32_t expected_kind) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("not a tordiss binary stream");
  auto kind = get<uint32_t>(is);
  if (kind != expected_kind) throw std::runtime_error("binary stream holds a different object kind");
  auto d = get<uint32_t>(is);
  auto K = get<int64_t>(is);
  auto n = get<uint64_t>(is);
  auto grid = make_grid(static_cast<int>(d), K);
  if (static_cast<uint64_t>(grid->size()) != n) throw DimensionError("binary header size mismatch");
  return grid;
}

nlohmann::json grid_json(const TruncatedGrid& g, const char* kind) {
  return {{"kind", kind}, {"d", g.dim()}, {"K", g.cutoff()}, {"order", "lexicographic"}, {"size", g.size()}};
}

GridPtr grid_from_json(const nlohmann::json& j, const char* kind) {
  if (j.at("kind").get<std::string>() != kind) throw std::runtime_error(std::string("expected a ") + kind);
  if (j.at("order").get<std::string>() != "lexicographic") throw std::runtime_error("unknown mode order");
  auto grid = make_grid(j.at("d").get<int>(), j.at("K").get<int64_t>());
  if (grid->size() != j.at("size").get<int64_t>()) throw DimensionError("grid size mismatch");
  return grid;
}

}  // namespace

nlohmann::json to_json(const FourierVector& f) {
  auto j = grid_json(*f.grid(), "vector");
  auto& e = j["entries"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < f.coeffs().size(); ++i) e.push_back({f.coeffs()(i).real(), f.coeffs()(i).imag()});
  return j;
}

nlohmann::json to_json(const DenseOperator& T) {
  auto j = grid_json(*T.grid(), "operator");
  auto& e = j["entries"] = nlohmann::json::array();
  Eigen::MatrixXcd m = T.to_dense();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) e.push_back({m(r, c).real(), m(r, c).imag()});
  return j;
}

FourierVector vector_from_json(const nlohmann::json& j) {
  auto grid = grid_from_json(j, "vector");
  const auto& e = j.at("entries");
  if (static_cast<int64_t>(e.size()) != grid->size()) throw DimensionError("entry count mismatch");
  Eigen::VectorXcd c(grid->size());
  for (int64_t i = 0; i < grid->size(); ++i) c(i) = cplx(e[static_cast<size_t>(i)][0], e[static_cast<size_t>(i)][1]);
  return FourierVector(grid, std::move(c));
}

DenseOperator operator_from_json(const nlohmann::json& j) {
  auto grid = grid_from_json(j, "operator");
  const auto& e = j.at("entries");
  const int64_t n = grid->size();
  if (static_cast<int64_t>(e.size()) != n * n) throw DimensionError("entry count mismatch");
  Eigen::MatrixXcd m(n, n);
  for (int64_t r = 0; r < n; ++r)
    for (int64_t c = 0; c < n; ++c) {
      const auto& v = e[static_cast<size_t>(r * n + c)];
      m(r, c) = cplx(v[0], v[1]);
    }
  return DenseOperator::from_dense(grid, m);
}

void write_binary(std::ostream& os, const FourierVector& f) {
  header(os, 1, *f.grid());
  for (Eigen::Index i = 0; i < f.coeffs().size(); ++i) {
    put<double>(os, f.coeffs()(i).real());
    put<double>(os, f.coeffs()(i).imag());
  }
}

void write_binary(std::ostream& os, const DenseOperator& T) {
  header(os, 2, *T.grid());
  Eigen::MatrixXcd m = T.to_dense();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put<double>(os, m(r, c).real());
      put<double>(os, m(r, c).imag());
    }
}

FourierVector read_vector_binary(std::istream& is) {
  auto grid = read_header(is, 1);
  Eigen::VectorXcd c(grid->size());
  for (int64_t i = 0; i < grid->size(); ++i) {
    double re = get<double>(is), im = get<double>(is);
    c(i) = cplx(re, im);
  }
  return FourierVector(grid, std::move(c));
}

DenseOperator read_operator_binary(std::istream& is) {
  auto grid = read_header(is, 2);
  const int64_t n = grid->size();
  Eigen::MatrixXcd m(n, n);
  for (int64_t r = 0; r < n; ++r)
    for (int64_t c = 0; c < n; ++c) {
      double re = get<double>(is), im = get<double>(is);
      m(r, c) = cplx(re, im);
    }
  return DenseOperator::from_dense(grid, m);
}

void save_operator(const std::string& path, const DenseOperator& T) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_binary(os, T);
}

DenseOperator load_operator(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_operator_binary(is);
}

}  // namespace tordiss
