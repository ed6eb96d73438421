#pragma once

#include "tordiss/fourier.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace tordiss {

// JSON form: {"kind", "d", "K", "order": "lexicographic", "size", "entries": [[re, im], ...]}
// with operator entries in row-major order.
nlohmann::json to_json(const FourierVector& f);
nlohmann::json to_json(const DenseOperator& T);
FourierVector vector_from_json(const nlohmann::json& j);
DenseOperator operator_from_json(const nlohmann::json& j);

// Binary form, little-endian: magic "TORDISS1", u32 kind (1 vector, 2 operator), u32 d,
// i64 K, u64 size, then size (vector) or size*size (operator, row-major) pairs of f64 re/im.
void write_binary(std::ostream& os, const FourierVector& f);
void write_binary(std::ostream& os, const DenseOperator& T);
FourierVector read_vector_binary(std::istream& is);
DenseOperator read_operator_binary(std::istream& is);

void save_operator(const std::string& path, const DenseOperator& T);
DenseOperator load_operator(const std::string& path);

}  // namespace tordiss
