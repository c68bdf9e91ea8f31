#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "simplexi/sparse_matrix.hpp"

namespace simplexi {

// Matrix snapshot: header "d n nnz", then one "row col value" line per entry
// in column-major order. Values are printed with 17 significant digits so a
// write/read cycle is exact.
void write_matrix_snapshot(std::ostream& out, const SparseColMatrix& a);
SparseColMatrix read_matrix_snapshot(std::istream& in);

// Dense block: header "<name> rows cols", then `rows` lines of `cols` values.
void write_dense_block(std::ostream& out, const std::string& name, const DenseMatrix& m);
DenseMatrix read_dense_block(std::istream& in, const std::string& expected_name);

// key=value lines, '#' comments. Later keys overwrite earlier ones.
using KeyValues = std::map<std::string, std::string>;
KeyValues read_key_values(std::istream& in);
void write_key_values(std::ostream& out, const KeyValues& kv);

std::string format_double(double v);

void save_matrix_snapshot(const std::filesystem::path& path, const SparseColMatrix& a);
SparseColMatrix load_matrix_snapshot(const std::filesystem::path& path);
void save_dense_block(const std::filesystem::path& path, const std::string& name,
                      const DenseMatrix& m);
DenseMatrix load_dense_block(const std::filesystem::path& path, const std::string& name);

}  // namespace simplexi
