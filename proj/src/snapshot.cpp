#include "simplexi/snapshot.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace simplexi {

namespace {

bool next_content_line(std::istream& in, std::string& line, Index& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string::npos && line[first] != '#') return true;
  }
  return false;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_matrix_snapshot(std::ostream& out, const SparseColMatrix& a) {
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (Index j = 0; j < a.cols(); ++j) {
    const auto col = a.column(j);
    for (std::size_t p = 0; p < col.values.size(); ++p)
      out << col.rows[p] << ' ' << j << ' ' << format_double(col.values[p]) << '\n';
  }
}

SparseColMatrix read_matrix_snapshot(std::istream& in) {
  std::string line;
  Index line_no = 0;
  if (!next_content_line(in, line, line_no)) throw ParseError("matrix snapshot: missing header");
  Index d = 0;
  Index n = 0;
  Index nnz = 0;
  {
    std::istringstream hdr(line);
    if (!(hdr >> d >> n >> nnz) || d < 0 || n < 0 || nnz < 0)
      throw ParseError("matrix snapshot line " + std::to_string(line_no) + ": bad header");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  while (static_cast<Index>(triplets.size()) < nnz) {
    if (!next_content_line(in, line, line_no))
      throw ParseError("matrix snapshot: expected " + std::to_string(nnz) + " entries, found " +
                       std::to_string(triplets.size()));
    std::istringstream fields(line);
    Triplet t;
    if (!(fields >> t.row >> t.col >> t.value))
      throw ParseError("matrix snapshot line " + std::to_string(line_no) + ": bad triplet");
    triplets.push_back(t);
  }
  return build_csc(triplets, d, n);
}

void write_dense_block(std::ostream& out, const std::string& name, const DenseMatrix& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

DenseMatrix read_dense_block(std::istream& in, const std::string& expected_name) {
  std::string line;
  Index line_no = 0;
  if (!next_content_line(in, line, line_no)) throw ParseError("dense block: missing header");
  std::istringstream hdr(line);
  std::string name;
  Index rows = 0;
  Index cols = 0;
  if (!(hdr >> name >> rows >> cols) || rows < 0 || cols < 0)
    throw ParseError("dense block: bad header '" + line + "'");
  if (!expected_name.empty() && name != expected_name)
    throw ParseError("dense block: expected '" + expected_name + "', found '" + name + "'");
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!next_content_line(in, line, line_no))
      throw ParseError("dense block '" + name + "': truncated at row " + std::to_string(i));
    std::istringstream fields(line);
    for (Index j = 0; j < cols; ++j) {
      if (!(fields >> m(i, j)))
        throw ParseError("dense block '" + name + "': bad value at row " + std::to_string(i));
      if (!std::isfinite(m(i, j)))
        throw ParseError("dense block '" + name + "': non-finite entry");
    }
  }
  return m;
}

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  Index line_no = 0;
  while (next_content_line(in, line, line_no)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

void save_matrix_snapshot(const std::filesystem::path& path, const SparseColMatrix& a) {
  auto out = open_out(path);
  write_matrix_snapshot(out, a);
}

SparseColMatrix load_matrix_snapshot(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_snapshot(in);
}

void save_dense_block(const std::filesystem::path& path, const std::string& name,
                      const DenseMatrix& m) {
  auto out = open_out(path);
  write_dense_block(out, name, m);
}

DenseMatrix load_dense_block(const std::filesystem::path& path, const std::string& name) {
  auto in = open_in(path);
  return read_dense_block(in, name);
}

}  // namespace simplexi
