#include "biot/mmio.hpp"

#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace biot {

namespace {

void check_open(const std::ios& s, const std::string& path) {
  if (!s.good()) throw std::runtime_error("matrix market: cannot open " + path);
}

std::string read_banner(std::istream& is, bool& coordinate, bool& symmetric) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("matrix market: empty stream");
  std::istringstream b(line);
  std::string tag, object, format, field, sym;
  b >> tag >> object >> format >> field >> sym;
  if (tag != "%%MatrixMarket" || object != "matrix")
    throw std::runtime_error("matrix market: bad banner: " + line);
  if (field != "real")
    throw std::runtime_error("matrix market: only real matrices supported");
  coordinate = (format == "coordinate");
  symmetric = (sym == "symmetric");
  if (sym != "general" && sym != "symmetric")
    throw std::runtime_error("matrix market: unsupported symmetry " + sym);
  // skip comments
  while (is.peek() == '%') std::getline(is, line);
  return line;
}

} // namespace

void write_matrix_market(std::ostream& os, const SparseMatrix& A) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows << ' ' << A.cols << ' ' << A.nnz() << '\n';
  char buf[64];
  for (int i = 0; i < A.rows; ++i)
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, A.idx[p] + 1, A.val[p]);
      os << buf;
    }
}

void write_matrix_market(const std::string& path, const SparseMatrix& A) {
  std::ofstream os(path);
  check_open(os, path);
  write_matrix_market(os, A);
}

SparseMatrix read_matrix_market(std::istream& is) {
  bool coordinate = true, symmetric = false;
  read_banner(is, coordinate, symmetric);
  if (!coordinate) throw std::runtime_error("matrix market: expected coordinate format");
  int rows, cols, nnz;
  is >> rows >> cols >> nnz;
  if (!is) throw std::runtime_error("matrix market: bad size line");
  TripletBuffer t(static_cast<std::size_t>(nnz) * (symmetric ? 2 : 1));
  for (int k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    is >> i >> j >> v;
    if (!is) throw std::runtime_error("matrix market: truncated entry list");
    t.add(i - 1, j - 1, v);
    if (symmetric && i != j) t.add(j - 1, i - 1, v);
  }
  return t.build(rows, cols);
}

SparseMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream is(path);
  check_open(is, path);
  return read_matrix_market(is);
}

void write_matrix_market_vector(std::ostream& os, const Vec& v) {
  os << "%%MatrixMarket matrix array real general\n";
  os << v.size() << " 1\n";
  char buf[40];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    os << buf;
  }
}

void write_matrix_market_vector(const std::string& path, const Vec& v) {
  std::ofstream os(path);
  check_open(os, path);
  write_matrix_market_vector(os, v);
}

Vec read_matrix_market_vector(std::istream& is) {
  bool coordinate = true, symmetric = false;
  read_banner(is, coordinate, symmetric);
  if (coordinate) throw std::runtime_error("matrix market: expected array format");
  int rows, cols;
  is >> rows >> cols;
  if (!is || cols != 1) throw std::runtime_error("matrix market: expected a single column");
  Vec v(rows);
  for (int i = 0; i < rows; ++i) {
    is >> v[i];
    if (!is) throw std::runtime_error("matrix market: truncated array");
  }
  return v;
}

Vec read_matrix_market_vector_file(const std::string& path) {
  std::ifstream is(path);
  check_open(is, path);
  return read_matrix_market_vector(is);
}

} // namespace biot
