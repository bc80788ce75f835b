#include "minres/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace minres::io {

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

} // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

DenseSymmetric read_matrix_market(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
  ++lineno;
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw ParseError(path, lineno, "missing %%MatrixMarket banner");
  if (lowercase(object) != "matrix" || lowercase(format) != "coordinate") {
    throw ParseError(path, lineno, "only coordinate matrices are supported");
  }
  if (lowercase(field) != "real" && lowercase(field) != "integer") {
    throw ParseError(path, lineno, "only real-valued matrices are supported");
  }
  const std::string sym = lowercase(symmetry);
  if (sym != "symmetric" && sym != "general") {
    throw ParseError(path, lineno, "unsupported symmetry '" + symmetry + "'");
  }

  // skip comments
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sizes(line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(sizes >> rows >> cols >> nnz)) throw ParseError(path, lineno, "bad size line");
  if (rows != cols) throw ParseError(path, lineno, "matrix is not square");

  DenseSymmetric m(rows);
  std::vector<bool> seen(rows * cols, false);
  for (std::size_t e = 0; e < nnz; ++e) {
    if (!std::getline(in, line)) throw ParseError(path, lineno + 1, "unexpected end of file");
    ++lineno;
    std::istringstream entry(line);
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v)) throw ParseError(path, lineno, "bad entry line");
    if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(path, lineno, "index out of range");
    --i;
    --j;
    if (sym == "general") {
      if (seen[j * cols + i] && m.at(i, j) != v) {
        throw ParseError(path, lineno, "general file is not symmetric");
      }
      seen[i * cols + j] = true;
    }
    m.set(i, j, v);
  }
  return m;
}

void write_matrix_market(const std::string& path, const DenseSymmetric& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  const std::size_t d = m.dim();
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j)
      if (m.at(i, j) != 0.0) ++nnz;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << d << " " << d << " " << nnz << "\n";
  // lower triangle, as customary for symmetric Matrix Market files
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      if (m.at(i, j) != 0.0) {
        out << (j + 1) << " " << (i + 1) << " " << format_double(m.at(i, j)) << "\n";
      }
    }
  }
}

DenseSymmetric read_dense_text(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw ParseError(path, lineno, "non-numeric token");
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path, lineno, "ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path, lineno, "empty matrix");
  if (rows.size() != rows.front().size()) {
    throw ParseError(path, lineno, "matrix is not square");
  }
  const std::size_t d = rows.size();
  DenseMatrix m(d, d);
  double scale = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      m(i, j) = rows[i][j];
      scale = std::max(scale, std::abs(m(i, j)));
    }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * std::max(1.0, scale)) {
        throw ParseError(path, 0, "matrix is not symmetric");
      }
  return DenseSymmetric::from_dense(m);
}

DenseSymmetric read_matrix_auto(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string first;
  std::getline(in, first);
  in.close();
  if (first.rfind("%%MatrixMarket", 0) == 0) return read_matrix_market(path);
  return read_dense_text(path);
}

Vector read_vector(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  Vector v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    double x;
    if (!(ls >> x)) throw ParseError(path, lineno, "non-numeric line");
    v.push_back(x);
  }
  if (v.empty()) throw ParseError(path, lineno, "empty vector");
  return v;
}

void write_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  for (double x : v) out << format_double(x) << "\n";
}

LabeledDataset read_label_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<int> labels;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(path, lineno, "non-numeric cell '" + cell + "'");
      }
    }
    if (vals.size() < 2) throw ParseError(path, lineno, "row needs a label and at least one feature");
    if (vals[0] != 0.0 && vals[0] != 1.0) {
      throw ParseError(path, lineno, "label must be 0 or 1");
    }
    if (!rows.empty() && vals.size() != rows.front().size() + 1) {
      throw ParseError(path, lineno, "ragged row");
    }
    labels.push_back(static_cast<int>(vals[0]));
    rows.emplace_back(vals.begin() + 1, vals.end());
  }
  if (rows.empty()) throw ParseError(path, lineno, "empty dataset");
  LabeledDataset ds;
  ds.labels = std::move(labels);
  ds.features = DenseMatrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) ds.features(i, j) = rows[i][j];
  return ds;
}

} // namespace minres::io
