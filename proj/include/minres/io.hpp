#pragma once

#include <string>

#include "minres/operator.hpp"

namespace minres::io {

/// Parse failure with file and line context.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Matrix Market coordinate format, real symmetric. The reader also accepts
/// a "general" coordinate file whose entries happen to be symmetric.
DenseSymmetric read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const DenseSymmetric& m);

/// Whitespace-delimited dense text: d rows of d values.
DenseSymmetric read_dense_text(const std::string& path);

/// Detects the format from the %%MatrixMarket banner.
DenseSymmetric read_matrix_auto(const std::string& path);

/// Vectors as one value per line.
Vector read_vector(const std::string& path);
void write_vector(const std::string& path, const Vector& v);

/// Header-free CSV rows: label in {0,1} first, features after.
struct LabeledDataset {
  std::vector<int> labels;
  DenseMatrix features;
};
LabeledDataset read_label_csv(const std::string& path);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

} // namespace minres::io
