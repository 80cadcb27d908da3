#pragma once

#include <string>
#include <vector>

#include "robitmc/linalg.hpp"

namespace robitmc {

struct IngestOptions {
  std::string response_column;        // required, must exist in the header
  bool intercept = true;              // prepend a column of ones
  std::vector<std::string> columns;   // predictor subset by name; empty = all
  int first_k = -1;                   // or: first k predictors in file order
};

// Reads a headered numeric CSV into a Dataset. Malformed input (ragged row,
// unparseable field, non-binary response, unknown column) throws
// std::runtime_error naming the file line. The intercept, when requested,
// becomes the first column of X.
Dataset ingest_csv(const std::string& path, const IngestOptions& options);

// Column labels matching the X produced by ingest_csv under these options,
// given the predictor names actually selected.
std::vector<std::string> design_column_labels(
    const std::vector<std::string>& selected, bool intercept);

// Headerless numeric matrix, fields separated by commas or whitespace, one
// row per line. Errors name the file line.
Eigen::MatrixXd read_numeric_matrix(const std::string& path);

// Same, flattened; accepts a single row or a single column.
Eigen::VectorXd read_numeric_vector(const std::string& path);

// %.17g rendering used for every numeric value we write.
std::string format_g17(double value);

}  // namespace robitmc
