#include "robitmc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace robitmc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_field(const std::string& field, const std::string& path,
                   std::size_t line_no, const std::string& column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && field.front() == '+') ++begin;  // from_chars rejects '+'
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": cannot parse '" + field + "' in column '" +
                             column + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": non-finite value in column '" + column + "'");
  }
  return value;
}

}  // namespace

Dataset ingest_csv(const std::string& path, const IngestOptions& options) {
  if (options.response_column.empty()) {
    throw std::runtime_error(path + ": no response column specified");
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty file, expected a header row");
  }
  const std::vector<std::string> header = split_csv_line(line);

  std::ptrdiff_t response_idx = -1;
  std::vector<std::size_t> predictor_idx;
  std::vector<std::string> predictor_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == options.response_column) {
      if (response_idx >= 0) {
        throw std::runtime_error(path + ":1: duplicate response column '" +
                                 options.response_column + "'");
      }
      response_idx = static_cast<std::ptrdiff_t>(j);
    }
  }
  if (response_idx < 0) {
    throw std::runtime_error(path + ":1: response column '" +
                             options.response_column + "' not found");
  }

  if (!options.columns.empty()) {
    for (const auto& name : options.columns) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) {
        throw std::runtime_error(path + ":1: column '" + name + "' not found");
      }
      const auto j = static_cast<std::size_t>(it - header.begin());
      if (static_cast<std::ptrdiff_t>(j) == response_idx) {
        throw std::runtime_error(path + ":1: column '" + name +
                                 "' is the response column");
      }
      predictor_idx.push_back(j);
      predictor_names.push_back(name);
    }
  } else {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (static_cast<std::ptrdiff_t>(j) == response_idx) continue;
      predictor_idx.push_back(j);
      predictor_names.push_back(header[j]);
    }
    if (options.first_k >= 0) {
      const auto k = static_cast<std::size_t>(options.first_k);
      if (k > predictor_idx.size()) {
        throw std::runtime_error(path + ":1: requested first " +
                                 std::to_string(k) + " predictors but only " +
                                 std::to_string(predictor_idx.size()) +
                                 " are available");
      }
      predictor_idx.resize(k);
      predictor_names.resize(k);
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> responses;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) +
                               " fields, found " + std::to_string(fields.size()));
    }
    const double y = parse_field(fields[static_cast<std::size_t>(response_idx)],
                                 path, line_no, options.response_column);
    if (y != 0.0 && y != 1.0) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": response must be 0 or 1, found " +
                               fields[static_cast<std::size_t>(response_idx)]);
    }
    responses.push_back(static_cast<int>(y));
    std::vector<double> row;
    row.reserve(predictor_idx.size());
    for (std::size_t k = 0; k < predictor_idx.size(); ++k) {
      row.push_back(parse_field(fields[predictor_idx[k]], path, line_no,
                                predictor_names[k]));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::runtime_error(path + ": no data rows");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index base = static_cast<Eigen::Index>(predictor_idx.size());
  const Eigen::Index p = base + (options.intercept ? 1 : 0);
  if (p == 0) {
    throw std::runtime_error(path + ": no predictor columns selected");
  }
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXi y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    if (options.intercept) X(i, j++) = 1.0;
    for (Eigen::Index k = 0; k < base; ++k) {
      X(i, j++) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    y[i] = responses[static_cast<std::size_t>(i)];
  }
  return Dataset::create(std::move(X), std::move(y));
}

std::vector<std::string> design_column_labels(
    const std::vector<std::string>& selected, bool intercept) {
  std::vector<std::string> labels;
  if (intercept) labels.push_back("intercept");
  labels.insert(labels.end(), selected.begin(), selected.end());
  return labels;
}

Eigen::MatrixXd read_numeric_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line) {
      if (c == ',' || c == '\t') c = ' ';
    }
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size() || line[pos] == '\r') break;
      const std::size_t end = line.find(' ', pos);
      const std::string field =
          trim(line.substr(pos, end == std::string::npos ? end : end - pos));
      row.push_back(parse_field(field, path, line_no, "value"));
      if (end == std::string::npos) break;
      pos = end;
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected " +
                               std::to_string(rows.front().size()) +
                               " fields, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no numeric rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

Eigen::VectorXd read_numeric_vector(const std::string& path) {
  const Eigen::MatrixXd m = read_numeric_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw std::runtime_error(path + ": expected a single row or column");
}

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace robitmc
