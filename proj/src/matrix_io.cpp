#include "coherence_pursuit/matrix_io.hpp"

#include "coherence_pursuit/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

namespace cop {
namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

double parse_value(const std::string& token) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw IoError("matrix: cannot parse value '" + token + "'");
  }
  if (used != token.size()) throw IoError("matrix: cannot parse value '" + token + "'");
  if (!std::isfinite(v)) throw IoError("matrix: non-finite value '" + token + "'");
  return v;
}

}  // namespace

Matrix read_matrix(std::istream& in) {
  long long rows = 0;
  long long cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1)
    throw IoError("matrix: bad header, expected 'm n' with m, n >= 1");
  Matrix m(rows, cols);
  std::string token;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!(in >> token))
        throw IoError("matrix: truncated at row " + std::to_string(i) + ", column " +
                      std::to_string(j));
      m(i, j) = parse_value(token);
    }
  }
  return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  if (!m.allFinite()) throw IoError("matrix: refusing to write NaN or Inf");
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("matrix: write failed");
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  write_matrix(out, m);
}

std::vector<int> read_labels(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    int v = 0;
    if (!(ss >> v)) throw IoError("labels: cannot parse line '" + line + "'");
    labels.push_back(v);
  }
  return labels;
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels(in);
}

void write_labels(std::ostream& out, const std::vector<int>& labels) {
  for (int v : labels) out << v << '\n';
  if (!out) throw IoError("labels: write failed");
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  write_labels(out, labels);
}

void write_index_line(std::ostream& out, const std::vector<Index>& indices) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) out << ' ';
    out << indices[i];
  }
  out << '\n';
}

std::vector<Index> read_index_line(std::istream& in) {
  std::string line;
  std::getline(in, line);
  std::istringstream ss(line);
  std::vector<Index> out;
  long long v = 0;
  while (ss >> v) out.push_back(static_cast<Index>(v));
  return out;
}

}  // namespace cop
