#pragma once

#include "coherence_pursuit/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace cop {

// Text matrix format: a header line "m n", then m lines of n
// space-separated decimals (the row-major view of the matrix). Values are
// written with 17 significant digits so they read back bit-identically.

Matrix read_matrix(std::istream& in);
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

// One integer label per line.
std::vector<int> read_labels(std::istream& in);
std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(std::ostream& out, const std::vector<int>& labels);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

/// Space-separated indices on a single line.
void write_index_line(std::ostream& out, const std::vector<Index>& indices);
std::vector<Index> read_index_line(std::istream& in);

}  // namespace cop
