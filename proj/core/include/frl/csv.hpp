#pragma once

#include <string>
#include <vector>

#include "frl/matrix.hpp"

namespace frl {

/// Shortest exact decimal form: 17 significant digits round-trip doubles.
std::string format_double(double x);

double parse_double(const std::string& field);

std::vector<std::string> split_csv_line(const std::string& line);

/// Plain comma-separated rows, no header.
Matrix read_matrix_csv(const std::string& path);

void write_matrix_csv(const Matrix& m, const std::string& path);

/// Whole-file read; throws with the path on failure.
std::string read_text_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace frl
