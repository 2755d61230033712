#pragma once

#include <string>

#include "corrstress/types.hpp"

namespace corrstress {

// JSON {"n": int, "entries": [[row], ...], "scale": optional multiplier
// applied on load, default 1} or CSV (n rows of n comma-separated values,
// no header). Format chosen by extension, falling back to content sniffing.
Matrix load_matrix_file(const std::string& path);
Matrix parse_matrix_json(const std::string& text);

void save_matrix_json(const std::string& path, const Matrix& m, double display_scale = 1.0);
void save_matrix_csv(const std::string& path, const Matrix& m, double display_scale = 1.0);

// JSON {"values": [...]} or one value per line.
Vector load_vector_file(const std::string& path);

bool looks_like_csv(const std::string& path);

std::string format_matrix_json(const Matrix& m, double display_scale = 1.0);
std::string format_matrix_csv(const Matrix& m, double display_scale = 1.0);

}  // namespace corrstress
