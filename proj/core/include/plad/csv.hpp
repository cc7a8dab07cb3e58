#pragma once

#include <filesystem>
#include <string_view>

#include "plad/core_model.hpp"

namespace plad::csv {

/// Parses comma-separated numeric text. A first row that does not parse as
/// numbers is treated as a header and skipped. Parsing ignores the locale.
Matrix parse_matrix(std::string_view text);

Matrix read_matrix(const std::filesystem::path& path);

/// Reads an n x 1 column (a single row of n values is also accepted).
Vector read_vector(const std::filesystem::path& path);

}  // namespace plad::csv
