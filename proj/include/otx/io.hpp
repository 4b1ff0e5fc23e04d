#pragma once

#include <filesystem>
#include <string>

#include "otx/core.hpp"

namespace otx::io {

// Histogram files: one real per line, '#' comment lines and blank lines skipped.
// Matrix files: n lines of n comma-separated reals.
// Writers emit 17 significant digits so values survive a round trip exactly.

Vector read_vector(const std::filesystem::path& path);
Histogram read_histogram(const std::filesystem::path& path);
void write_vector(const std::filesystem::path& path, const Vector& values);

Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& values);

/// "%.17g" rendering; used by every CSV writer in the project.
std::string format_real(double value);

/// Parses a full token as a double, rejecting trailing garbage.
double parse_real(const std::string& token);

} // namespace otx::io
