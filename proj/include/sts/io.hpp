#pragma once

#include <string>
#include <vector>

namespace sts {

// Shortest decimal form that round-trips a double exactly.
std::string fmt_double(double x);

// Writes via a temp file in the same directory, then renames into place.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Splits a comma-separated line; no quoting (none of our formats need it).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace sts
