#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wealthlab {

/// printf-style %.{digits}g. Manifests use 17 digits, plot tables 6.
std::string format_real(double value, int digits);

/// Reads one numeric column from a headed CSV. When `column` is absent from
/// the header and the file has a single column, that column is used.
std::vector<double> read_column(std::istream& in, std::string_view column);

/// Reads the named numeric columns (all must be present) from a headed CSV.
std::vector<std::vector<double>> read_columns(std::istream& in,
                                              const std::vector<std::string>& columns);

/// Git blob object id of `content`: SHA-1 over "blob <size>\0" + content.
std::string git_blob_sha1(std::string_view content);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace wealthlab
