#include "wealthlab/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "wealthlab/error.hpp"

namespace wealthlab {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r' && c != '"') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  for (auto& f : fields) {
    const auto first = f.find_first_not_of(" \t");
    const auto last = f.find_last_not_of(" \t");
    f = first == std::string::npos ? std::string{} : f.substr(first, last - first + 1);
  }
  return fields;
}

double parse_number(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::MalformedInput,
                "line " + std::to_string(line_no) + ": not a number: '" + text + "'");
  }
  return value;
}

}  // namespace

std::string format_real(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

std::vector<std::vector<double>> read_columns(std::istream& in,
                                              const std::vector<std::string>& columns) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedInput, "missing header row");
  const auto header = split_csv_line(line);
  std::vector<std::size_t> index;
  for (const auto& name : columns) {
    std::size_t k = 0;
    while (k < header.size() && header[k] != name) ++k;
    if (k == header.size()) {
      if (columns.size() == 1 && header.size() == 1) {
        k = 0;
      } else {
        throw Error(ErrorCode::MalformedInput, "missing column '" + name + "'");
      }
    }
    index.push_back(k);
  }
  std::vector<std::vector<double>> out(columns.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    for (std::size_t c = 0; c < index.size(); ++c) {
      if (index[c] >= fields.size()) {
        throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": too few fields");
      }
      out[c].push_back(parse_number(fields[index[c]], line_no));
    }
  }
  return out;
}

std::vector<double> read_column(std::istream& in, std::string_view column) {
  return std::move(read_columns(in, {std::string(column)}).front());
}

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedInput, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace wealthlab
