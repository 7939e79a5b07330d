#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lvc::cli {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += header[i];
  }
  buf_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) {
    throw std::logic_error("CSV row width does not match header");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += format_number(values[i]);
  }
  buf_ += '\n';
}

void CsvWriter::row_with_int(const std::vector<double>& values, long long code) {
  if (values.size() + 1 != columns_) {
    throw std::logic_error("CSV row width does not match header");
  }
  for (double v : values) {
    buf_ += format_number(v);
    buf_ += ',';
  }
  buf_ += std::to_string(code);
  buf_ += '\n';
}

void CsvWriter::row_ints_first(const std::vector<long long>& ints,
                               const std::vector<double>& values) {
  if (ints.size() + values.size() != columns_) {
    throw std::logic_error("CSV row width does not match header");
  }
  bool first = true;
  for (long long v : ints) {
    if (!first) buf_ += ',';
    buf_ += std::to_string(v);
    first = false;
  }
  for (double v : values) {
    if (!first) buf_ += ',';
    buf_ += format_number(v);
    first = false;
  }
  buf_ += '\n';
}

void write_file(const std::filesystem::path& path, std::string_view payload) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!os) {
    throw IoError("failed writing " + path.string());
  }
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace lvc::cli
