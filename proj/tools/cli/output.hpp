#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lvc::cli {

// Round-trip (17 significant digit) formatting used for every CSV number.
std::string format_number(double v);

// Header + rows, comma separated with LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<double>& values);
  void row_with_int(const std::vector<double>& values, long long code);
  void row_ints_first(const std::vector<long long>& ints, const std::vector<double>& values);

  [[nodiscard]] const std::string& str() const noexcept { return buf_; }

 private:
  std::size_t columns_;
  std::string buf_;
};

// Writes the whole payload at once; throws lvc::cli::IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view payload);

std::string dump_json(const nlohmann::json& j);

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lvc::cli
