#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wkbgo {

inline constexpr const char* kToolName = "wkbgo";
inline constexpr const char* kToolVersion = "1.0.0";

std::string sha256_hex(std::string_view bytes);

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" otherwise.
std::string format_double(double v);

/// Finite values as numbers, the rest as the strings of format_double.
nlohmann::json json_number(double v);

/// Report envelope. content_sha256 covers every other field of the envelope.
nlohmann::json make_report(const std::string& command, const std::string& scenario_sha256,
                           const nlohmann::json& resolved, const nlohmann::json& results);

/// Two-space indented dump with a trailing newline.
std::string dump_json(const nlohmann::json& j);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace wkbgo
