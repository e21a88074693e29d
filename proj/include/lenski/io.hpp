#pragma once

// Result export: RFC-4180 CSV with round-trippable floats, and JSON files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace lenski {

using Cell = std::variant<std::int64_t, double, std::string, bool>;

/// Shortest form carrying 17 significant digits; always uses '.'.
std::string format_double(double v);

std::string csv_escape(const std::string& field);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace lenski
