#include "lenski/io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace lenski {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
}

void CsvWriter::header(const std::vector<std::string>& names) {
  columns_ = names.size();
  for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << csv_escape(names[i]);
  out_ << "\r\n";
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (columns_ != 0 && cells.size() != columns_) throw std::logic_error("csv row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) out_ << format_double(v);
          else if constexpr (std::is_same_v<T, bool>) out_ << (v ? "1" : "0");
          else if constexpr (std::is_same_v<T, std::string>) out_ << csv_escape(v);
          else out_ << v;
        },
        cells[i]);
  }
  out_ << "\r\n";
  if (!out_) throw std::runtime_error("csv write failed");
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << value.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

}  // namespace lenski
