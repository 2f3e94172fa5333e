#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fanlab::cli {

inline constexpr const char* kVersion = "0.1.0";

// Shortest text that round-trips the double ("%.17g").
std::string fmt(double x);
std::string fmt(std::int64_t x);
std::string fmt(std::uint64_t x);
inline std::string fmt(bool b) { return b ? "true" : "false"; }

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  // Emitted as "# text" lines before the header.
  void comment(const std::string& text) { comments_.push_back(text); }
  // Throws std::invalid_argument if the width does not match the header.
  void row(std::vector<std::string> cells);

  std::size_t size() const noexcept { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes to a sibling temporary file and renames it into place. Throws
// std::runtime_error on I/O failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Run manifest: tool, version, command and every resolved parameter.
std::string manifest_text(const std::string& command, const nlohmann::json& cfg);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Minimal line plot: axes, tick labels at the ends, one polyline per series.
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series);

}  // namespace fanlab::cli
