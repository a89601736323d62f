#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace tactaif {

/// Deterministic CSV writer: fixed float formatting so identical runs write
/// byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header,
            const std::string& comment = "");

  void row(const std::vector<std::string>& cells);

  static std::string fmt(double x, int decimals = 6);
  static std::string fmt(int x) { return std::to_string(x); }
  static std::string fmt(bool b) { return b ? "1" : "0"; }

 private:
  std::ofstream out_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// FNV-1a 64-bit, rendered as 16 hex digits. Used to stamp outputs with the
/// hash of the config that produced them.
std::string fnv1a_hex(const std::string& data);

}  // namespace tactaif
