#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactaif/image.hpp"

namespace tactaif {

/// Malformed image file. `byte_offset` points at the offending byte.
class PgmParseError : public std::runtime_error {
 public:
  PgmParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// Image with dimensions other than the caller expected.
class ImageDimensionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Writes an 8-bit binary grayscale PGM (P5, maxval 255). Pixels are
/// quantized with round-to-nearest; a write/read round trip reproduces them
/// within 1/255.
void write_pgm(const TactileImage& img, const std::filesystem::path& path);

/// Reads an 8-bit binary PGM written by write_pgm (or any P5 file with
/// maxval 255). Throws PgmParseError on malformed input.
TactileImage read_pgm(const std::filesystem::path& path);

/// read_pgm plus a dimension check; throws ImageDimensionError on mismatch.
TactileImage read_pgm(const std::filesystem::path& path, int expected_width,
                      int expected_height);

struct ManifestRow {
  std::string filename;
  double tilt_deg = 0.0;
};

/// Dataset manifest: CSV rows `filename,tilt_deg` with a header line.
void write_manifest(const std::vector<ManifestRow>& rows, const std::filesystem::path& path);

}  // namespace tactaif
