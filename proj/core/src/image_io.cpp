#include "tactaif/image_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace tactaif {

void write_pgm(const TactileImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_pgm: cannot open " + path.string() + " for writing");
  }
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.width()));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      row[static_cast<std::size_t>(x)] =
          static_cast<unsigned char>(std::lround(img.at(x, y) * 255.0));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) {
    throw std::runtime_error("write_pgm: write failed for " + path.string());
  }
}

namespace {

// Cursor over the raw file bytes, tracking the offset for error reporting.
struct ByteCursor {
  const std::vector<char>& data;
  std::size_t pos = 0;

  bool eof() const { return pos >= data.size(); }
  char peek() const { return data[pos]; }

  void skip_whitespace_and_comments() {
    while (!eof()) {
      const char c = data[pos];
      if (c == '#') {
        while (!eof() && data[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  }

  long parse_uint(const char* what) {
    skip_whitespace_and_comments();
    if (eof() || data[pos] < '0' || data[pos] > '9') {
      throw PgmParseError(std::string("read_pgm: expected ") + what, pos);
    }
    long value = 0;
    while (!eof() && data[pos] >= '0' && data[pos] <= '9') {
      value = value * 10 + (data[pos] - '0');
      if (value > 1000000) {
        throw PgmParseError(std::string("read_pgm: implausibly large ") + what, pos);
      }
      ++pos;
    }
    return value;
  }
};

}  // namespace

TactileImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_pgm: cannot open " + path.string());
  }
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  ByteCursor cur{data};
  if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
    throw PgmParseError("read_pgm: missing P5 magic", 0);
  }
  cur.pos = 2;
  const long width = cur.parse_uint("width");
  const long height = cur.parse_uint("height");
  const long maxval = cur.parse_uint("maxval");
  if (width <= 0 || height <= 0) {
    throw PgmParseError("read_pgm: non-positive dimensions", cur.pos);
  }
  if (maxval != 255) {
    throw PgmParseError("read_pgm: only maxval 255 is supported", cur.pos);
  }
  // Exactly one whitespace byte separates the header from the raster.
  if (cur.eof() || !(cur.peek() == ' ' || cur.peek() == '\t' || cur.peek() == '\r' ||
                     cur.peek() == '\n')) {
    throw PgmParseError("read_pgm: expected whitespace before raster", cur.pos);
  }
  ++cur.pos;

  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (data.size() - cur.pos < expected) {
    throw PgmParseError("read_pgm: truncated raster, need " + std::to_string(expected) +
                            " bytes, have " + std::to_string(data.size() - cur.pos),
                        data.size());
  }
  std::vector<double> pixels(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    pixels[i] = static_cast<unsigned char>(data[cur.pos + i]) / 255.0;
  }
  return TactileImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

TactileImage read_pgm(const std::filesystem::path& path, int expected_width,
                      int expected_height) {
  TactileImage img = read_pgm(path);
  if (img.width() != expected_width || img.height() != expected_height) {
    throw ImageDimensionError("read_pgm: expected " + std::to_string(expected_width) + "x" +
                              std::to_string(expected_height) + ", file holds " +
                              std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
  return img;
}

void write_manifest(const std::vector<ManifestRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_manifest: cannot open " + path.string());
  }
  out << "filename,tilt_deg\n";
  char buf[64];
  for (const ManifestRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.tilt_deg);
    out << r.filename << "," << buf << "\n";
  }
}

}  // namespace tactaif
