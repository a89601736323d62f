#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tactaif/image.hpp"
#include "tactaif/image_io.hpp"
#include "test_helpers.hpp"

using namespace tactaif;

namespace {
std::filesystem::path tmp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}
}  // namespace

TEST_CASE("TactileImage validates construction") {
  CHECK_THROWS_AS(TactileImage(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(TactileImage(4, 4, std::vector<double>(3, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(TactileImage(2, 2, {0.0, 0.5, 1.0, 1.5}), std::invalid_argument);
  const TactileImage img(3, 2, {0, 0.5, 1, 0.25, 0.75, 1});
  CHECK(img.at(1, 0) == 0.5);
  CHECK(img.at(2, 1) == 1.0);
}

TEST_CASE("rotate by zero is the identity") {
  const TactileImage img = testutil::rect_image(32, 24, 10, 4);
  const TactileImage out = rotate(img, 0.0);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    CHECK(out.pixels()[i] == img.pixels()[i]);
  }
}

TEST_CASE("rotate round trip stays close on the interior") {
  const TactileImage img = testutil::rect_image(64, 48, 15, 6);
  const TactileImage back = rotate(rotate(img, 12.0), -12.0);
  CHECK(testutil::interior_mad(img, back, 4) < 0.02);
}

TEST_CASE("rotate by 90 degrees matches a freshly rendered swapped rectangle") {
  const TactileImage img = testutil::rect_image(48, 48, 14, 5);
  const TactileImage rotated = rotate(img, 90.0);
  const TactileImage swapped = testutil::rect_image(48, 48, 5, 14);
  CHECK(mean_abs_diff(rotated, swapped) < 0.02);
}

TEST_CASE("rotation approximately preserves intensity mass") {
  // Footprint support stays >= 5 px from the border.
  const TactileImage img = testutil::rect_image(64, 48, 14, 6);
  for (double angle : {7.0, 33.0, -21.0, 90.0}) {
    const TactileImage out = rotate(img, angle);
    CHECK(std::abs(out.mass() - img.mass()) / img.mass() < 0.05);
  }
}

TEST_CASE("rotate output stays in range") {
  const TactileImage img = testutil::rect_image(32, 24, 9, 7, 0.5);
  for (double angle : {13.7, -45.0, 181.0}) {
    const TactileImage out = rotate(img, angle);
    for (double p : out.pixels()) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
  CHECK_THROWS_AS(rotate(img, std::nan("")), std::invalid_argument);
}

TEST_CASE("augment honors count, range and determinism") {
  const TactileImage base = testutil::rect_image(32, 24, 9, 4);
  AugmentConfig cfg;
  cfg.count = 50;
  cfg.tilt_min_deg = -20.0;
  cfg.tilt_max_deg = 20.0;
  cfg.rng_seed = 77;

  const auto samples = augment(base, cfg);
  REQUIRE(samples.size() == 50);
  for (const auto& s : samples) {
    CHECK(s.tilt_deg >= -20.0);
    CHECK(s.tilt_deg <= 20.0);
    for (double p : s.image.pixels()) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }

  const auto again = augment(base, cfg);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].tilt_deg == again[i].tilt_deg);
    CHECK(samples[i].image.pixels() == again[i].image.pixels());
  }

  // Sample images are rotations of the base by their own label.
  const TactileImage expect = rotate(base, samples[3].tilt_deg);
  CHECK(samples[3].image.pixels() == expect.pixels());
}

TEST_CASE("augment degenerate range reproduces the input") {
  const TactileImage base = testutil::rect_image(16, 16, 5, 3);
  AugmentConfig cfg;
  cfg.count = 1;
  cfg.tilt_min_deg = 0.0;
  cfg.tilt_max_deg = 0.0;
  cfg.rng_seed = 1;
  const auto samples = augment(base, cfg);
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].tilt_deg == 0.0);
  CHECK(samples[0].image.pixels() == base.pixels());
}

TEST_CASE("augment rejects bad configs") {
  const TactileImage base(8, 8);
  AugmentConfig cfg;
  cfg.count = 0;
  CHECK_THROWS_AS(augment(base, cfg), std::invalid_argument);
  cfg.count = 1;
  cfg.tilt_min_deg = 5;
  cfg.tilt_max_deg = -5;
  CHECK_THROWS_AS(augment(base, cfg), std::invalid_argument);
}

TEST_CASE("pgm round trip") {
  const auto path = tmp_file("tactaif_test_roundtrip.pgm");

  SUBCASE("all zeros") {
    const TactileImage img(64, 48);
    write_pgm(img, path);
    const TactileImage back = read_pgm(path, 64, 48);
    for (double p : back.pixels()) CHECK(p == 0.0);
  }

  SUBCASE("rendered footprint within quantization") {
    const TactileImage img = testutil::rect_image(64, 48, 13, 6, 2.0);
    write_pgm(img, path);
    const TactileImage back = read_pgm(path);
    REQUIRE(back.same_dims(img));
    double max_err = 0.0;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      max_err = std::max(max_err, std::abs(img.pixels()[i] - back.pixels()[i]));
    }
    CHECK(max_err <= 1.0 / 255.0);
  }

  std::filesystem::remove(path);
}

TEST_CASE("pgm parse errors carry byte offsets") {
  const auto path = tmp_file("tactaif_test_bad.pgm");

  SUBCASE("truncated raster") {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n8 8\n255\n";
    out << "short";
    out.close();
    CHECK_THROWS_AS(read_pgm(path), PgmParseError);
    try {
      read_pgm(path);
    } catch (const PgmParseError& e) {
      CHECK(e.byte_offset() > 0);
      CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
  }

  SUBCASE("bad magic") {
    std::ofstream out(path, std::ios::binary);
    out << "P6\n2 2\n255\n1234";
    out.close();
    CHECK_THROWS_AS(read_pgm(path), PgmParseError);
  }

  SUBCASE("dimension mismatch") {
    const TactileImage img(8, 4);
    write_pgm(img, path);
    CHECK_THROWS_AS(read_pgm(path, 16, 16), ImageDimensionError);
  }

  std::filesystem::remove(path);
}

TEST_CASE("manifest rows") {
  const auto path = tmp_file("tactaif_test_manifest.csv");
  write_manifest({{"a.pgm", -3.25}, {"b.pgm", 10.0}}, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "filename,tilt_deg");
  std::getline(in, line);
  CHECK(line == "a.pgm,-3.250000");
  std::getline(in, line);
  CHECK(line == "b.pgm,10.000000");
  std::filesystem::remove(path);
}
