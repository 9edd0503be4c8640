#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "pmog/error.hpp"
#include "pmog/io.hpp"
#include "test_support.hpp"

using namespace pmog;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pmog_test_io";
  fs::create_directories(dir);
  return dir / name;
}

void put(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("csv round trip is bit exact") {
  Rng rng(1);
  Matrix M = testsupport::random_matrix(5, 37, rng);
  M(0, 0) = 1e-300;
  M(1, 1) = -0.0;
  M(2, 2) = 123456789.123456789;
  M(3, 3) = std::numeric_limits<double>::denorm_min();
  const fs::path p = scratch("round.csv");
  io::write_csv(p, M);
  const Matrix back = io::read_csv(p);
  REQUIRE(back.rows() == M.rows());
  REQUIRE(back.cols() == M.cols());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) CHECK(std::bit_cast<std::uint64_t>(back(i, j)) == std::bit_cast<std::uint64_t>(M(i, j)));
}

TEST_CASE("csv reader tolerates CRLF and blank lines") {
  const fs::path p = scratch("crlf.csv");
  put(p, "1,2,3\r\n\r\n4,5.5,-6e2\r\n");
  const Matrix M = io::read_csv(p);
  REQUIRE(M.rows() == 2);
  CHECK(M(1, 2) == -600.0);
  CHECK(M(1, 1) == 5.5);
}

TEST_CASE("csv errors") {
  const fs::path ragged = scratch("ragged.csv");
  put(ragged, "1,2,3\n4,5\n");
  CHECK(code_of([&] { io::read_csv(ragged); }) == ErrorCode::IoError);
  const fs::path junk = scratch("junk.csv");
  put(junk, "1,abc\n");
  CHECK(code_of([&] { io::read_csv(junk); }) == ErrorCode::IoError);
  CHECK(code_of([&] { io::read_csv(scratch("does_not_exist.csv")); }) == ErrorCode::IoError);
  CHECK_THROWS_AS(io::format_double(std::nan("")), Error);
}

TEST_CASE("pgm P2 with comments") {
  const fs::path p = scratch("ascii.pgm");
  put(p, "P2\n# a comment\n3 2 # trailing\n10\n0 5 10\n# mid\n1 2 3\n");
  const io::GrayImage img = io::read_pgm(p);
  CHECK(img.width == 3);
  CHECK(img.height == 2);
  CHECK(img.maxval == 10);
  REQUIRE(img.pixels.size() == 6);
  CHECK(img.pixels[2] == 10.0);
  CHECK(img.pixels[5] == 3.0);
}

TEST_CASE("pgm P5 round trip at 8 and 16 bit") {
  for (int maxval : {255, 65535}) {
    io::GrayImage img;
    img.width = 4;
    img.height = 3;
    img.maxval = maxval;
    for (int k = 0; k < 12; ++k) img.pixels.push_back(std::floor(maxval * k / 11.0));
    const fs::path p = scratch("bin" + std::to_string(maxval) + ".pgm");
    io::write_pgm(p, img);
    const io::GrayImage back = io::read_pgm(p);
    CHECK(back.width == 4);
    CHECK(back.height == 3);
    CHECK(back.maxval == maxval);
    CHECK(back.pixels == img.pixels);
  }
}

TEST_CASE("pgm format errors") {
  const fs::path bad_magic = scratch("magic.pgm");
  put(bad_magic, "P6\n2 2\n255\n");
  CHECK(code_of([&] { io::read_pgm(bad_magic); }) == ErrorCode::ImageFormatError);
  const fs::path short_data = scratch("short.pgm");
  put(short_data, std::string("P5\n2 2\n255\n") + std::string(3, '\x01'));
  CHECK(code_of([&] { io::read_pgm(short_data); }) == ErrorCode::ImageFormatError);
  const fs::path big = scratch("range.pgm");
  put(big, "P2\n1 1\n10\n11\n");
  CHECK(code_of([&] { io::read_pgm(big); }) == ErrorCode::ImageFormatError);
}

TEST_CASE("rescaled pgm output") {
  Vector v(4);
  v << -1.0, 0.0, 1.0, 3.0;
  const fs::path p = scratch("rescaled.pgm");
  io::write_pgm_rescaled(p, v, 2, 2);
  const io::GrayImage img = io::read_pgm(p);
  CHECK(img.pixels.front() == 0.0);
  CHECK(img.pixels.back() == 255.0);
  CHECK(code_of([&] { io::write_pgm_rescaled(p, v, 3, 2); }) == ErrorCode::SizeMismatch);
}

TEST_CASE("text helpers create directories") {
  const fs::path p = scratch("nested/deeper/file.txt");
  io::write_text(p, "hello\n");
  CHECK(io::read_text(p) == "hello\n");
}
